#include "postrec/index.hpp"

#include "postrec/errors.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

namespace postrec {

using nlohmann::json;

namespace {

double score_one(const ScoringParams& p, std::size_t doc_count, std::size_t df,
                 std::uint32_t tf, std::uint32_t len, double avg_len) {
    if (tf == 0 || avg_len <= 0.0)
        return 0.0;
    const double f = static_cast<double>(tf);
    const double norm = (1.0 - p.b) + p.b * (static_cast<double>(len) / avg_len);
    if (p.mode == ScorerMode::tf_saturation)
        return f / (p.k1 * norm + f);
    const double n = static_cast<double>(doc_count);
    const double d = static_cast<double>(df);
    const double idf = std::log(1.0 + (n - d + 0.5) / (d + 0.5));
    return idf * (f * (p.k1 + 1.0)) / (f + p.k1 * norm);
}

std::uint32_t posting_tf(std::span<const Posting> list, std::int64_t doc_id) {
    auto it = std::lower_bound(list.begin(), list.end(), doc_id,
                               [](const Posting& p, std::int64_t id) {
                                   return p.doc_id < id;
                               });
    if (it == list.end() || it->doc_id != doc_id)
        return 0;
    return it->tf;
}

} // namespace

const DocSummary* Index::document(std::int64_t doc_id) const {
    auto slot = slot_of(doc_id);
    return slot ? &docs_[*slot] : nullptr;
}

std::optional<std::size_t> Index::slot_of(std::int64_t doc_id) const {
    auto it = std::lower_bound(docs_.begin(), docs_.end(), doc_id,
                               [](const DocSummary& d, std::int64_t id) {
                                   return d.id < id;
                               });
    if (it == docs_.end() || it->id != doc_id)
        return std::nullopt;
    return static_cast<std::size_t>(it - docs_.begin());
}

std::span<const Posting> Index::postings(FieldId f,
                                         std::string_view term) const {
    const PostingsMap& m = postings_[static_cast<std::size_t>(f)];
    auto it = m.find(term);
    if (it == m.end())
        return {};
    return it->second;
}

std::size_t Index::doc_frequency(FieldId f, std::string_view term) const {
    return postings(f, term).size();
}

std::uint32_t Index::field_length(FieldId f, std::int64_t doc_id) const {
    auto slot = slot_of(doc_id);
    if (!slot)
        return 0;
    return lengths_[static_cast<std::size_t>(f)][*slot];
}

void Index::recompute_stats() {
    const std::size_t n = docs_.size();
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        lengths_[f].assign(n, 0);
        for (const auto& [term, list] : postings_[f]) {
            for (const Posting& p : list) {
                auto slot = slot_of(p.doc_id);
                if (!slot)
                    throw InputError("postings reference unknown document id " +
                                     std::to_string(p.doc_id));
                lengths_[f][*slot] += p.tf;
            }
        }
        std::uint64_t total = 0;
        for (std::uint32_t len : lengths_[f])
            total += len;
        avg_len_[f] =
            n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);
    }
}

FieldedDocument document_from_post(const CleanPost& post,
                                   const CanonicalTable* table,
                                   const BuildOptions& options) {
    FieldedDocument doc;
    doc.doc_id = post.question_id;
    doc.title = post.title;

    auto& terms = doc.field_terms;
    terms[static_cast<std::size_t>(FieldId::title)] =
        analyze_text(post.title, options.analyzer);
    terms[static_cast<std::size_t>(FieldId::question)] =
        analyze_text(post.question_text, options.analyzer);
    auto& answer_terms = terms[static_cast<std::size_t>(FieldId::answer)];
    for (const std::string& text : post.answer_texts) {
        std::vector<std::string> toks = analyze_text(text, options.analyzer);
        answer_terms.insert(answer_terms.end(),
                            std::make_move_iterator(toks.begin()),
                            std::make_move_iterator(toks.end()));
    }

    std::string context;
    if (options.import_mining && table) {
        context = post.title;
        context += '\n';
        context += post.question_text;
        for (const std::string& text : post.answer_texts) {
            context += '\n';
            context += text;
        }
    }

    auto append_set = [&terms](FieldId f, const std::set<std::string>& set) {
        auto& v = terms[static_cast<std::size_t>(f)];
        v.insert(v.end(), set.begin(), set.end());
    };
    for (const CodeSnippet& snippet : post.code_snippets) {
        ParseOutput parsed = parse_facets(snippet.source, options.wrapping);
        CodeFacets& fc = parsed.facets;
        if (options.import_mining && table && fc.imports.empty()) {
            std::vector<std::string> deduced =
                deduce_imports(fc, *table, context);
            fc.imports.insert(deduced.begin(), deduced.end());
        }
        append_set(FieldId::import_declaration, fc.imports);
        append_set(FieldId::method_declaration, fc.method_declarations);
        append_set(FieldId::method_invocation, fc.method_invocations);
        append_set(FieldId::variable_type, fc.variable_types);
        append_set(FieldId::variable_declaration, fc.variable_declarations);
        append_set(FieldId::class_instance, fc.class_instances);
    }
    return doc;
}

Index build_index(std::vector<FieldedDocument> docs,
                  const ScoringParams& params) {
    std::sort(docs.begin(), docs.end(),
              [](const FieldedDocument& a, const FieldedDocument& b) {
                  return a.doc_id < b.doc_id;
              });
    for (std::size_t i = 1; i < docs.size(); ++i) {
        if (docs[i].doc_id == docs[i - 1].doc_id)
            throw ValidationError("duplicate document id " +
                                  std::to_string(docs[i].doc_id));
    }

    Index idx;
    idx.params_ = params;
    idx.docs_.reserve(docs.size());
    for (const FieldedDocument& d : docs)
        idx.docs_.push_back({d.doc_id, d.title});

    for (const FieldedDocument& d : docs) {
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            std::map<std::string, std::uint32_t> counts;
            for (const std::string& term : d.field_terms[f])
                ++counts[term];
            for (const auto& [term, tf] : counts)
                idx.postings_[f][term].push_back({d.doc_id, tf});
        }
    }
    idx.recompute_stats();
    return idx;
}

Index build_index(std::span<const CleanPost> posts, const CanonicalTable* table,
                  const BuildOptions& options) {
    std::vector<FieldedDocument> docs(posts.size());
    detail::parallel_for(posts.size(), options.jobs, [&](std::size_t i) {
        docs[i] = document_from_post(posts[i], table, options);
    });
    return build_index(std::move(docs), options.scoring);
}

Index build_index(PostReader& reader, const CanonicalTable* table,
                  const BuildOptions& options) {
    std::vector<CleanPost> posts;
    while (auto post = reader.next())
        posts.push_back(std::move(*post));
    return build_index(std::span<const CleanPost>(posts), table, options);
}

double bm25(const Index& index, FieldId field, std::string_view term,
            std::int64_t doc_id,
            const std::optional<ScoringParams>& override_params) {
    const ScoringParams& p =
        override_params ? *override_params : index.params();
    std::span<const Posting> list = index.postings(field, term);
    std::uint32_t tf = posting_tf(list, doc_id);
    return score_one(p, index.doc_count(), list.size(), tf,
                     index.field_length(field, doc_id),
                     index.avg_field_length(field));
}

std::vector<SearchHit> search(const Index& index, const Query& query,
                              std::size_t top_n,
                              const std::optional<ScoringParams>& override_params) {
    const ScoringParams& p =
        override_params ? *override_params : index.params();
    std::unordered_map<std::int64_t, double> scores;
    for (const QueryClause& clause : query.clauses) {
        std::span<const Posting> list =
            index.postings(clause.field, clause.term);
        if (list.empty())
            continue;
        const std::size_t df = list.size();
        const double avg = index.avg_field_length(clause.field);
        for (const Posting& posting : list) {
            double s = score_one(p, index.doc_count(), df, posting.tf,
                                 index.field_length(clause.field,
                                                    posting.doc_id),
                                 avg);
            scores[posting.doc_id] += clause.boost * s;
        }
    }
    std::vector<SearchHit> hits;
    hits.reserve(scores.size());
    for (const auto& [doc_id, score] : scores) {
        const DocSummary* doc = index.document(doc_id);
        hits.push_back({doc_id, score, doc ? doc->title : std::string()});
    }
    std::sort(hits.begin(), hits.end(),
              [](const SearchHit& a, const SearchHit& b) {
                  if (a.score != b.score)
                      return a.score > b.score;
                  return a.doc_id < b.doc_id;
              });
    if (hits.size() > top_n)
        hits.resize(top_n);
    return hits;
}

std::vector<ClauseContribution> explain(
    const Index& index, const Query& query, std::int64_t doc_id,
    const std::optional<ScoringParams>& override_params) {
    std::vector<ClauseContribution> out;
    out.reserve(query.clauses.size());
    for (const QueryClause& clause : query.clauses) {
        double s =
            bm25(index, clause.field, clause.term, doc_id, override_params);
        out.push_back({clause, clause.boost * s});
    }
    return out;
}

void persist(const Index& index, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    json manifest;
    manifest["format_version"] = kIndexFormatVersion;
    json field_names = json::array();
    for (FieldId f : kAllFields)
        field_names.push_back(std::string(field_name(f)));
    manifest["fields"] = std::move(field_names);
    manifest["scoring"] = {{"k1", index.params().k1},
                           {"b", index.params().b},
                           {"mode", scorer_mode_name(index.params().mode)}};
    manifest["stats"] = {{"documents", index.doc_count()}};
    {
        std::ofstream out(dir / "manifest.json",
                          std::ios::binary | std::ios::trunc);
        out << manifest.dump(2) << '\n';
        if (!out)
            throw InputError("failed writing " +
                             (dir / "manifest.json").string());
    }
    {
        std::ofstream out(dir / "docs.jsonl",
                          std::ios::binary | std::ios::trunc);
        for (const DocSummary& d : index.documents()) {
            json j;
            j["id"] = d.id;
            j["title"] = d.title;
            out << j.dump() << '\n';
        }
        if (!out)
            throw InputError("failed writing " + (dir / "docs.jsonl").string());
    }
    {
        std::ofstream out(dir / "postings.jsonl",
                          std::ios::binary | std::ios::trunc);
        for (FieldId f : kAllFields) {
            for (const auto& [term, list] : index.field_postings(f)) {
                json postings = json::array();
                for (const Posting& p : list)
                    postings.push_back({p.doc_id, p.tf});
                json j;
                j["field"] = std::string(field_name(f));
                j["term"] = term;
                j["df"] = list.size();
                j["postings"] = std::move(postings);
                out << j.dump() << '\n';
            }
        }
        if (!out)
            throw InputError("failed writing " +
                             (dir / "postings.jsonl").string());
    }
}

Index open_index(const std::filesystem::path& dir) {
    const std::filesystem::path manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path))
        throw InputError("missing manifest: " + manifest_path.string());

    Index idx;
    try {
        std::ifstream in(manifest_path, std::ios::binary);
        json manifest = json::parse(in);
        int version = manifest.at("format_version").get<int>();
        if (version != kIndexFormatVersion)
            throw InputError("index format version " +
                             std::to_string(version) +
                             " unsupported (this build reads version " +
                             std::to_string(kIndexFormatVersion) + ")");
        auto names = manifest.at("fields").get<std::vector<std::string>>();
        if (names.size() != kFieldCount)
            throw InputError("index field list mismatch in " +
                             manifest_path.string());
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            if (names[f] != field_name(static_cast<FieldId>(f)))
                throw InputError("index field list mismatch in " +
                                 manifest_path.string());
        }
        const json& scoring = manifest.at("scoring");
        idx.params_.k1 = scoring.at("k1").get<double>();
        idx.params_.b = scoring.at("b").get<double>();
        auto mode = parse_scorer_mode(scoring.at("mode").get<std::string>());
        if (!mode)
            throw InputError("unknown scorer mode in " +
                             manifest_path.string());
        idx.params_.mode = *mode;

        std::ifstream docs_in(dir / "docs.jsonl", std::ios::binary);
        if (!docs_in)
            throw InputError("cannot open " + (dir / "docs.jsonl").string());
        std::string line;
        while (std::getline(docs_in, line)) {
            json j = json::parse(line);
            DocSummary d{j.at("id").get<std::int64_t>(),
                         j.at("title").get<std::string>()};
            if (!idx.docs_.empty() && d.id <= idx.docs_.back().id)
                throw InputError("docs.jsonl not sorted by id in " +
                                 dir.string());
            idx.docs_.push_back(std::move(d));
        }
        if (idx.docs_.size() !=
            manifest.at("stats").at("documents").get<std::size_t>())
            throw InputError("document count mismatch in " + dir.string());

        std::ifstream postings_in(dir / "postings.jsonl", std::ios::binary);
        if (!postings_in)
            throw InputError("cannot open " +
                             (dir / "postings.jsonl").string());
        while (std::getline(postings_in, line)) {
            json j = json::parse(line);
            auto field = parse_field_name(j.at("field").get<std::string>());
            if (!field)
                throw InputError("unknown field in postings.jsonl: " +
                                 j.at("field").get<std::string>());
            std::vector<Posting> list;
            for (const json& pair : j.at("postings")) {
                Posting p{pair.at(0).get<std::int64_t>(),
                          pair.at(1).get<std::uint32_t>()};
                if (!list.empty() && p.doc_id <= list.back().doc_id)
                    throw InputError("postings not sorted by doc id in " +
                                     dir.string());
                list.push_back(p);
            }
            if (j.at("df").get<std::size_t>() != list.size())
                throw InputError("df mismatch in postings.jsonl in " +
                                 dir.string());
            idx.postings_[static_cast<std::size_t>(*field)].emplace(
                j.at("term").get<std::string>(), std::move(list));
        }
    } catch (const json::exception& e) {
        throw InputError("corrupt index in " + dir.string() + ": " + e.what());
    }
    idx.recompute_stats();
    return idx;
}

} // namespace postrec
