#include "postrec/posts.hpp"

#include "postrec/errors.hpp"
#include "postrec/htmltext.hpp"

#include <json.hpp>

#include <algorithm>
#include <unordered_map>

namespace postrec {

using nlohmann::json;

namespace {

json post_to_json(const CleanPost& post) {
    json snippets = json::array();
    for (const CodeSnippet& s : post.code_snippets) {
        snippets.push_back({{"origin", snippet_origin_name(s.origin)},
                            {"source", s.source}});
    }
    // std::map-backed json keeps keys sorted, so the line layout is stable
    json j;
    j["id"] = post.question_id;
    j["title"] = post.title;
    j["question"] = post.question_text;
    j["answers"] = post.answer_texts;
    j["snippets"] = std::move(snippets);
    j["tags"] = post.tags;
    return j;
}

CleanPost post_from_json(const json& j) {
    CleanPost post;
    post.question_id = j.at("id").get<std::int64_t>();
    post.title = j.at("title").get<std::string>();
    post.question_text = j.at("question").get<std::string>();
    post.answer_texts = j.at("answers").get<std::vector<std::string>>();
    for (const json& s : j.at("snippets")) {
        CodeSnippet snip;
        std::string origin = s.at("origin").get<std::string>();
        if (origin == "question")
            snip.origin = SnippetOrigin::question;
        else if (origin == "accepted_answer")
            snip.origin = SnippetOrigin::accepted_answer;
        else
            throw InputError("unknown snippet origin '" + origin + "'");
        snip.source = s.at("source").get<std::string>();
        post.code_snippets.push_back(std::move(snip));
    }
    post.tags = j.at("tags").get<std::vector<std::string>>();
    return post;
}

struct Group {
    std::optional<RawRow> question;
    std::vector<RawRow> answers;
};

void emit_group(const RawRow& question, const std::vector<RawRow>& answers,
                PostWriter& out, IngestSummary& summary) {
    if (auto post = clean_and_filter(question, answers, &summary.rejected)) {
        out.write(*post);
        ++summary.kept;
    }
}

json raw_row_to_json(const RawRow& r) {
    json j;
    j["id"] = r.id;
    j["type"] = r.post_type == PostType::question ? 1 : 2;
    if (r.parent_id)
        j["parent"] = *r.parent_id;
    if (r.accepted_answer_id)
        j["accepted"] = *r.accepted_answer_id;
    if (!r.title.empty())
        j["title"] = r.title;
    j["body"] = r.body;
    if (!r.tags.empty())
        j["tags"] = r.tags;
    if (r.score != 0)
        j["score"] = r.score;
    return j;
}

RawRow raw_row_from_json(const json& j) {
    RawRow r;
    r.id = j.at("id").get<std::int64_t>();
    r.post_type =
        j.at("type").get<int>() == 1 ? PostType::question : PostType::answer;
    if (j.contains("parent"))
        r.parent_id = j["parent"].get<std::int64_t>();
    if (j.contains("accepted"))
        r.accepted_answer_id = j["accepted"].get<std::int64_t>();
    if (j.contains("title"))
        r.title = j["title"].get<std::string>();
    r.body = j.at("body").get<std::string>();
    if (j.contains("tags"))
        r.tags = j["tags"].get<std::vector<std::string>>();
    if (j.contains("score"))
        r.score = j["score"].get<int>();
    return r;
}

IngestSummary ingest_in_memory(DumpRowReader& reader, PostWriter& out) {
    IngestSummary summary;
    std::unordered_map<std::int64_t, Group> groups;
    std::vector<std::int64_t> question_order;
    while (auto row = reader.next()) {
        if (row->post_type == PostType::question) {
            Group& g = groups[row->id];
            if (!g.question) { // duplicate question ids keep the first seen
                g.question = std::move(*row);
                question_order.push_back(g.question->id);
            }
        } else {
            groups[*row->parent_id].answers.push_back(std::move(*row));
        }
    }
    summary.rows = reader.tally();
    summary.questions = question_order.size();
    for (std::int64_t id : question_order) {
        const Group& g = groups.at(id);
        emit_group(*g.question, g.answers, out, summary);
    }
    return summary;
}

IngestSummary ingest_spilled(DumpRowReader& reader, PostWriter& out,
                             const IngestOptions& options) {
    if (options.spill_dir.empty())
        throw InputError("spill mode needs a spill directory");
    std::filesystem::create_directories(options.spill_dir);

    int shards = options.shards;
    if (shards <= 0) {
        // target roughly 8 MB of staged rows per shard
        std::uintmax_t hint = options.dump_bytes_hint;
        shards = hint == 0
                     ? 64
                     : static_cast<int>(std::clamp<std::uintmax_t>(
                           hint / (8u << 20), 8, 4096));
    }

    std::vector<std::filesystem::path> shard_paths;
    std::vector<std::ofstream> shard_files;
    shard_paths.reserve(shards);
    shard_files.reserve(shards);
    for (int s = 0; s < shards; ++s) {
        shard_paths.push_back(options.spill_dir /
                              ("shard_" + std::to_string(s) + ".jsonl"));
        shard_files.emplace_back(shard_paths.back(),
                                 std::ios::binary | std::ios::trunc);
        if (!shard_files.back())
            throw InputError("cannot create spill file: " +
                             shard_paths.back().string());
    }

    IngestSummary summary;
    while (auto row = reader.next()) {
        std::int64_t qid = row->post_type == PostType::question
                               ? row->id
                               : *row->parent_id;
        std::int64_t slot = qid % shards;
        if (slot < 0)
            slot += shards;
        shard_files[static_cast<std::size_t>(slot)]
            << raw_row_to_json(*row).dump() << '\n';
    }
    summary.rows = reader.tally();
    for (auto& f : shard_files) {
        f.flush();
        if (!f)
            throw InputError("failed writing spill files");
        f.close();
    }

    for (const auto& path : shard_paths) {
        std::unordered_map<std::int64_t, Group> groups;
        {
            std::ifstream in(path, std::ios::binary);
            std::string line;
            while (std::getline(in, line)) {
                RawRow row = raw_row_from_json(json::parse(line));
                if (row.post_type == PostType::question) {
                    Group& g = groups[row.id];
                    if (!g.question)
                        g.question = std::move(row);
                } else {
                    groups[*row.parent_id].answers.push_back(std::move(row));
                }
            }
        }
        std::vector<std::int64_t> ids;
        ids.reserve(groups.size());
        for (const auto& [id, g] : groups) {
            if (g.question)
                ids.push_back(id);
        }
        std::sort(ids.begin(), ids.end());
        summary.questions += ids.size();
        for (std::int64_t id : ids) {
            const Group& g = groups.at(id);
            emit_group(*g.question, g.answers, out, summary);
        }
        std::filesystem::remove(path);
    }
    return summary;
}

} // namespace

std::string_view snippet_origin_name(SnippetOrigin o) {
    return o == SnippetOrigin::question ? "question" : "accepted_answer";
}

std::optional<CleanPost> clean_and_filter(const RawRow& question,
                                          const std::vector<RawRow>& answers,
                                          RejectionTally* tally) {
    const RawRow* accepted = nullptr;
    if (question.accepted_answer_id) {
        for (const RawRow& a : answers) {
            if (a.id == *question.accepted_answer_id) {
                accepted = &a;
                break;
            }
        }
    }
    if (!accepted) {
        if (tally)
            ++tally->no_accept;
        return std::nullopt;
    }
    BodySegments q_seg = extract_segments(question.body);
    BodySegments acc_seg = extract_segments(accepted->body);
    if (q_seg.code_blocks.empty() && acc_seg.code_blocks.empty()) {
        if (tally)
            ++tally->no_code;
        return std::nullopt;
    }
    if (std::find(question.tags.begin(), question.tags.end(), "java") ==
        question.tags.end()) {
        if (tally)
            ++tally->no_java;
        return std::nullopt;
    }

    CleanPost post;
    post.question_id = question.id;
    post.title = decode_entities(question.title);
    post.question_text = std::move(q_seg.text);
    post.answer_texts.push_back(acc_seg.text);
    for (const RawRow& a : answers) {
        if (a.id == accepted->id)
            continue;
        post.answer_texts.push_back(extract_segments(a.body).text);
    }
    for (std::string& block : q_seg.code_blocks)
        post.code_snippets.push_back(
            {SnippetOrigin::question, std::move(block)});
    for (std::string& block : acc_seg.code_blocks)
        post.code_snippets.push_back(
            {SnippetOrigin::accepted_answer, std::move(block)});
    post.tags = question.tags;
    return post;
}

PostWriter::PostWriter(const std::filesystem::path& file)
    : out_(file, std::ios::binary | std::ios::trunc), path_(file) {
    if (!out_)
        throw InputError("cannot create post store: " + file.string());
}

void PostWriter::write(const CleanPost& post) {
    out_ << post_to_json(post).dump() << '\n';
    if (!out_)
        throw InputError("failed writing post store: " + path_.string());
    ++written_;
}

void PostWriter::close() {
    out_.flush();
    if (!out_)
        throw InputError("failed writing post store: " + path_.string());
    out_.close();
}

PostReader::PostReader(const std::filesystem::path& file)
    : in_(file, std::ios::binary), path_(file) {
    if (!in_)
        throw InputError("cannot open post store: " + file.string());
}

std::optional<CleanPost> PostReader::next() {
    std::string line;
    if (!std::getline(in_, line))
        return std::nullopt;
    ++lineno_;
    try {
        return post_from_json(json::parse(line));
    } catch (const InputError& e) {
        throw InputError("post store " + path_.string() + " line " +
                         std::to_string(lineno_) + ": " + e.what());
    } catch (const json::exception& e) {
        throw InputError("post store " + path_.string() + " line " +
                         std::to_string(lineno_) + ": " + e.what());
    }
}

void store_posts(const std::vector<CleanPost>& posts,
                 const std::filesystem::path& file) {
    PostWriter writer(file);
    for (const CleanPost& post : posts)
        writer.write(post);
    writer.close();
}

std::vector<CleanPost> load_posts(const std::filesystem::path& file) {
    PostReader reader(file);
    std::vector<CleanPost> posts;
    while (auto post = reader.next())
        posts.push_back(std::move(*post));
    return posts;
}

IngestSummary ingest_dump(std::istream& dump, PostWriter& out,
                          const IngestOptions& options) {
    DumpRowReader reader(dump);
    return options.spill ? ingest_spilled(reader, out, options)
                         : ingest_in_memory(reader, out);
}

} // namespace postrec
