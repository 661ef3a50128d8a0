#include "postrec/evalrun.hpp"

#include "postrec/errors.hpp"
#include "postrec/wilcoxon.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace postrec {

namespace {

using nlohmann::json;

ConfigFlags flags_with(bool wrapping, bool import_mining, bool entropy,
                       bool tokenizing, ScorerMode mode) {
    ConfigFlags f;
    f.wrapping = wrapping;
    f.import_mining = import_mining;
    f.entropy = entropy;
    f.tokenizing = tokenizing;
    f.scorer_mode = mode;
    return f;
}

} // namespace

std::vector<Configuration> default_configurations() {
    std::vector<Configuration> out;
    out.push_back({"A", flags_with(false, false, false, false,
                                   ScorerMode::tf_saturation)});
    out.push_back({"B", flags_with(true, false, false, false,
                                   ScorerMode::tf_saturation)});
    out.push_back({"C", flags_with(true, false, false, false,
                                   ScorerMode::standard)});
    out.push_back({"D", flags_with(true, true, false, false,
                                   ScorerMode::standard)});
    out.push_back({"E", flags_with(true, true, false, true,
                                   ScorerMode::standard)});
    out.push_back({"F", flags_with(true, true, true, true,
                                   ScorerMode::standard)});
    return out;
}

std::vector<Configuration> configurations_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("bad configuration json: ") + e.what());
    }
    if (!doc.is_array())
        throw InputError("configuration json must be an array");
    static const std::set<std::string> known = {
        "id", "wrapping", "import_mining", "entropy", "tokenizing",
        "scorer_mode"};
    std::vector<Configuration> out;
    std::set<std::string> seen_ids;
    for (const auto& item : doc) {
        if (!item.is_object())
            throw InputError("configuration entries must be objects");
        Configuration config;
        for (const auto& [key, value] : item.items()) {
            if (!known.count(key))
                throw InputError("unknown configuration key '" + key + "'");
            if (key == "id") {
                if (!value.is_string())
                    throw InputError("configuration id must be a string");
                config.id = value.get<std::string>();
            } else if (key == "scorer_mode") {
                if (!value.is_string())
                    throw InputError("scorer_mode must be a string");
                auto mode = parse_scorer_mode(value.get<std::string>());
                if (!mode)
                    throw InputError("unknown scorer mode '" +
                                     value.get<std::string>() + "'");
                config.flags.scorer_mode = *mode;
            } else {
                if (!value.is_boolean())
                    throw InputError("configuration flag '" + key +
                                     "' must be a boolean");
                bool on = value.get<bool>();
                if (key == "wrapping")
                    config.flags.wrapping = on;
                else if (key == "import_mining")
                    config.flags.import_mining = on;
                else if (key == "entropy")
                    config.flags.entropy = on;
                else
                    config.flags.tokenizing = on;
            }
        }
        if (config.id.empty())
            throw InputError("configuration entry without an id");
        if (!seen_ids.insert(config.id).second)
            throw InputError("duplicate configuration id '" + config.id +
                             "'");
        out.push_back(std::move(config));
    }
    if (out.empty())
        throw InputError("configuration json lists no configurations");
    return out;
}

std::vector<Configuration> load_configurations(
    const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw InputError("cannot open configuration file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return configurations_from_json(buf.str());
    } catch (const InputError& e) {
        throw InputError(file.string() + ": " + e.what());
    }
}

std::vector<QuerySpec> load_query_dir(
    const std::filesystem::path& dir,
    std::vector<std::pair<std::string, std::string>>* errors) {
    if (!std::filesystem::is_directory(dir))
        throw InputError("query directory " + dir.string() + " not found");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".java")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw InputError("query directory " + dir.string() +
                         " holds no .java files");
    std::vector<QuerySpec> out;
    out.reserve(files.size());
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            if (!errors)
                throw InputError("cannot open query file " + path.string());
            errors->emplace_back(path.stem().string(),
                                 "cannot open " + path.string());
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        out.push_back({path.stem().string(), buf.str()});
    }
    return out;
}

IndexCache::IndexCache(std::span<const CleanPost> posts,
                       const CanonicalTable* table, const ScoringParams& base,
                       const AnalyzerOptions& analyzer, int jobs)
    : posts_(posts), table_(table), base_(base), analyzer_(analyzer),
      jobs_(jobs) {}

const Index& IndexCache::get(bool wrapping, bool import_mining) {
    auto key = std::make_pair(wrapping, import_mining);
    auto it = cache_.find(key);
    if (it != cache_.end())
        return *it->second;
    BuildOptions options;
    options.wrapping = wrapping;
    options.import_mining = import_mining;
    options.scoring = base_;
    options.analyzer = analyzer_;
    options.jobs = jobs_;
    auto index = std::make_unique<Index>(
        build_index(posts_, import_mining ? table_ : nullptr, options));
    auto [pos, inserted] = cache_.emplace(key, std::move(index));
    (void)inserted;
    return *pos->second;
}

RunOutput run_configuration(const Configuration& config,
                            std::span<const QuerySpec> queries,
                            IndexCache& cache, int top_n,
                            const ImportTokenizeOptions& tokenize) {
    if (top_n < 1)
        throw ValidationError("top_n must be at least 1");
    const Index& index =
        cache.get(config.flags.wrapping, config.flags.import_mining);
    ScoringParams params = index.params();
    params.mode = config.flags.scorer_mode;

    RunOutput out;
    out.config_id = config.id;
    for (const auto& spec : queries) {
        out.query_ids.push_back(spec.id);
        Query query = build_query(spec.source, config.flags, tokenize);
        if (query.empty()) {
            out.warnings.emplace_back(spec.id, "query produced no clauses");
            continue;
        }
        auto hits =
            search(index, query, static_cast<std::size_t>(top_n), params);
        if (hits.empty()) {
            out.warnings.emplace_back(spec.id, "no matching posts");
            continue;
        }
        int rank = 1;
        for (const auto& hit : hits) {
            out.records.push_back(
                {spec.id, rank, hit.doc_id, hit.score, hit.title});
            ++rank;
        }
    }
    return out;
}

void write_results(const RunOutput& run, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw InputError("cannot open " + file.string() + " for writing");
    for (const auto& record : run.records) {
        json row;
        row["query_id"] = record.query_id;
        row["rank"] = record.rank;
        row["post_id"] = record.post_id;
        row["score"] = record.score;
        row["title"] = record.title;
        out << row.dump() << '\n';
    }
    if (!out)
        throw InputError("failed writing " + file.string());
}

QuerySlotScores slot_scores(const RunOutput& run, const LabelSet& labels,
                            int top_n) {
    if (top_n < 1)
        throw ValidationError("top_n must be at least 1");
    QuerySlotScores slots;
    for (const auto& id : run.query_ids)
        slots[id] = {};
    std::vector<std::string> missing;
    for (const auto& record : run.records) {
        auto score = labels.score_for(record.query_id, record.post_id);
        if (!score) {
            missing.push_back(record.query_id + "/" +
                              std::to_string(record.post_id));
            continue;
        }
        slots[record.query_id].push_back(*score);
    }
    if (!missing.empty()) {
        std::string joined;
        for (const auto& pair : missing) {
            if (!joined.empty())
                joined += ", ";
            joined += pair;
        }
        throw ValidationError("results missing labels: " + joined);
    }
    for (auto& [id, scores] : slots) {
        while (static_cast<int>(scores.size()) < top_n)
            scores.push_back(0);
    }
    return slots;
}

SystemMetrics compute_metrics(const QuerySlotScores& slots, int top_n) {
    SystemMetrics metrics;
    metrics.histogram = confidence_histogram(slots);
    metrics.precision = precision_at_n(slots, top_n);
    metrics.success = success_rate(slots);
    return metrics;
}

namespace {

std::vector<double> flatten_confidences(const QuerySlotScores& slots) {
    std::vector<double> out;
    for (const auto& [id, scores] : slots)
        for (int s : scores)
            out.push_back(static_cast<double>(s));
    return out;
}

std::vector<double> per_query_precision(const QuerySlotScores& slots,
                                        int top_n) {
    std::vector<double> out;
    for (const auto& [id, scores] : slots) {
        int relevant = 0;
        for (int s : scores)
            if (s >= kRelevantScore)
                ++relevant;
        out.push_back(static_cast<double>(relevant) / top_n);
    }
    return out;
}

std::vector<double> per_query_success(const QuerySlotScores& slots) {
    std::vector<double> out;
    for (const auto& [id, scores] : slots) {
        bool hit = std::any_of(scores.begin(), scores.end(),
                               [](int s) { return s >= kRelevantScore; });
        out.push_back(hit ? 1.0 : 0.0);
    }
    return out;
}

} // namespace

PairwiseStats compare_runs(const std::string& a_id, const QuerySlotScores& a,
                           const std::string& b_id, const QuerySlotScores& b,
                           int top_n) {
    PairwiseStats stats;
    stats.a = a_id;
    stats.b = b_id;
    stats.p_confidence =
        wilcoxon_rank_sum_p(flatten_confidences(a), flatten_confidences(b));
    stats.p_precision = wilcoxon_rank_sum_p(per_query_precision(a, top_n),
                                            per_query_precision(b, top_n));
    stats.p_success =
        wilcoxon_rank_sum_p(per_query_success(a), per_query_success(b));
    return stats;
}

} // namespace postrec
