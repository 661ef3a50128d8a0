#include "postrec/analyzer.hpp"
#include "postrec/canonical.hpp"
#include "postrec/errors.hpp"
#include "postrec/evalrun.hpp"
#include "postrec/fields.hpp"
#include "postrec/index.hpp"
#include "postrec/metrics.hpp"
#include "postrec/posts.hpp"
#include "postrec/query.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace postrec;
using nlohmann::json;

// Merged view of the config file and command line; unset fields fall back to
// per-command defaults at use time.
struct RunConfig {
    std::optional<std::string> dump, store, index_dir, table, labels, queries,
        out, configs, spill_dir;
    std::optional<bool> wrapping, import_mining, entropy, tokenizing, stemming,
        spill;
    std::optional<ScorerMode> scorer_mode;
    std::optional<double> k1, b;
    std::optional<int> top_n, shards, jobs;
    std::optional<long long> seed;
    std::optional<std::vector<std::string>> tld_segments, generic_segments;
};

std::string as_string(const std::string& key, const json& value) {
    if (!value.is_string())
        throw InputError("config key '" + key + "' must be a string");
    return value.get<std::string>();
}

bool as_bool(const std::string& key, const json& value) {
    if (!value.is_boolean())
        throw InputError("config key '" + key + "' must be a boolean");
    return value.get<bool>();
}

double as_double(const std::string& key, const json& value) {
    if (!value.is_number())
        throw InputError("config key '" + key + "' must be a number");
    return value.get<double>();
}

long long as_int(const std::string& key, const json& value) {
    if (!value.is_number_integer())
        throw InputError("config key '" + key + "' must be an integer");
    return value.get<long long>();
}

std::vector<std::string> as_string_list(const std::string& key,
                                        const json& value) {
    if (!value.is_array())
        throw InputError("config key '" + key + "' must be a string array");
    std::vector<std::string> out;
    for (const auto& item : value)
        out.push_back(as_string(key, item));
    return out;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw InputError("cannot open config file " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(file.string() + ": " + e.what());
    }
    if (!doc.is_object())
        throw InputError(file.string() + ": config must be a json object");
    RunConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        if (key == "dump")
            cfg.dump = as_string(key, value);
        else if (key == "store")
            cfg.store = as_string(key, value);
        else if (key == "index_dir")
            cfg.index_dir = as_string(key, value);
        else if (key == "table")
            cfg.table = as_string(key, value);
        else if (key == "labels")
            cfg.labels = as_string(key, value);
        else if (key == "queries")
            cfg.queries = as_string(key, value);
        else if (key == "out")
            cfg.out = as_string(key, value);
        else if (key == "configs")
            cfg.configs = as_string(key, value);
        else if (key == "spill_dir")
            cfg.spill_dir = as_string(key, value);
        else if (key == "wrapping")
            cfg.wrapping = as_bool(key, value);
        else if (key == "import_mining")
            cfg.import_mining = as_bool(key, value);
        else if (key == "entropy")
            cfg.entropy = as_bool(key, value);
        else if (key == "tokenizing")
            cfg.tokenizing = as_bool(key, value);
        else if (key == "stemming")
            cfg.stemming = as_bool(key, value);
        else if (key == "spill")
            cfg.spill = as_bool(key, value);
        else if (key == "scorer_mode") {
            auto mode = parse_scorer_mode(as_string(key, value));
            if (!mode)
                throw InputError(file.string() + ": unknown scorer mode '" +
                                 as_string(key, value) + "'");
            cfg.scorer_mode = *mode;
        }
        else if (key == "k1")
            cfg.k1 = as_double(key, value);
        else if (key == "b")
            cfg.b = as_double(key, value);
        else if (key == "top_n")
            cfg.top_n = static_cast<int>(as_int(key, value));
        else if (key == "shards")
            cfg.shards = static_cast<int>(as_int(key, value));
        else if (key == "jobs")
            cfg.jobs = static_cast<int>(as_int(key, value));
        else if (key == "seed")
            cfg.seed = as_int(key, value);
        else if (key == "tld_segments")
            cfg.tld_segments = as_string_list(key, value);
        else if (key == "generic_segments")
            cfg.generic_segments = as_string_list(key, value);
        else
            throw InputError(file.string() + ": unknown config key '" + key +
                             "'");
    }
    return cfg;
}

// The resolved configuration a run actually used, echoed for provenance.
json effective_config_json(const RunConfig& cfg) {
    json out;
    auto put_path = [&](const char* key,
                        const std::optional<std::string>& value) {
        if (value)
            out[key] = *value;
    };
    put_path("dump", cfg.dump);
    put_path("store", cfg.store);
    put_path("index_dir", cfg.index_dir);
    put_path("table", cfg.table);
    put_path("labels", cfg.labels);
    put_path("queries", cfg.queries);
    put_path("out", cfg.out);
    put_path("configs", cfg.configs);
    put_path("spill_dir", cfg.spill_dir);
    out["wrapping"] = cfg.wrapping.value_or(false);
    out["import_mining"] = cfg.import_mining.value_or(false);
    out["entropy"] = cfg.entropy.value_or(false);
    out["tokenizing"] = cfg.tokenizing.value_or(false);
    out["stemming"] = cfg.stemming.value_or(false);
    out["spill"] = cfg.spill.value_or(false);
    if (cfg.scorer_mode)
        out["scorer_mode"] = std::string(scorer_mode_name(*cfg.scorer_mode));
    out["k1"] = cfg.k1.value_or(2.0);
    out["b"] = cfg.b.value_or(0.75);
    out["top_n"] = cfg.top_n.value_or(5);
    if (cfg.shards)
        out["shards"] = *cfg.shards;
    out["jobs"] = cfg.jobs.value_or(1);
    out["seed"] = cfg.seed.value_or(0);
    if (cfg.tld_segments)
        out["tld_segments"] = *cfg.tld_segments;
    if (cfg.generic_segments)
        out["generic_segments"] = *cfg.generic_segments;
    return out;
}

ImportTokenizeOptions tokenize_options(const RunConfig& cfg) {
    ImportTokenizeOptions opts;
    if (cfg.tld_segments)
        opts.tld_segments = std::set<std::string>(cfg.tld_segments->begin(),
                                                  cfg.tld_segments->end());
    if (cfg.generic_segments)
        opts.generic_segments = std::set<std::string>(
            cfg.generic_segments->begin(), cfg.generic_segments->end());
    return opts;
}

std::string read_file(const std::filesystem::path& path,
                      const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError(std::string("cannot open ") + what + " " +
                         path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string version_string() {
    char buf[64];
    std::snprintf(buf, sizeof buf, "postrec 0.1.0 (index format %d)",
                  kIndexFormatVersion);
    return buf;
}

// Option holders per subcommand. CLI values override config-file values only
// when the flag was actually passed, tracked through the option pointers.
struct CommonArgs {
    std::string config_file;
    int jobs = 1;
    long long seed = 0;
    CLI::Option* jobs_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* config_opt = nullptr;

    void wire(CLI::App* sub) {
        config_opt = sub->add_option("--config", config_file,
                                     "run configuration json file");
        jobs_opt = sub->add_option("--jobs", jobs, "worker thread cap");
        seed_opt = sub->add_option(
            "--seed", seed, "reserved; the pipeline is deterministic");
    }

    RunConfig load() const {
        RunConfig cfg;
        if (config_opt->count())
            cfg = load_run_config(config_file);
        if (jobs_opt->count())
            cfg.jobs = jobs;
        if (seed_opt->count())
            cfg.seed = seed;
        return cfg;
    }
};

struct FlagArgs {
    bool wrapping = false;
    bool import_mining = false;
    bool entropy = false;
    bool tokenizing = false;
    std::string scorer;
    double k1 = 2.0;
    double b = 0.75;
    bool stemming = false;
    CLI::Option* wrapping_opt = nullptr;
    CLI::Option* import_mining_opt = nullptr;
    CLI::Option* entropy_opt = nullptr;
    CLI::Option* tokenizing_opt = nullptr;
    CLI::Option* scorer_opt = nullptr;
    CLI::Option* k1_opt = nullptr;
    CLI::Option* b_opt = nullptr;
    CLI::Option* stemming_opt = nullptr;

    void wire(CLI::App* sub, bool query_side) {
        wrapping_opt = sub->add_flag("--wrapping,!--no-wrapping", wrapping,
                                     "repair incomplete snippets");
        import_mining_opt =
            sub->add_flag("--import-mining,!--no-import-mining", import_mining,
                          "deduce missing imports while indexing");
        if (query_side) {
            entropy_opt = sub->add_flag("--entropy,!--no-entropy", entropy,
                                        "entropy quartile boosts");
            tokenizing_opt =
                sub->add_flag("--tokenizing,!--no-tokenizing", tokenizing,
                              "textual clauses from import names");
        }
        scorer_opt = sub->add_option(
            "--scorer", scorer, "scorer mode: standard or tf_saturation");
        k1_opt = sub->add_option("--k1", k1, "BM25 k1");
        b_opt = sub->add_option("--b", b, "BM25 length normalization");
        stemming_opt = sub->add_flag("--stemming,!--no-stemming", stemming,
                                     "light plural folding in the analyzer");
    }

    void apply(RunConfig& cfg) const {
        if (wrapping_opt->count())
            cfg.wrapping = wrapping;
        if (import_mining_opt->count())
            cfg.import_mining = import_mining;
        if (entropy_opt && entropy_opt->count())
            cfg.entropy = entropy;
        if (tokenizing_opt && tokenizing_opt->count())
            cfg.tokenizing = tokenizing;
        if (scorer_opt->count()) {
            auto mode = parse_scorer_mode(scorer);
            if (!mode)
                throw InputError("unknown scorer mode '" + scorer + "'");
            cfg.scorer_mode = *mode;
        }
        if (k1_opt->count())
            cfg.k1 = k1;
        if (b_opt->count())
            cfg.b = b;
        if (stemming_opt->count())
            cfg.stemming = stemming;
    }
};

struct IngestArgs {
    CommonArgs common;
    std::string dump, out, spill_dir;
    bool spill = false;
    int shards = 0;
    CLI::Option* dump_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* spill_opt = nullptr;
    CLI::Option* spill_dir_opt = nullptr;
    CLI::Option* shards_opt = nullptr;
};

struct IndexArgs {
    CommonArgs common;
    FlagArgs flags;
    std::string store, out, table;
    CLI::Option* store_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* table_opt = nullptr;
};

struct QueryArgs {
    CommonArgs common;
    FlagArgs flags;
    std::string context, index_dir;
    int top_n = 5;
    bool explain = false;
    CLI::Option* context_opt = nullptr;
    CLI::Option* index_opt = nullptr;
    CLI::Option* top_n_opt = nullptr;
};

struct EvalArgs {
    CommonArgs common;
    FlagArgs flags;
    std::string store, table, queries, labels, configs, out;
    int top_n = 5;
    CLI::Option* store_opt = nullptr;
    CLI::Option* table_opt = nullptr;
    CLI::Option* queries_opt = nullptr;
    CLI::Option* labels_opt = nullptr;
    CLI::Option* configs_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* top_n_opt = nullptr;
};

int cmd_ingest(const IngestArgs& args) {
    RunConfig cfg = args.common.load();
    if (args.dump_opt->count())
        cfg.dump = args.dump;
    if (args.out_opt->count())
        cfg.store = args.out;
    if (args.spill_opt->count())
        cfg.spill = args.spill;
    if (args.spill_dir_opt->count())
        cfg.spill_dir = args.spill_dir;
    if (args.shards_opt->count())
        cfg.shards = args.shards;

    if (!cfg.dump)
        throw InputError("no dump file given");
    if (!cfg.store)
        throw InputError("no output store given (--out)");

    std::filesystem::path dump_path = *cfg.dump;
    std::ifstream in(dump_path, std::ios::binary);
    if (!in)
        throw InputError("cannot open dump " + dump_path.string());

    IngestOptions options;
    options.spill = cfg.spill.value_or(false);
    options.shards = cfg.shards.value_or(0);
    std::error_code ec;
    auto size = std::filesystem::file_size(dump_path, ec);
    if (!ec)
        options.dump_bytes_hint = size;

    bool temp_spill = false;
    if (options.spill) {
        if (cfg.spill_dir) {
            options.spill_dir = *cfg.spill_dir;
        } else {
            options.spill_dir = *cfg.store + ".spill";
            temp_spill = true;
        }
        std::filesystem::create_directories(options.spill_dir);
    }

    PostWriter writer(*cfg.store);
    IngestSummary summary = ingest_dump(in, writer, options);
    writer.close();
    if (temp_spill)
        std::filesystem::remove_all(options.spill_dir, ec);

    std::cerr << "kept " << summary.kept << " / " << summary.questions
              << " questions\n";

    json out;
    out["rows"] = summary.rows.rows;
    out["yielded"] = summary.rows.yielded;
    out["other_post_type"] = summary.rows.other_post_type;
    out["missing_attribute"] = summary.rows.missing_attribute;
    out["questions"] = summary.questions;
    out["kept"] = summary.kept;
    out["rejected"] = {{"no_accept", summary.rejected.no_accept},
                       {"no_code", summary.rejected.no_code},
                       {"no_java", summary.rejected.no_java}};
    out["store"] = *cfg.store;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_index(const IndexArgs& args) {
    RunConfig cfg = args.common.load();
    args.flags.apply(cfg);
    if (args.store_opt->count())
        cfg.store = args.store;
    if (args.out_opt->count())
        cfg.index_dir = args.out;
    if (args.table_opt->count())
        cfg.table = args.table;

    if (!cfg.store)
        throw InputError("no post store given");
    if (!cfg.index_dir)
        throw InputError("no index directory given (--out)");

    bool import_mining = cfg.import_mining.value_or(cfg.table.has_value());
    CanonicalTable table;
    if (import_mining) {
        if (!cfg.table)
            throw InputError("import mining needs a canonical table (--table)");
        table = CanonicalTable::load(*cfg.table);
    }

    BuildOptions options;
    options.wrapping = cfg.wrapping.value_or(true);
    options.import_mining = import_mining;
    options.scoring.k1 = cfg.k1.value_or(2.0);
    options.scoring.b = cfg.b.value_or(0.75);
    options.scoring.mode = cfg.scorer_mode.value_or(ScorerMode::standard);
    options.analyzer.stemming = cfg.stemming.value_or(false);
    options.jobs = cfg.jobs.value_or(1);

    std::vector<CleanPost> posts = load_posts(*cfg.store);
    Index index =
        build_index(posts, import_mining ? &table : nullptr, options);
    persist(index, *cfg.index_dir);

    std::size_t terms = 0;
    for (FieldId f : kAllFields)
        terms += index.field_postings(f).size();

    std::cerr << "indexed " << index.doc_count() << " documents (" << terms
              << " terms) into " << *cfg.index_dir << '\n';

    json out;
    out["documents"] = index.doc_count();
    out["fields"] = kFieldCount;
    out["terms"] = terms;
    out["index_dir"] = *cfg.index_dir;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_query(const QueryArgs& args) {
    RunConfig cfg = args.common.load();
    args.flags.apply(cfg);
    if (args.index_opt->count())
        cfg.index_dir = args.index_dir;
    if (args.top_n_opt->count())
        cfg.top_n = args.top_n;

    if (!args.context_opt->count())
        throw InputError("no context file given");
    if (!cfg.index_dir)
        throw InputError("no index directory given (--index)");
    int top_n = cfg.top_n.value_or(5);
    if (top_n < 1)
        throw ValidationError("top_n must be at least 1");

    Index index = open_index(*cfg.index_dir);
    std::string source = read_file(args.context, "context file");

    ConfigFlags flags;
    flags.wrapping = cfg.wrapping.value_or(false);
    flags.entropy = cfg.entropy.value_or(false);
    flags.tokenizing = cfg.tokenizing.value_or(false);
    Query query = build_query(source, flags, tokenize_options(cfg));

    json out;
    out["results"] = json::array();
    out["warnings"] = json::array();
    if (query.empty()) {
        out["warnings"].push_back("query produced no clauses");
        std::cout << out.dump(2) << '\n';
        return 0;
    }

    std::optional<ScoringParams> override_params;
    if (cfg.scorer_mode || cfg.k1 || cfg.b) {
        ScoringParams params = index.params();
        if (cfg.scorer_mode)
            params.mode = *cfg.scorer_mode;
        if (cfg.k1)
            params.k1 = *cfg.k1;
        if (cfg.b)
            params.b = *cfg.b;
        override_params = params;
    }

    auto hits = search(index, query, static_cast<std::size_t>(top_n),
                       override_params);
    int rank = 1;
    for (const auto& hit : hits) {
        out["results"].push_back({{"rank", rank},
                                  {"post_id", hit.doc_id},
                                  {"score", hit.score},
                                  {"title", hit.title}});
        ++rank;
    }
    if (hits.empty())
        out["warnings"].push_back("no matching posts");

    if (args.explain) {
        std::cerr << to_debug_text(query);
        if (!hits.empty()) {
            std::cerr << "top hit " << hits.front().doc_id << ":\n";
            for (const auto& part :
                 explain(index, query, hits.front().doc_id, override_params)) {
                if (part.score == 0.0)
                    continue;
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.6g", part.score);
                std::cerr << "  " << field_display_name(part.clause.field)
                          << ": " << part.clause.term << " = " << buf << '\n';
            }
        }
    }

    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_eval(const EvalArgs& args) {
    RunConfig cfg = args.common.load();
    args.flags.apply(cfg);
    if (args.store_opt->count())
        cfg.store = args.store;
    if (args.table_opt->count())
        cfg.table = args.table;
    if (args.queries_opt->count())
        cfg.queries = args.queries;
    if (args.labels_opt->count())
        cfg.labels = args.labels;
    if (args.configs_opt->count())
        cfg.configs = args.configs;
    if (args.out_opt->count())
        cfg.out = args.out;
    if (args.top_n_opt->count())
        cfg.top_n = args.top_n;

    if (!cfg.store)
        throw InputError("no post store given (--store)");
    if (!cfg.queries)
        throw InputError("no query directory given (--queries)");
    if (!cfg.labels)
        throw InputError("no labels file given (--labels)");
    if (!cfg.out)
        throw InputError("no output directory given (--out)");
    int top_n = cfg.top_n.value_or(5);
    if (top_n < 1)
        throw ValidationError("top_n must be at least 1");

    std::vector<Configuration> configurations =
        cfg.configs ? load_configurations(*cfg.configs)
                    : default_configurations();

    CanonicalTable table;
    bool have_table = false;
    if (cfg.table) {
        table = CanonicalTable::load(*cfg.table);
        have_table = true;
    }
    for (const auto& config : configurations) {
        if (config.flags.import_mining && !have_table)
            throw InputError("configuration " + config.id +
                             " needs a canonical table (--table)");
    }

    std::vector<CleanPost> posts = load_posts(*cfg.store);
    LabelSet labels(load_labels(*cfg.labels));

    std::vector<std::pair<std::string, std::string>> load_errors;
    std::vector<QuerySpec> queries =
        load_query_dir(*cfg.queries, &load_errors);

    ScoringParams base;
    base.k1 = cfg.k1.value_or(2.0);
    base.b = cfg.b.value_or(0.75);
    AnalyzerOptions analyzer;
    analyzer.stemming = cfg.stemming.value_or(false);
    IndexCache cache(posts, have_table ? &table : nullptr, base, analyzer,
                     cfg.jobs.value_or(1));
    ImportTokenizeOptions tokenize = tokenize_options(cfg);

    std::filesystem::path out_dir = *cfg.out;
    std::filesystem::create_directories(out_dir);

    json report;
    report["index_format_version"] = kIndexFormatVersion;
    report["config"] = effective_config_json(cfg);
    report["configurations"] = json::array();

    std::vector<std::pair<std::string, QuerySlotScores>> all_slots;
    for (const auto& config : configurations) {
        RunOutput run =
            run_configuration(config, queries, cache, top_n, tokenize);
        for (const auto& [id, message] : load_errors)
            run.warnings.emplace_back(id, message);

        std::string results_name = "results_" + config.id + ".jsonl";
        write_results(run, out_dir / results_name);

        QuerySlotScores slots = slot_scores(run, labels, top_n);
        SystemMetrics metrics = compute_metrics(slots, top_n);

        json entry;
        entry["id"] = config.id;
        entry["flags"] = {
            {"wrapping", config.flags.wrapping},
            {"import_mining", config.flags.import_mining},
            {"entropy", config.flags.entropy},
            {"tokenizing", config.flags.tokenizing},
            {"scorer_mode",
             std::string(scorer_mode_name(config.flags.scorer_mode))}};
        entry["histogram"] = metrics.histogram;
        entry["precision"] = metrics.precision;
        entry["success"] = metrics.success;
        entry["results_file"] = results_name;
        entry["warnings"] = json::array();
        for (const auto& [id, reason] : run.warnings)
            entry["warnings"].push_back(
                {{"query_id", id}, {"reason", reason}});
        report["configurations"].push_back(std::move(entry));

        std::cerr << "configuration " << config.id << ": "
                  << run.query_ids.size() << " queries, "
                  << run.records.size() << " records, precision "
                  << metrics.precision << ", success " << metrics.success
                  << '\n';

        all_slots.emplace_back(config.id, std::move(slots));
    }

    if (all_slots.size() > 1) {
        report["comparisons"] = json::array();
        for (std::size_t i = 0; i < all_slots.size(); ++i) {
            for (std::size_t j = i + 1; j < all_slots.size(); ++j) {
                PairwiseStats stats = compare_runs(
                    all_slots[i].first, all_slots[i].second,
                    all_slots[j].first, all_slots[j].second, top_n);
                report["comparisons"].push_back(
                    {{"a", stats.a},
                     {"b", stats.b},
                     {"p_confidence", stats.p_confidence},
                     {"p_precision", stats.p_precision},
                     {"p_success", stats.p_success}});
            }
        }
    }

    {
        std::ofstream tsv(out_dir / "confidence.tsv", std::ios::binary);
        if (!tsv)
            throw InputError("cannot open " +
                             (out_dir / "confidence.tsv").string() +
                             " for writing");
        tsv << "# config\tscore\tcount\n";
        for (const auto& entry : report["configurations"]) {
            const auto& histogram = entry["histogram"];
            for (std::size_t score = 0; score < histogram.size(); ++score)
                tsv << entry["id"].get<std::string>() << '\t' << score << '\t'
                    << histogram[score].get<std::uint64_t>() << '\n';
        }
    }

    {
        std::ofstream out(out_dir / "report.json", std::ios::binary);
        if (!out)
            throw InputError("cannot open " +
                             (out_dir / "report.json").string() +
                             " for writing");
        out << report.dump(2) << '\n';
    }

    std::cout << report.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"code-aware StackOverflow post recommender"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(0, 1);

    IngestArgs ingest_args;
    CLI::App* ingest_cmd = app.add_subcommand(
        "ingest", "filter a posts dump into a clean post store");
    ingest_args.common.wire(ingest_cmd);
    ingest_args.dump_opt = ingest_cmd->add_option(
        "dump", ingest_args.dump, "posts XML dump file");
    ingest_args.out_opt = ingest_cmd->add_option("--out", ingest_args.out,
                                                 "post store to write");
    ingest_args.spill_opt = ingest_cmd->add_flag(
        "--spill", ingest_args.spill,
        "group via on-disk shards instead of an in-memory map");
    ingest_args.spill_dir_opt = ingest_cmd->add_option(
        "--spill-dir", ingest_args.spill_dir, "directory for shard files");
    ingest_args.shards_opt = ingest_cmd->add_option(
        "--shards", ingest_args.shards, "shard count (0 = derive from size)");

    IndexArgs index_args;
    CLI::App* index_cmd =
        app.add_subcommand("index", "build and persist a fielded index");
    index_args.common.wire(index_cmd);
    index_args.flags.wire(index_cmd, false);
    index_args.store_opt =
        index_cmd->add_option("store", index_args.store, "post store file");
    index_args.out_opt = index_cmd->add_option("--out", index_args.out,
                                               "index directory to write");
    index_args.table_opt = index_cmd->add_option(
        "--table", index_args.table, "canonical class table (tsv)");

    QueryArgs query_args;
    CLI::App* query_cmd = app.add_subcommand(
        "query", "search an index with an in-progress source file");
    query_args.common.wire(query_cmd);
    query_args.flags.wire(query_cmd, true);
    query_args.context_opt = query_cmd->add_option(
        "context", query_args.context, "Java context file");
    query_args.index_opt = query_cmd->add_option(
        "--index", query_args.index_dir, "index directory");
    query_args.top_n_opt =
        query_cmd->add_option("--top-n", query_args.top_n, "results to return");
    query_cmd->add_flag("--explain", query_args.explain,
                        "print the query and top-hit score breakdown");

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand(
        "eval", "run the configuration matrix and compare the arms");
    eval_args.common.wire(eval_cmd);
    eval_args.flags.wire(eval_cmd, false);
    eval_args.store_opt =
        eval_cmd->add_option("--store", eval_args.store, "post store file");
    eval_args.table_opt = eval_cmd->add_option(
        "--table", eval_args.table, "canonical class table (tsv)");
    eval_args.queries_opt = eval_cmd->add_option(
        "--queries", eval_args.queries, "directory of .java query contexts");
    eval_args.labels_opt = eval_cmd->add_option(
        "--labels", eval_args.labels, "relevance labels csv");
    eval_args.configs_opt = eval_cmd->add_option(
        "--configs", eval_args.configs,
        "configuration matrix json (default: built-in A..F)");
    eval_args.out_opt = eval_cmd->add_option("--out", eval_args.out,
                                             "report directory to write");
    eval_args.top_n_opt =
        eval_cmd->add_option("--top-n", eval_args.top_n, "slots per query");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (ingest_cmd->parsed())
            return cmd_ingest(ingest_args);
        if (index_cmd->parsed())
            return cmd_index(index_args);
        if (query_cmd->parsed())
            return cmd_query(query_args);
        if (eval_cmd->parsed())
            return cmd_eval(eval_args);
        std::cerr << app.help();
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
