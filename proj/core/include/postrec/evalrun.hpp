#pragma once

#include "postrec/index.hpp"
#include "postrec/metrics.hpp"
#include "postrec/query.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace postrec {

// A named flag bundle for one evaluation arm.
struct Configuration {
    std::string id;
    ConfigFlags flags;
};

// The cumulative ladder the evaluation defaults to. Each step turns on one
// more stage: flat queries, wrapping, idf-weighted scoring, import mining,
// import tokenizing, entropy boosts.
std::vector<Configuration> default_configurations();

// JSON array of {"id": ..., "wrapping": ..., "import_mining": ...,
// "entropy": ..., "tokenizing": ..., "scorer_mode": ...}; absent flags stay
// false, unknown keys are rejected.
std::vector<Configuration> configurations_from_json(const std::string& text);
std::vector<Configuration> load_configurations(
    const std::filesystem::path& file);

struct QuerySpec {
    std::string id;     // file stem, doubles as the label key
    std::string source; // Java context
};

// All *.java files of a directory, name order, ids = stems. An unreadable
// file aborts the load unless errors is given, in which case it is recorded
// as (stem, message) and skipped so the run can continue.
std::vector<QuerySpec> load_query_dir(
    const std::filesystem::path& dir,
    std::vector<std::pair<std::string, std::string>>* errors = nullptr);

struct ResultRecord {
    std::string query_id;
    int rank = 0;
    std::int64_t post_id = 0;
    double score = 0.0;
    std::string title;
};

struct RunOutput {
    std::string config_id;
    std::vector<std::string> query_ids; // every query attempted, input order
    std::vector<ResultRecord> records;
    // queries that produced no clauses (or no hits), with a reason
    std::vector<std::pair<std::string, std::string>> warnings;
};

// Builds each distinct (wrapping, import_mining) index once and shares it
// across configurations. k1/b and the analyzer come from the base options;
// each arm's scorer mode is applied at query time.
class IndexCache {
public:
    IndexCache(std::span<const CleanPost> posts, const CanonicalTable* table,
               const ScoringParams& base, const AnalyzerOptions& analyzer,
               int jobs);
    const Index& get(bool wrapping, bool import_mining);
    std::size_t built_count() const { return cache_.size(); }

private:
    std::span<const CleanPost> posts_;
    const CanonicalTable* table_;
    ScoringParams base_;
    AnalyzerOptions analyzer_;
    int jobs_;
    std::map<std::pair<bool, bool>, std::unique_ptr<Index>> cache_;
};

RunOutput run_configuration(const Configuration& config,
                            std::span<const QuerySpec> queries,
                            IndexCache& cache, int top_n,
                            const ImportTokenizeOptions& tokenize = {});

// One JSON object per record: {query_id, rank, post_id, score, title}.
void write_results(const RunOutput& run, const std::filesystem::path& file);

// Slot scores for every attempted query, zero-filled below top_n. A returned
// pair absent from the labels raises ValidationError listing the pairs.
QuerySlotScores slot_scores(const RunOutput& run, const LabelSet& labels,
                            int top_n);

struct SystemMetrics {
    std::array<std::uint64_t, 5> histogram{};
    double precision = 0.0;
    double success = 0.0;
};

SystemMetrics compute_metrics(const QuerySlotScores& slots, int top_n);

struct PairwiseStats {
    std::string a, b;
    double p_confidence = 1.0;
    double p_precision = 1.0;
    double p_success = 1.0;
};

// Rank-sum comparisons of the two runs' per-slot confidences, per-query
// precisions, and per-query successes.
PairwiseStats compare_runs(const std::string& a_id, const QuerySlotScores& a,
                           const std::string& b_id, const QuerySlotScores& b,
                           int top_n);

} // namespace postrec
