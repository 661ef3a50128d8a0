#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace postrec {

// One human judgment of a (query, recommended post) pair. Scores run 0..4,
// where 3 and 4 count as relevant.
struct EvalLabel {
    std::string query_id;
    std::int64_t post_id = 0;
    int rank = 0;  // position the pair was judged at, 1-based
    int score = 0;
    bool operator==(const EvalLabel&) const = default;
};

inline constexpr int kRelevantScore = 3;

// CSV with header `query_id,post_id,rank,score`. Raises InputError for
// malformed rows and ValidationError for out-of-range scores or duplicate
// (query_id, post_id) pairs.
std::vector<EvalLabel> load_labels(const std::filesystem::path& file);

// Label lookup keyed by (query_id, post_id) so the same judgments apply to
// every configuration regardless of where each pair ranks.
class LabelSet {
public:
    LabelSet() = default;
    explicit LabelSet(std::vector<EvalLabel> labels);

    std::optional<int> score_for(const std::string& query_id,
                                 std::int64_t post_id) const;
    std::size_t size() const { return scores_.size(); }

private:
    std::map<std::pair<std::string, std::int64_t>, int> scores_;
};

// Scores of each query's top-n slots, zero-filled where nothing was
// returned. The unit metrics and comparisons are computed from.
using QuerySlotScores = std::map<std::string, std::vector<int>>;

// Fraction of queries with at least one relevant slot. Empty input raises
// ValidationError; rates over nothing mean nothing.
double success_rate(const QuerySlotScores& slots);

// Relevant slots over all slots (top_n per query).
double precision_at_n(const QuerySlotScores& slots, int top_n);

// How many slots carry each score 0..4.
std::array<std::uint64_t, 5> confidence_histogram(const QuerySlotScores& slots);

} // namespace postrec
