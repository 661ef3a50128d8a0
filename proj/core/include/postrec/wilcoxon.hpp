#pragma once

#include <cstddef>
#include <span>

namespace postrec {

// Sample sizes up to this total get the exact permutation distribution;
// larger inputs use the tie-corrected normal approximation.
inline constexpr std::size_t kWilcoxonExactLimit = 20;

// Two-sided Wilcoxon rank-sum (Mann-Whitney) p-value for independent
// samples a and b. Ties share midranks. Exact mode counts, over all
// C(na+nb, na) assignments of the pooled ranks, how often the rank sum
// deviates from its mean at least as much as observed. Approximate mode
// applies a continuity correction of one half. Empty samples raise
// ValidationError.
double wilcoxon_rank_sum_p(std::span<const double> a,
                           std::span<const double> b);

} // namespace postrec
