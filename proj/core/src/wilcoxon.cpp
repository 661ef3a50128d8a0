#include "postrec/wilcoxon.hpp"

#include "postrec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace postrec {

namespace {

// Midranks of the pooled sample in its sorted order: a run of k equal values
// starting at 1-based rank r all receive r + (k-1)/2.
std::vector<double> midranks(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i])
            ++j;
        double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[k] = rank;
        i = j + 1;
    }
    return ranks;
}

double exact_p(const std::vector<double>& ranks, std::size_t na,
               double observed_dev) {
    const std::size_t n = ranks.size();
    // selector starts at the lexicographically smallest arrangement; each
    // next_permutation visits one distinct choice of na positions
    std::vector<char> pick(n, 0);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(na), 1);
    std::sort(pick.begin(), pick.end());

    const double mean =
        static_cast<double>(na) * static_cast<double>(n + 1) / 2.0;
    constexpr double kEps = 1e-9;
    std::uint64_t total = 0, extreme = 0;
    do {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pick[i])
                w += ranks[i];
        }
        ++total;
        if (std::abs(w - mean) >= observed_dev - kEps)
            ++extreme;
    } while (std::next_permutation(pick.begin(), pick.end()));
    return static_cast<double>(extreme) / static_cast<double>(total);
}

double approx_p(const std::vector<double>& sorted_pooled, std::size_t na,
                std::size_t nb, double observed_dev) {
    const double n = static_cast<double>(na + nb);
    // tie correction over runs of equal values
    double tie_sum = 0.0;
    std::size_t i = 0;
    const std::size_t total = sorted_pooled.size();
    while (i < total) {
        std::size_t j = i;
        while (j + 1 < total && sorted_pooled[j + 1] == sorted_pooled[i])
            ++j;
        double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    double variance = (static_cast<double>(na) * static_cast<double>(nb) / 12.0) *
                      ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (variance <= 0.0)
        return 1.0; // every pooled value equal, no evidence either way
    double z = (observed_dev - 0.5) / std::sqrt(variance);
    if (z < 0.0)
        z = 0.0;
    double p = std::erfc(z / std::sqrt(2.0));
    return std::min(p, 1.0);
}

} // namespace

double wilcoxon_rank_sum_p(std::span<const double> a,
                           std::span<const double> b) {
    if (a.empty() || b.empty())
        throw ValidationError("rank-sum test needs two non-empty samples");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;

    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(n);
    for (double v : a)
        pooled.emplace_back(v, 0);
    for (double v : b)
        pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = pooled[i].first;
    std::vector<double> ranks = midranks(values);

    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pooled[i].second == 0)
            w += ranks[i];
    }
    const double mean = static_cast<double>(na) * static_cast<double>(n + 1) / 2.0;
    const double observed_dev = std::abs(w - mean);

    if (n <= kWilcoxonExactLimit)
        return exact_p(ranks, na, observed_dev);
    return approx_p(values, na, nb, observed_dev);
}

} // namespace postrec
