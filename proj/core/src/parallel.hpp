#pragma once

#include <algorithm>
#include <future>
#include <vector>

namespace postrec::detail {

// Runs fn(i) for i in [0, n), fanned out over up to jobs threads. fn must be
// safe to call concurrently for distinct i; results should land in pre-sized
// slots so the output order stays deterministic.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers)
                fn(i);
        }));
    }
    for (auto& f : futures)
        f.get();
}

} // namespace postrec::detail
