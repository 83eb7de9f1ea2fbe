#ifndef STABSIM_MONTE_CARLO_HPP
#define STABSIM_MONTE_CARLO_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "validation.hpp"

namespace stabsim {

/// Worker count from STABSIM_THREADS, else the hardware concurrency.
inline unsigned default_threads() {
    if (const char* env = std::getenv("STABSIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `fn(RandomStream(seed, r))` for r = 0..replicates-1 and stores each
/// returned row. Row r depends only on (seed, r), so the matrix is the same
/// for any thread count.
template <class Fn>
PathMatrix run_replicates(std::size_t replicates, std::size_t cols, std::uint64_t seed, Fn&& fn,
                          unsigned threads = default_threads()) {
    PathMatrix out(replicates, cols);
    auto work = [&](std::size_t r) {
        const auto row = fn(RandomStream(seed, r));
        if (row.size() != cols) throw ShapeError("replicate returned " + std::to_string(row.size()) + " values");
        std::copy(row.begin(), row.end(), out.row(r).begin());
    };
    threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(1, replicates)));
    if (threads == 1) {
        for (std::size_t r = 0; r < replicates; ++r) work(r);
        return out;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t r = w; r < replicates; r += threads) work(r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

} // namespace stabsim

#endif // STABSIM_MONTE_CARLO_HPP
