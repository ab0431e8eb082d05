#include "crw/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace crw {

unsigned default_threads() {
    if (const char* env = std::getenv("CRW_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& fn) {
    threads = std::max(1u, threads);
    if (threads == 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::jthread> pool;
    const auto n = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
    pool.reserve(n);
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

EstimateSeries run_replicas(const std::vector<double>& grid, std::uint64_t replicas, unsigned threads,
                            const ReplicaFn& fn) {
    const std::uint64_t blocks = (replicas + kReplicaBlock - 1) / kReplicaBlock;
    std::vector<EstimateSeries> partial(blocks, EstimateSeries(grid));
    parallel_for(blocks, threads, [&](std::uint64_t b) {
        const auto lo = b * kReplicaBlock;
        const auto hi = std::min(replicas, lo + kReplicaBlock);
        for (auto r = lo; r < hi; ++r) partial[b].push(fn(r));
    });
    EstimateSeries total(grid);
    for (const auto& p : partial) merge_into(total, p);
    return total;
}

}  // namespace crw
