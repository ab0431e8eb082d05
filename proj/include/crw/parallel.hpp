#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "crw/estimate_series.hpp"

namespace crw {

/// Replicas are grouped into blocks of this size regardless of thread count;
/// blocks are merged in index order so results do not depend on scheduling.
inline constexpr std::uint64_t kReplicaBlock = 256;

/// Thread count from CRW_THREADS, else hardware concurrency (at least 1).
unsigned default_threads();

/// Observation vector for one replica (one value per grid time).
using ReplicaFn = std::function<std::vector<double>(std::uint64_t replica)>;

/// Runs `replicas` independent replicas over `threads` workers and merges
/// their observations in replica-index order.
EstimateSeries run_replicas(const std::vector<double>& grid, std::uint64_t replicas, unsigned threads,
                            const ReplicaFn& fn);

/// Calls fn(i) for i in [0, count) across `threads` workers.
void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& fn);

}  // namespace crw
