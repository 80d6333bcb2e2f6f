#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace thors {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` under `master`; the same pair always gives the
/// same seed, independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Results must be written to per-index slots. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

} // namespace thors
