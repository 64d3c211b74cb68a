#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace senscore {

// Pairwise (cascade) summation. All cost-style reductions go through this so
// results do not depend on chunking or thread count.
double pairwise_sum(std::span<const double> xs);

// splitmix64 step; also used as the seed/stream mixer.
std::uint64_t splitmix64(std::uint64_t& state);

// Derive an independent substream id from (seed, stream). Restarts, draws and
// ensemble members each own one of these, so parallel order cannot matter.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream);

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream);

// Counter-based uniforms in [0,1): value i of stream (seed, stream).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Empirical quantile with linear interpolation; q in [0,1]. Sorts a copy.
double quantile(std::vector<double> xs, double q);

// Runs fn(i) for i in [0, count) across at most `threads` workers. Work item i
// is independent of scheduling; callers merge by index.
void parallel_for_index(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace senscore
