#include "senscore/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace senscore {

namespace {

double pairwise_sum_impl(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum_impl(xs.first(half)) + pairwise_sum_impl(xs.subspan(half));
}

}  // namespace

double pairwise_sum(std::span<const double> xs) { return pairwise_sum_impl(xs); }

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  splitmix64(s);
  return splitmix64(s);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(derive_stream(seed, stream));
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t s = derive_stream(seed, stream) ^ (counter * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  const std::uint64_t bits = splitmix64(s);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

void parallel_for_index(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, threads);
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += n_threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace senscore
