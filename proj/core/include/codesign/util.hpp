#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <string_view>
#include <thread>
#include <vector>

namespace codesign {

// splitmix64: cheap, well-distributed 64-bit mixer (Vigna 2015 public-domain variant).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Per-stage seed derivation: every random stream in the pipeline is keyed by
// the master seed and a stable stage tag, so one seed reproduces the full run.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stage) {
  return splitmix64(master ^ fnv1a64(stage));
}

// Deterministic counter-based RNG. Stateless draws keyed by (seed, index) keep
// results independent of evaluation order and thread scheduling.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

  // Uniform double in [0, 1) for draw number `index`.
  double uniform(std::uint64_t index) const {
    const std::uint64_t bits = splitmix64(seed_ ^ splitmix64(index));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  // Uniform double in [-1, 1).
  double symmetric(std::uint64_t index) const { return 2.0 * uniform(index) - 1.0; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t index, std::uint64_t n) const {
    return splitmix64(seed_ ^ splitmix64(index)) % n;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers. The callable writes
// into caller-owned indexed slots, so the later reduction is an ordered loop
// and results do not depend on scheduling. Exceptions are captured and the
// lowest-index one is rethrown after all workers join.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(n, threads <= 1 ? 1 : static_cast<std::size_t>(threads));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
}

}  // namespace codesign
