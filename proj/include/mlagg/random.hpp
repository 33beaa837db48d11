#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace mlagg {

/// Counter-based random stream.
///
/// The n-th output is a fixed mixing function of (key, n), where the key is
/// derived from (seed, domain, stream id). Distinct stream ids give
/// independent streams, so each annotator can own one without its draws
/// depending on how many other annotators exist.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0, std::uint64_t domain = 0)
      : key_(mix(mix(seed ^ 0x6a09e667f3bcc908ULL) ^ mix(domain + 0x3c6ef372fe94f82bULL) ^
                 (stream_id * 0x9e3779b97f4a7c15ULL + 0xbb67ae8584caa73bULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    const double x = lo + (hi - lo) * uniform();
    return x < hi ? x : lo;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n), n > 0, without modulo bias.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  /// Derives an independent child stream.
  RandomStream split(std::uint64_t stream_id) const { return RandomStream(key_, stream_id, 1); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mlagg
