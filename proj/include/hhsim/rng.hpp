#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hhsim/errors.hpp"

namespace hhsim {

// Simulation results must be bit-reproducible for a given seed, across
// platforms, across worker counts and across standard-library versions.
// std::mt19937 is portable but the std distributions are not, so both the
// generator and the samplers live here.

/// splitmix64, used to expand seeds into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over a string, used to key substreams by scope/stage names.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// xoshiro256++ engine (Blackman & Vigna), hand-rolled for portability.
class Xoshiro256pp {
public:
  Xoshiro256pp() : Xoshiro256pp(0) {}

  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

/// One independent random stream. Streams are derived, never split or
/// advanced into each other, so any execution order of sibling streams
/// yields identical draws.
class RngStream {
public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  /// Derive a stream keyed by (master seed, scope id, stage name, index).
  /// Used as: scope = municipality/prefecture id, stage = operation name,
  /// index = period number.
  static RngStream derive(std::uint64_t master, std::string_view scope,
                          std::string_view stage, std::uint64_t index = 0) {
    std::uint64_t s = master;
    s ^= fnv1a(scope) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    s ^= fnv1a(stage) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    s ^= (index + 1) * 0xd1342543de82ef95ULL;
    return RngStream(s);
  }

  std::uint64_t next_u64() { return eng_.next(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_.next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
  }

  /// Uniform integer in [0, n). Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw DomainError("RngStream::below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = eng_.next();
      if (r >= threshold) return r % n;
    }
  }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw DomainError("RngStream::uniform_int: empty range");
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Draw an index from a cumulative weight vector (last entry = total mass).
  /// Weights need not be normalized. Total mass must be positive.
  std::size_t sample_cumulative(std::span<const double> cum) {
    if (cum.empty() || cum.back() <= 0.0)
      throw DomainError("RngStream::sample_cumulative: no mass");
    const double u = uniform01() * cum.back();
    std::size_t lo = 0, hi = cum.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cum[mid] > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

private:
  Xoshiro256pp eng_;
};

/// Fenwick (binary indexed) tree over nonnegative weights; supports
/// weighted sampling without replacement in O(log n) per draw.
class FenwickSampler {
public:
  explicit FenwickSampler(std::span<const double> weights)
      : n_(weights.size()), tree_(weights.size() + 1, 0.0), weight_(weights.begin(), weights.end()) {
    for (std::size_t i = 0; i < n_; ++i) tree_[i + 1] = weights[i];
    for (std::size_t i = 1; i <= n_; ++i) {
      const std::size_t j = i + (i & (0 - i));
      if (j <= n_) tree_[j] += tree_[i];
    }
    total_ = prefix(n_);
  }

  double total() const { return total_; }
  std::size_t size() const { return n_; }
  double weight(std::size_t i) const { return weight_[i]; }

  /// Set weight of element i to zero (removal).
  void remove(std::size_t i) { adjust(i, -weight_[i]); }

  void adjust(std::size_t i, double delta) {
    weight_[i] += delta;
    total_ += delta;
    for (std::size_t j = i + 1; j <= n_; j += j & (0 - j)) tree_[j] += delta;
  }

  /// Draw an element with probability proportional to its weight.
  /// Caller must check total() > 0 first.
  std::size_t draw(RngStream& rng) const {
    double u = rng.uniform01() * total_;
    std::size_t pos = 0;
    std::size_t bit = std::bit_floor(n_);
    while (bit != 0) {
      const std::size_t next = pos + bit;
      if (next <= n_ && tree_[next] < u) {
        u -= tree_[next];
        pos = next;
      }
      bit >>= 1;
    }
    // pos is the count of elements with cumulative weight below u
    return pos < n_ ? pos : n_ - 1;
  }

private:
  double prefix(std::size_t i) const {
    double s = 0.0;
    for (; i > 0; i -= i & (0 - i)) s += tree_[i];
    return s;
  }

  std::size_t n_;
  std::vector<double> tree_;
  std::vector<double> weight_;
  double total_ = 0.0;
};

}  // namespace hhsim
