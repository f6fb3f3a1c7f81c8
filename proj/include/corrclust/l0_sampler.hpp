#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "corrclust/hash.hpp"

namespace corrclust {

namespace detail {

constexpr std::uint64_t kMersenne61 = (1ULL << 61) - 1;

inline std::uint64_t mod61(std::uint64_t x) {
  std::uint64_t r = (x & kMersenne61) + (x >> 61);
  return r >= kMersenne61 ? r - kMersenne61 : r;
}

inline std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
  return mod61(static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kMersenne61));
}

// Random-linear fingerprint coefficient for an index.
inline std::uint64_t fp_coeff(std::uint64_t fp_seed, std::uint64_t index) {
  std::uint64_t h = mix64(fp_seed, index + 1);
  std::uint64_t c = mod61(h);
  return c == 0 ? 1 : c;  // zero coefficients would hide indices
}

}  // namespace detail

/// Linear sketch returning a uniform element of a vector's support under
/// inserts and deletes, FAIL with probability at most delta.
///
/// Layout: `reps` independent repetitions, each with ~log2(domain) nested
/// subsampling levels (level l keeps index i when the multiply-shift hash of i
/// has l leading zero bits). Per level a one-sparse recovery triple is kept:
/// sum of deltas, sum of index*delta, and a random-linear fingerprint mod the
/// 61-bit Mersenne prime. The state is a linear function of the update stream.
class L0Sampler {
 public:
  L0Sampler(int domain, double delta, std::uint64_t seed)
      : L0Sampler(domain, delta, seed, mix64(seed, 0x5eedf00dULL)) {}

  // fp_seed may be shared across samplers over the same domain so callers can
  // precompute fingerprint coefficients once per update.
  L0Sampler(int domain, double delta, std::uint64_t seed, std::uint64_t fp_seed)
      : domain_(domain), fp_seed_(fp_seed) {
    if (domain < 0) throw std::invalid_argument("L0Sampler: negative domain");
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("L0Sampler: delta outside (0,1)");
    levels_ = 2;
    while ((1 << (levels_ - 2)) < std::max(domain, 1)) ++levels_;
    // Each repetition recovers with probability at least ~0.55; 0.45 is a
    // conservative per-rep failure bound that absorbs hash imperfection.
    reps_ = std::max(1, static_cast<int>(std::ceil(std::log(delta) / std::log(0.45))));
    state_.assign(static_cast<size_t>(reps_) * levels_ * 3, 0);
    hash_a_.resize(reps_);
    hash_b_.resize(reps_);
    for (int r = 0; r < reps_; ++r) {
      hash_a_[r] = mix64(seed, 2 * r + 1) | 1ULL;  // odd multiplier
      hash_b_[r] = mix64(seed, 2 * r + 2);
    }
  }

  void update(int index, int delta) {
    update_with_coeff(index, delta, detail::fp_coeff(fp_seed_, static_cast<std::uint64_t>(index)));
  }

  // Hot path: the fingerprint coefficient of `index` is supplied by the caller.
  void update_with_coeff(int index, int delta, std::uint64_t coeff) {
    if (delta != 1 && delta != -1) throw std::invalid_argument("L0Sampler: delta must be +-1");
    if (index < 0 || index >= domain_) throw std::invalid_argument("L0Sampler: index out of range");
    for (int r = 0; r < reps_; ++r) {
      std::uint64_t h = hash_a_[r] * static_cast<std::uint64_t>(index) + hash_b_[r];
      // Index lives at levels 0..z where z counts leading zero bits of h.
      int z = h == 0 ? 64 : __builtin_clzll(h);
      int top = std::min(z, levels_ - 1);
      for (int l = 0; l <= top; ++l) {
        std::int64_t* cell = cell_at(r, l);
        cell[0] += delta;
        cell[1] += static_cast<std::int64_t>(delta) * index;
        std::uint64_t f = static_cast<std::uint64_t>(cell[2]);
        f = delta > 0 ? detail::mod61(f + coeff)
                      : detail::mod61(f + detail::kMersenne61 - coeff);
        cell[2] = static_cast<std::int64_t>(f);
      }
    }
  }

  /// A uniformly random support index, or nullopt (FAIL). Deterministic given
  /// the current state.
  std::optional<int> sample() const {
    for (int r = 0; r < reps_; ++r)
      for (int l = 0; l < levels_; ++l) {
        const std::int64_t* cell = cell_at(r, l);
        if (cell[0] == 0) continue;
        if (cell[1] % cell[0] != 0) continue;
        std::int64_t idx = cell[1] / cell[0];
        if (idx < 0 || idx >= domain_) continue;
        std::uint64_t w_mod = cell[0] > 0
                                  ? detail::mod61(static_cast<std::uint64_t>(cell[0]))
                                  : detail::kMersenne61 -
                                        detail::mod61(static_cast<std::uint64_t>(-cell[0]));
        std::uint64_t expect = detail::mulmod61(
            detail::fp_coeff(fp_seed_, static_cast<std::uint64_t>(idx)), w_mod);
        if (static_cast<std::uint64_t>(cell[2]) != expect) continue;
        return static_cast<int>(idx);
      }
    return std::nullopt;
  }

  bool state_is_zero() const {
    for (auto v : state_)
      if (v != 0) return false;
    return true;
  }

  bool operator==(const L0Sampler& other) const {
    return state_ == other.state_ && hash_a_ == other.hash_a_ && hash_b_ == other.hash_b_ &&
           fp_seed_ == other.fp_seed_;
  }

  int levels() const { return levels_; }
  int reps() const { return reps_; }
  long long words() const {
    return static_cast<long long>(state_.size()) + 2 * reps_ + 2;
  }

 private:
  std::int64_t* cell_at(int r, int l) {
    return state_.data() + (static_cast<size_t>(r) * levels_ + l) * 3;
  }
  const std::int64_t* cell_at(int r, int l) const {
    return state_.data() + (static_cast<size_t>(r) * levels_ + l) * 3;
  }

  int domain_;
  int levels_;
  int reps_;
  std::uint64_t fp_seed_;
  std::vector<std::uint64_t> hash_a_, hash_b_;
  std::vector<std::int64_t> state_;
};

}  // namespace corrclust
