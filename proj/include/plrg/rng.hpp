#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

// Counter-based pseudo-randomness. Every draw is addressable as a pure
// function of (key, counter), so replicate r of experiment e produces the
// same bits no matter which thread runs it or in what order.

namespace plrg {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 output mixing (Steele, Lea & Flood 2014). Passes BigCrush when
// driven by a Weyl sequence, which is exactly how RngStream drives it.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Hashes a user seed plus up to three stream labels into a stream key.
// Distinct label tuples give statistically independent streams.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t s1 = 0,
                                std::uint64_t s2 = 0, std::uint64_t s3 = 0) {
  std::uint64_t k = mix64(seed ^ 0xA0761D6478BD642Full);
  k = mix64(k ^ mix64(s1 ^ 0xE7037ED1A0B428DBull));
  k = mix64(k ^ mix64(s2 ^ 0x8EBC6AF09C88C6E3ull));
  k = mix64(k ^ mix64(s3 ^ 0x589965CC75374CC3ull));
  return k;
}

// Cheap per-replicate key: one mix, good enough spacing for Monte Carlo
// replicates hanging off an already well-mixed base key.
inline constexpr std::uint64_t replicate_key(std::uint64_t base, std::uint64_t r) {
  return mix64(base + r * 0xD1B54A32D192ED03ull);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + (++ctr_) * kGolden); }

  // Uniform on (0, 1]. Never returns 0, so inverse-power transforms of the
  // tail variable stay finite.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on (lo, hi].
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

// Stateless pair-addressed uniform on (0, 1]: the draw for unordered pair
// (i, j) under `key`. Used for Bernoulli edge indicators so that edge (i, j)
// gets the same coin no matter when or where it is examined.
inline double pair_unit(std::uint64_t key, std::uint64_t i, std::uint64_t j) {
  if (i > j) std::swap(i, j);
  std::uint64_t h = mix64(key ^ mix64(i * 0x8CB92BA72F3D8DD7ull + 0x3C79AC492BA7B653ull));
  h = mix64(h ^ mix64(j * 0xCB24D0A5C88C35B3ull + 0x9FB21C651E98DF25ull));
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

// u^(-1/alpha) with hardware fast paths for the exponents the experiments
// use in bulk. pow() costs ~10x sqrt and dominates hot loops otherwise.
inline double inv_power(double u, double alpha) {
  if (alpha == 2.0) return 1.0 / std::sqrt(u);
  if (alpha == 1.0) return 1.0 / u;
  if (alpha == 4.0) return 1.0 / std::sqrt(std::sqrt(u));
  if (alpha == 1.5) return 1.0 / std::cbrt(u * u);
  if (alpha == 3.0) return 1.0 / std::cbrt(u);
  if (alpha == 0.5) return 1.0 / (u * u);
  return std::pow(u, -1.0 / alpha);
}

namespace detail {

// Inversion sampling of an integer law by enumerating outward from the mode:
// mode, mode-1, mode+1, mode-2, ... Accumulating pmf mass until it exceeds u
// is a valid inversion under this fixed enumeration order, consumes exactly
// one uniform, and takes O(sd) pmf evaluations in expectation.
template <class LogPmf>
std::uint64_t inversion_from_mode(std::uint64_t lo, std::uint64_t hi,
                                  std::uint64_t mode, LogPmf log_pmf, double u) {
  double acc = 0.0;
  std::uint64_t left = mode;
  std::uint64_t right = mode;
  bool left_open = true;
  bool right_open = true;
  std::uint64_t last = mode;

  acc += std::exp(log_pmf(mode));
  if (acc >= u) return mode;
  if (mode == lo) left_open = false;
  if (mode == hi) right_open = false;

  while (left_open || right_open) {
    if (left_open) {
      --left;
      last = left;
      acc += std::exp(log_pmf(left));
      if (acc >= u) return left;
      if (left == lo) left_open = false;
    }
    if (right_open) {
      ++right;
      last = right;
      acc += std::exp(log_pmf(right));
      if (acc >= u) return right;
      if (right == hi) right_open = false;
    }
  }
  // Accumulated mass fell short of u by floating-point slack; return the
  // last state enumerated (probability ~1e-15 per draw).
  return last;
}

}  // namespace detail

// Exact Poisson(lambda) sampler. One uniform per variate.
inline std::uint64_t sample_poisson(double lambda, RngStream& rng) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("sample_poisson: lambda must be finite and >= 0");
  if (lambda == 0.0) return 0;
  const double log_lambda = std::log(lambda);
  auto log_pmf = [lambda, log_lambda](std::uint64_t j) {
    return static_cast<double>(j) * log_lambda - lambda -
           std::lgamma(static_cast<double>(j) + 1.0);
  };
  const auto mode = static_cast<std::uint64_t>(std::floor(lambda));
  // hi bound: mode + 40 sd + slack; mass beyond is ~0 and the enumerator
  // treats running off the end as saturation.
  const auto hi = mode + 64 + static_cast<std::uint64_t>(40.0 * std::sqrt(lambda));
  return detail::inversion_from_mode(0, hi, mode, log_pmf, rng.next_unit());
}

// Exact Binomial(n, p) sampler. One uniform per variate. Log-space pmf keeps
// it correct where (1-p)^n underflows (np in the hundreds and beyond).
inline std::uint64_t sample_binomial(std::uint64_t n, double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("sample_binomial: p must be in [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const double nd = static_cast<double>(n);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double lg_n1 = std::lgamma(nd + 1.0);
  auto log_pmf = [=](std::uint64_t j) {
    const double jd = static_cast<double>(j);
    return lg_n1 - std::lgamma(jd + 1.0) - std::lgamma(nd - jd + 1.0) +
           jd * log_p + (nd - jd) * log_q;
  };
  auto mode = static_cast<std::uint64_t>(std::floor((nd + 1.0) * p));
  if (mode > n) mode = n;
  return detail::inversion_from_mode(0, n, mode, log_pmf, rng.next_unit());
}

}  // namespace plrg
