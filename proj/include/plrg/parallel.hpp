#pragma once

#include <atomic>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

// Deterministic map-reduce over replicate indices. Chunk boundaries are a
// function of the total count only, and partial results merge in chunk-index
// order, so every statistic is bit-identical for any thread count.

namespace plrg {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// work(begin, end) -> Acc over [begin, end); merge(into, from) folds partials.
template <class Acc, class Work, class Merge>
Acc parallel_reduce(std::size_t total, int threads, Work work, Merge merge) {
  constexpr std::size_t kChunks = 256;
  const std::size_t n_chunks = total < kChunks ? (total == 0 ? 1 : total) : kChunks;
  const std::size_t chunk = (total + n_chunks - 1) / n_chunks;

  std::vector<std::optional<Acc>> partial(n_chunks);
  const int nt = resolve_threads(threads);

  if (nt <= 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      const std::size_t b = c * chunk;
      const std::size_t e = std::min(total, b + chunk);
      if (b >= e && total != 0) break;
      partial[c].emplace(work(b, e));
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr fail;
    std::atomic<bool> failed{false};
    auto body = [&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= n_chunks || failed.load()) return;
        const std::size_t b = c * chunk;
        const std::size_t e = std::min(total, b + chunk);
        if (b >= e) continue;
        try {
          partial[c].emplace(work(b, e));
        } catch (...) {
          if (!failed.exchange(true)) fail = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(fail);
  }

  std::optional<Acc> out;
  for (auto& p : partial) {
    if (!p) continue;
    if (!out)
      out.emplace(std::move(*p));
    else
      merge(*out, *p);
  }
  if (!out) out.emplace(work(0, 0));
  return *out;
}

// Scalar mean/variance accumulator with exact merge (Chan et al. update).
struct MeanAccumulator {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const MeanAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    mean += d * nb / (na + nb);
    m2 += o.m2 + d * d * na * nb / (na + nb);
    n += o.n;
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double se_of_mean() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

// Vector mean + covariance accumulator, exact merge.
class CovAccumulator {
 public:
  CovAccumulator() = default;
  explicit CovAccumulator(std::size_t dim)
      : dim_(dim), mean_(dim, 0.0), m2_(dim * dim, 0.0), delta_(dim, 0.0) {}

  void add(std::span<const double> x) {
    if (x.size() != dim_) throw std::invalid_argument("CovAccumulator: dim mismatch");
    ++n_;
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < dim_; ++i) delta_[i] = x[i] - mean_[i];
    for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta_[i] * inv;
    const double w = static_cast<double>(n_ - 1) * inv;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        m2_[i * dim_ + j] += w * delta_[i] * delta_[j];
  }

  void merge(const CovAccumulator& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("CovAccumulator: dim mismatch");
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    const double w = na * nb / (na + nb);
    for (std::size_t i = 0; i < dim_; ++i) delta_[i] = o.mean_[i] - mean_[i];
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        m2_[i * dim_ + j] += o.m2_[i * dim_ + j] + w * delta_[i] * delta_[j];
    for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta_[i] * nb / (na + nb);
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& mean() const { return mean_; }
  double covariance(std::size_t i, std::size_t j) const {
    return n_ > 1 ? m2_[i * dim_ + j] / static_cast<double>(n_ - 1) : 0.0;
  }
  std::vector<double> covariance_matrix() const {
    std::vector<double> c(dim_ * dim_, 0.0);
    if (n_ > 1)
      for (std::size_t k = 0; k < c.size(); ++k)
        c[k] = m2_[k] / static_cast<double>(n_ - 1);
    return c;
  }

 private:
  std::size_t dim_ = 0;
  std::size_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::vector<double> delta_;
};

}  // namespace plrg
