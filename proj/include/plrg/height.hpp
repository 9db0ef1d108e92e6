#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "plrg/dist.hpp"
#include "plrg/parallel.hpp"
#include "plrg/rng.hpp"

// Sub-critical height process: conditional sampling split at sqrt(a_n),
// threshold statistics tau_n, the centering theta_n, the bridge/quantile
// decomposition, and empirical moment summaries against the limit
// covariances. Conditioning on the clique sigma-algebra is realized by
// fixing (k_n, y) within a replicate.

namespace plrg {

struct ConditionedSample {
  TailModel model;
  std::size_t n = 0;
  double a_n = 0.0;
  std::size_t k_n = 0;
  std::vector<double> y;  // clique values, law of X given X > sqrt(a_n)
  std::vector<double> z;  // follower values, law of X given X <= sqrt(a_n)
  double sigma2 = 0.0;    // n * tail(sqrt(a_n))
  bool low_sigma = false;
  std::size_t resamples = 0;  // k_n = 0 redraws
};

inline ConditionedSample sample_conditioned(const TailModel& model, std::size_t n, double a_n,
                                            std::uint64_t seed) {
  if (n < 2 || !(a_n > 1.0))
    throw std::invalid_argument("sample_conditioned: need n >= 2 and a_n > 1");
  const double root = std::sqrt(a_n);
  const double p = model.tail(root);
  const double np = static_cast<double>(n) * p;
  if (!(np >= 1.0))
    throw std::domain_error("sample_conditioned: n * tail(sqrt(a_n)) < 1, not sub-critical");

  ConditionedSample cs;
  cs.model = model;
  cs.n = n;
  cs.a_n = a_n;
  cs.sigma2 = np;
  cs.low_sigma = np < 10.0;

  RngStream rng(derive_key(seed, 3));
  std::size_t k = 0;
  while ((k = sample_binomial(n, p, rng)) == 0) ++cs.resamples;
  cs.k_n = k;

  const bool fast = model.family() == TailFamily::ExactPareto;
  const double alpha = model.alpha();
  const double cdf_root = 1.0 - p;
  cs.y.resize(k);
  for (auto& v : cs.y)
    v = fast ? root * inv_power(rng.next_unit(), alpha) : model.quantile_tail(rng.next_unit() * p);
  cs.z.resize(n - k);
  for (auto& v : cs.z) {
    const double t = 1.0 - rng.next_unit() * cdf_root;  // tail level in [p, 1)
    v = fast ? inv_power(t, alpha) : model.quantile_tail(t);
  }
  return cs;
}

// a_n / y_(ceil(x * k)) with 1-based indexing into increasing order statistics
inline double tau(double x, const std::vector<double>& y_sorted_increasing, double a_n) {
  if (!(x > 0.0) || !(x < 1.0)) throw std::out_of_range("tau: x must lie in (0,1)");
  const std::size_t k = y_sorted_increasing.size();
  if (k == 0) throw std::invalid_argument("tau: empty clique sample");
  auto idx = static_cast<std::size_t>(
      std::ceil(x * static_cast<double>(k)));
  idx = std::min(std::max<std::size_t>(idx, 1), k);
  return a_n / y_sorted_increasing[idx - 1];
}

// tail(sqrt(a_n) * quantile-of-W_n at x) / tail(sqrt(a_n)); for ExactPareto
// this is 1/x above the clamp level a_n^(-alpha/2) and a_n^(alpha/2) below.
inline double theta_n(double x, const TailModel& model, double a_n) {
  if (!(x > 0.0) || !(x <= 1.0)) throw std::out_of_range("theta_n: x must lie in (0,1]");
  const double root = std::sqrt(a_n);
  const double p = model.tail(root);
  if (model.family() == TailFamily::ExactPareto) return x <= p ? 1.0 / p : 1.0 / x;
  const double q = model.quantile_tail(x * p);
  return model.tail(a_n / q) / p;
}

struct HeightSeries {
  std::vector<double> x_grid;
  std::vector<std::uint64_t> h;
  std::vector<double> tau_vals;
  std::vector<double> centered;  // (h - sigma2*(theta_n(1-x)-1)) / sigma_n
};

inline HeightSeries height_series(const ConditionedSample& cs, const std::vector<double>& x_grid) {
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > 0.0) || !(x_grid[i] < 1.0))
      throw std::invalid_argument("height_series: grid must lie in (0,1)");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1]))
      throw std::invalid_argument("height_series: grid must be strictly increasing");
  }
  std::vector<double> ys(cs.y), zs(cs.z);
  std::sort(ys.begin(), ys.end());
  std::sort(zs.begin(), zs.end());

  HeightSeries out;
  out.x_grid = x_grid;
  const double sigma_n = std::sqrt(cs.sigma2);
  for (double x : x_grid) {
    const double t = tau(x, ys, cs.a_n);
    const auto above = zs.end() - std::upper_bound(zs.begin(), zs.end(), t);
    out.tau_vals.push_back(t);
    out.h.push_back(static_cast<std::uint64_t>(above));
    const double drift = cs.sigma2 * (theta_n(1.0 - x, cs.model, cs.a_n) - 1.0);
    out.centered.push_back((static_cast<double>(above) - drift) / sigma_n);
  }
  return out;
}

struct Decomposition {
  std::vector<double> h1bar;  // H_n(x) - (n - k_n) * phat_n(x)
  std::vector<double> h2bar;  // (n - k_n) * (phat_n(x) - p_n(x))
};

inline Decomposition decompose(const ConditionedSample& cs, const HeightSeries& series) {
  const double root = std::sqrt(cs.a_n);
  const double p = cs.model.tail(root);
  const double cdf_root = 1.0 - p;
  const double rest = static_cast<double>(cs.n - cs.k_n);
  Decomposition dec;
  for (std::size_t i = 0; i < series.x_grid.size(); ++i) {
    const double phat = (cs.model.tail(series.tau_vals[i]) - p) / cdf_root;
    const double pn = (p / cdf_root) * (theta_n(1.0 - series.x_grid[i], cs.model, cs.a_n) - 1.0);
    dec.h1bar.push_back(static_cast<double>(series.h[i]) - rest * phat);
    dec.h2bar.push_back(rest * (phat - pn));
  }
  return dec;
}

// Limit covariances of the height fluctuations: the bridge part is a
// time-changed Brownian motion, the quantile part a rescaled Brownian bridge,
// and the two are independent.
inline double bridge_cov(double x, double y) {
  const double m = std::min(x, y);
  return m / (1.0 - m);
}

inline double quantile_cov(double x, double y) {
  const double m = std::min(x, y), M = std::max(x, y);
  return m * (1.0 - M) / ((1.0 - x) * (1.0 - x) * (1.0 - y) * (1.0 - y));
}

inline double total_cov(double x, double y) { return bridge_cov(x, y) + quantile_cov(x, y); }

struct MomentSummary {
  std::vector<double> x_grid;
  std::vector<double> emp_mean;
  std::vector<double> emp_cov;     // row-major g x g
  std::vector<double> target_cov;  // row-major g x g
};

struct FluctuationSummary {
  std::size_t n = 0;
  std::size_t reps = 0;
  double sigma2 = 0.0;
  MomentSummary total, bridge, quantile;
  std::vector<double> raw_mean_h;       // mean H_n(x) on the grid
  double max_identity_rel_err = 0.0;    // h1bar + h2bar vs H - (n-k) p_n
  bool low_reps = false;
};

namespace detail {

inline MomentSummary finish_moments(const std::vector<double>& grid, const CovAccumulator& acc,
                                    double (*target)(double, double)) {
  MomentSummary ms;
  ms.x_grid = grid;
  ms.emp_mean = acc.mean();
  ms.emp_cov = acc.covariance_matrix();
  const std::size_t g = grid.size();
  ms.target_cov.assign(g * g, 0.0);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) ms.target_cov[i * g + j] = target(grid[i], grid[j]);
  return ms;
}

}  // namespace detail

inline FluctuationSummary fluctuation_summary(const TailModel& model, std::size_t n, double a_n,
                                              const std::vector<double>& x_grid, std::size_t reps,
                                              std::uint64_t seed, int threads = 0) {
  if (x_grid.empty() || reps < 1)
    throw std::invalid_argument("fluctuation_summary: empty grid or reps < 1");
  for (double x : x_grid)
    if (!(x > 0.0) || !(x <= 0.8))
      throw std::invalid_argument("fluctuation_summary: grid must lie in (0, 0.8]");

  const std::size_t g = x_grid.size();
  struct Acc {
    CovAccumulator total, bridge, quant;
    std::vector<double> hsum;
    double maxerr = 0.0;
    explicit Acc(std::size_t dim) : total(dim), bridge(dim), quant(dim), hsum(dim, 0.0) {}
    void merge(const Acc& o) {
      total.merge(o.total);
      bridge.merge(o.bridge);
      quant.merge(o.quant);
      for (std::size_t i = 0; i < hsum.size(); ++i) hsum[i] += o.hsum[i];
      maxerr = std::max(maxerr, o.maxerr);
    }
  };

  const std::uint64_t base = derive_key(seed, 8, 1);
  Acc acc = parallel_reduce<Acc>(
      reps, threads,
      [&](std::size_t b, std::size_t end) {
        Acc a(g);
        std::vector<double> vt(g), vb(g), vq(g);
        for (std::size_t r = b; r < end; ++r) {
          const ConditionedSample cs = sample_conditioned(model, n, a_n, replicate_key(base, r));
          const HeightSeries series = height_series(cs, x_grid);
          const Decomposition dec = decompose(cs, series);
          const double sigma_n = std::sqrt(cs.sigma2);
          const double rest = static_cast<double>(cs.n - cs.k_n);
          const double p = cs.model.tail(std::sqrt(cs.a_n));
          const double scale_q = static_cast<double>(cs.n) / (sigma_n * rest);
          for (std::size_t i = 0; i < g; ++i) {
            vt[i] = series.centered[i];
            vb[i] = dec.h1bar[i] / sigma_n;
            vq[i] = dec.h2bar[i] * scale_q;
            a.hsum[i] += static_cast<double>(series.h[i]);
            const double pn =
                (p / (1.0 - p)) * (theta_n(1.0 - x_grid[i], cs.model, cs.a_n) - 1.0);
            const double lhs = dec.h1bar[i] + dec.h2bar[i];
            const double rhs = static_cast<double>(series.h[i]) - rest * pn;
            const double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
            a.maxerr = std::max(a.maxerr, err);
          }
          a.total.add(vt);
          a.bridge.add(vb);
          a.quant.add(vq);
        }
        return a;
      },
      [](Acc& a, const Acc& b2) { a.merge(b2); });

  FluctuationSummary out;
  out.n = n;
  out.reps = reps;
  out.sigma2 = static_cast<double>(n) * model.tail(std::sqrt(a_n));
  out.low_reps = reps < 1000;
  out.total = detail::finish_moments(x_grid, acc.total, &total_cov);
  out.bridge = detail::finish_moments(x_grid, acc.bridge, &bridge_cov);
  out.quantile = detail::finish_moments(x_grid, acc.quant, &quantile_cov);
  out.max_identity_rel_err = acc.maxerr;
  out.raw_mean_h.resize(g);
  for (std::size_t i = 0; i < g; ++i) out.raw_mean_h[i] = acc.hsum[i] / static_cast<double>(reps);
  return out;
}

struct QuantileBridgeReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::vector<double> x_grid;
  std::vector<double> emp_cov;     // of sqrt(k_n) (Q_n(x) - x), row-major
  std::vector<double> target_cov;  // min(x,y) - x*y
  double frac_within_dkw = 0.0;    // share of replicates with sup-gap < 5/sqrt(k_n)
};

// Q_n(x) = F_W of the ceil(x k_n)-th order statistic of W_i = sqrt(a_n)/Y_i;
// F_W(W_(i)) = tail(Y_(k+1-i))/p, so only clique draws are needed.
inline QuantileBridgeReport quantile_bridge_check(const TailModel& model, std::size_t n,
                                                  double a_n, const std::vector<double>& x_grid,
                                                  std::size_t reps, std::uint64_t seed,
                                                  int threads = 0) {
  if (x_grid.empty() || reps < 1)
    throw std::invalid_argument("quantile_bridge_check: empty grid or reps < 1");
  for (double x : x_grid)
    if (!(x > 0.0) || !(x <= 1.0))
      throw std::invalid_argument("quantile_bridge_check: grid must lie in (0,1]");

  const double root = std::sqrt(a_n);
  const double p = model.tail(root);
  if (!(static_cast<double>(n) * p >= 1.0))
    throw std::domain_error("quantile_bridge_check: not sub-critical");
  const bool fast = model.family() == TailFamily::ExactPareto;
  const double alpha = model.alpha();

  const std::size_t g = x_grid.size();
  struct Acc {
    CovAccumulator cov;
    std::uint64_t within = 0;
    explicit Acc(std::size_t dim) : cov(dim) {}
    void merge(const Acc& o) {
      cov.merge(o.cov);
      within += o.within;
    }
  };

  const std::uint64_t base = derive_key(seed, 8, 2);
  Acc acc = parallel_reduce<Acc>(
      reps, threads,
      [&](std::size_t b, std::size_t end) {
        Acc a(g);
        std::vector<double> y, v(g);
        for (std::size_t r = b; r < end; ++r) {
          RngStream rng(replicate_key(base, r));
          std::size_t k = 0;
          while ((k = sample_binomial(n, p, rng)) == 0) {
          }
          y.resize(k);
          for (auto& w : y)
            w = fast ? root * inv_power(rng.next_unit(), alpha)
                     : model.quantile_tail(rng.next_unit() * p);
          std::sort(y.begin(), y.end());  // increasing; W order statistics reverse it
          const double sk = std::sqrt(static_cast<double>(k));
          double sup = 0.0;
          for (std::size_t i = 0; i < g; ++i) {
            const double x = x_grid[i];
            double q;
            if (x == 1.0) {
              q = 1.0;  // full-sample quantile is exact by convention
            } else {
              auto idx = static_cast<std::size_t>(std::ceil(x * static_cast<double>(k)));
              idx = std::min(std::max<std::size_t>(idx, 1), k);
              q = model.tail(y[k - idx]) / p;
            }
            v[i] = sk * (q - x);
            sup = std::max(sup, std::abs(q - x));
          }
          a.cov.add(v);
          if (sup < 5.0 / sk) ++a.within;
        }
        return a;
      },
      [](Acc& a, const Acc& b2) { a.merge(b2); });

  QuantileBridgeReport out;
  out.n = n;
  out.reps = reps;
  out.x_grid = x_grid;
  out.emp_cov = acc.cov.covariance_matrix();
  out.target_cov.assign(g * g, 0.0);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j)
      out.target_cov[i * g + j] = std::min(x_grid[i], x_grid[j]) - x_grid[i] * x_grid[j];
  out.frac_within_dkw = static_cast<double>(acc.within) / static_cast<double>(reps);
  return out;
}

struct BoundaryRow {
  double x = 0.0;
  double h_hat = 0.0;  // 1 + mean H_n(1-x) / sigma2
  double h_ref = 0.0;  // 1/x
  double ratio = 0.0;
};

struct BoundaryReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  double sigma2 = 0.0;
  std::vector<BoundaryRow> rows;
};

inline BoundaryReport boundary_profile(const TailModel& model, std::size_t n, double a_n,
                                       const std::vector<double>& x_grid, std::size_t reps,
                                       std::uint64_t seed, int threads = 0) {
  if (x_grid.empty() || reps < 1)
    throw std::invalid_argument("boundary_profile: empty grid or reps < 1");
  for (double x : x_grid)
    if (!(x > 0.0) || !(x <= 1.0))
      throw std::invalid_argument("boundary_profile: grid must lie in (0,1]");

  // internal strictly increasing height grid of u = 1-x values in (0,1)
  std::vector<double> us;
  for (double x : x_grid)
    if (x < 1.0) us.push_back(1.0 - x);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());

  const std::size_t g = us.size();
  const std::uint64_t base = derive_key(seed, 8, 3);
  std::vector<double> mean_h(g, 0.0);
  if (g > 0) {
    struct Acc {
      std::vector<double> hsum;
      explicit Acc(std::size_t dim) : hsum(dim, 0.0) {}
      void merge(const Acc& o) {
        for (std::size_t i = 0; i < hsum.size(); ++i) hsum[i] += o.hsum[i];
      }
    };
    Acc acc = parallel_reduce<Acc>(
        reps, threads,
        [&](std::size_t b, std::size_t end) {
          Acc a(g);
          for (std::size_t r = b; r < end; ++r) {
            const ConditionedSample cs = sample_conditioned(model, n, a_n, replicate_key(base, r));
            const HeightSeries series = height_series(cs, us);
            for (std::size_t i = 0; i < g; ++i) a.hsum[i] += static_cast<double>(series.h[i]);
          }
          return a;
        },
        [](Acc& a, const Acc& b2) { a.merge(b2); });
    for (std::size_t i = 0; i < g; ++i) mean_h[i] = acc.hsum[i] / static_cast<double>(reps);
  }

  BoundaryReport out;
  out.n = n;
  out.reps = reps;
  out.sigma2 = static_cast<double>(n) * model.tail(std::sqrt(a_n));
  for (double x : x_grid) {
    BoundaryRow row;
    row.x = x;
    double mh = 0.0;  // H_n(0) = 0 convention covers x = 1
    if (x < 1.0) {
      const double u = 1.0 - x;
      const auto it = std::lower_bound(us.begin(), us.end(), u);
      mh = mean_h[static_cast<std::size_t>(it - us.begin())];
    }
    row.h_hat = 1.0 + mh / out.sigma2;
    row.h_ref = 1.0 / x;
    row.ratio = row.h_hat / row.h_ref;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace plrg
