#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "plrg/dist.hpp"
#include "plrg/parallel.hpp"
#include "plrg/rng.hpp"
#include "plrg/stats.hpp"

// Bernoulli-edge extension: pairs connect with probability min(1, X_iX_j/a_n)
// given the sample, so hard edges (X_iX_j > a_n) are always present. Pair
// coins are addressed by (seed, i, j), making every construction
// schedule-independent. A uniform U in (0,1] satisfies P(U <= p) = p, so the
// coin test is u <= p with no explicit clamp.

namespace plrg {

struct BernoulliGraph {
  WeightedSample sample;
  double a_n = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // i < j, 0-based
};

inline constexpr std::size_t kBernoulliFullBuildCap = 4000;

inline BernoulliGraph build_bernoulli_graph(const WeightedSample& sample, double a_n,
                                            std::uint64_t seed) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("build_bernoulli_graph: need n >= 2");
  if (n > kBernoulliFullBuildCap)
    throw std::length_error("build_bernoulli_graph: n above full-build cap");
  if (!(a_n > 0.0)) throw std::invalid_argument("build_bernoulli_graph: a_n must be > 0");

  BernoulliGraph g;
  g.sample = sample;
  g.a_n = a_n;
  g.seed = seed;
  const std::uint64_t key = derive_key(seed, 10);
  const auto& x = sample.values;
  for (std::uint32_t i = 0; i + 1 < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (pair_unit(key, i, j) * a_n <= x[i] * x[j]) g.edges.emplace_back(i, j);
  return g;
}

// P(vertex 1 non-isolated | no clique vertex), estimated from vertex 1's row
// with the other values drawn from the law of X given X <= sqrt(a_n).
inline EstimateReport mc_nonisolated_given_no_clique(double alpha, double gamma, std::size_t n,
                                                     std::size_t reps, std::uint64_t seed,
                                                     int threads = 0) {
  if (!(gamma > 2.0))
    throw std::domain_error("mc_nonisolated_given_no_clique: requires gamma > 2");
  if (!(alpha > 0.0) || n < 2 || reps < 1)
    throw std::invalid_argument("mc_nonisolated_given_no_clique: bad parameters");

  const double a = scaling_a_n(alpha, gamma, n);
  const double cdf_root = -std::expm1(-0.5 * alpha * std::log(a));  // 1 - a^(-alpha/2)

  EstimateReport rep;
  rep.event = "bernoulli_nonisolated_no_clique";
  rep.alpha = alpha;
  rep.gamma = gamma;
  rep.n = n;
  rep.reps = reps;
  if (gamma / alpha < 1.0) {
    rep.asymptote = 1.0;
    rep.region = "gamma/alpha < 1";
  } else {
    if (!(alpha > 1.0))
      throw std::domain_error("mc_nonisolated_given_no_clique: constant needs alpha > 1");
    const double cst = alpha / (alpha - 1.0);
    rep.asymptote = cst * cst * static_cast<double>(n) / a;
    rep.region = "gamma/alpha >= 1";
  }

  const std::uint64_t base = derive_key(seed, 12, 1);
  const std::uint64_t hits = parallel_reduce<std::uint64_t>(
      reps, threads,
      [&](std::size_t b, std::size_t end) {
        std::uint64_t h = 0;
        for (std::size_t r = b; r < end; ++r) {
          RngStream rng(replicate_key(base, r));
          const double x1 = inv_power(1.0 - rng.next_unit() * cdf_root, alpha);
          for (std::size_t j = 1; j < n; ++j) {
            const double z = inv_power(1.0 - rng.next_unit() * cdf_root, alpha);
            if (rng.next_unit() * a <= x1 * z) {
              ++h;
              break;
            }
          }
        }
        return h;
      },
      [](std::uint64_t& u, std::uint64_t v) { u += v; });
  detail::finish_indicator_report(rep, hits);
  return rep;
}

// P(no edges at all | no clique vertex); full pairwise scan, so n is capped.
// The reported asymptote is the inclusion-exclusion lower bound
// 1 - (alpha/(alpha-1))^2 n^2/a_n, sharp when gamma/alpha >= 2.
inline EstimateReport mc_empty_graph(double alpha, double gamma, std::size_t n, std::size_t reps,
                                     std::uint64_t seed, int threads = 0) {
  if (!(alpha > 0.0) || !(gamma > 0.0) || n < 2 || reps < 1)
    throw std::invalid_argument("mc_empty_graph: bad parameters");
  if (n > kBernoulliFullBuildCap) throw std::length_error("mc_empty_graph: n above full-build cap");
  const double a = scaling_a_n(alpha, gamma, n);
  if (!(a > 1.0)) throw std::domain_error("mc_empty_graph: a_n <= 1, no sub-threshold support");
  const double cdf_root = -std::expm1(-0.5 * alpha * std::log(a));

  EstimateReport rep;
  rep.event = "bernoulli_empty_graph";
  rep.alpha = alpha;
  rep.gamma = gamma;
  rep.n = n;
  rep.reps = reps;
  if (alpha > 1.0) {
    const double cst = alpha / (alpha - 1.0);
    rep.asymptote = 1.0 - cst * cst * static_cast<double>(n) * static_cast<double>(n) / a;
  } else {
    rep.asymptote = std::numeric_limits<double>::quiet_NaN();
  }
  rep.region = "lower bound, sharp for gamma/alpha >= 2";

  const std::uint64_t base = derive_key(seed, 12, 2);
  const std::uint64_t hits = parallel_reduce<std::uint64_t>(
      reps, threads,
      [&](std::size_t b, std::size_t end) {
        std::uint64_t h = 0;
        std::vector<double> z(n);
        for (std::size_t r = b; r < end; ++r) {
          RngStream rng(replicate_key(base, r));
          for (auto& v : z) v = inv_power(1.0 - rng.next_unit() * cdf_root, alpha);
          bool empty = true;
          for (std::size_t i = 0; i + 1 < n && empty; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
              if (rng.next_unit() * a <= z[i] * z[j]) {
                empty = false;
                break;
              }
          h += empty ? 1 : 0;
        }
        return h;
      },
      [](std::uint64_t& u, std::uint64_t v) { u += v; });
  detail::finish_indicator_report(rep, hits);
  return rep;
}

struct LoneCliqueReport {
  double alpha = 0.0;
  double gamma = 0.0;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t events = 0;  // replicates with a lone, non-isolated clique vertex
  std::vector<std::pair<std::uint64_t, std::uint64_t>> histogram;  // (follower count, hits)
  double p_event = 0.0;
  double p_event_se = 0.0;
  double trend_ref = 0.0;  // n / a_n^(alpha/2)
  std::uint64_t modal_count = 0;
  double p_mass_1 = 0.0;  // P(count = 1 | event)
  bool insufficient = false;
};

// Conditioning event: exactly one clique vertex (X > sqrt(a_n)) and at least
// one Bernoulli edge from it. Values are regenerated from the replicate key
// for the counting pass; coins come from a separately keyed stream.
inline LoneCliqueReport lone_clique_follower_stats(double alpha, double gamma, std::size_t n,
                                                   std::size_t reps, std::uint64_t seed,
                                                   int threads = 0) {
  if (!(gamma > 2.0)) throw std::domain_error("lone_clique_follower_stats: requires gamma > 2");
  if (!(alpha > 0.0) || n < 2 || reps < 1)
    throw std::invalid_argument("lone_clique_follower_stats: bad parameters");

  const double a = scaling_a_n(alpha, gamma, n);
  const double root = std::sqrt(a);

  struct Acc {
    std::uint64_t events = 0;
    std::map<std::uint64_t, std::uint64_t> hist;
    void merge(const Acc& o) {
      events += o.events;
      for (const auto& [k, v] : o.hist) hist[k] += v;
    }
  };

  const std::uint64_t base = derive_key(seed, 12, 3);
  Acc acc = parallel_reduce<Acc>(
      reps, threads,
      [&](std::size_t b, std::size_t end) {
        Acc out;
        for (std::size_t r = b; r < end; ++r) {
          const std::uint64_t key = replicate_key(base, r);
          std::size_t k0 = 0, idx_c = 0;
          double xc = 0.0;
          {
            RngStream rng(key);
            for (std::size_t i = 0; i < n; ++i) {
              const double x = inv_power(rng.next_unit(), alpha);
              if (x > root) {
                ++k0;
                idx_c = i;
                xc = x;
                if (k0 > 1) break;
              }
            }
          }
          if (k0 != 1) continue;
          RngStream vals(key);
          RngStream coins(derive_key(key, 99));
          std::uint64_t followers = 0;
          for (std::size_t i = 0; i < n; ++i) {
            const double x = inv_power(vals.next_unit(), alpha);
            if (i == idx_c) continue;
            if (coins.next_unit() * a <= xc * x) ++followers;
          }
          if (followers >= 1) {
            ++out.events;
            ++out.hist[followers];
          }
        }
        return out;
      },
      [](Acc& u, const Acc& v) { u.merge(v); });

  LoneCliqueReport rep;
  rep.alpha = alpha;
  rep.gamma = gamma;
  rep.n = n;
  rep.reps = reps;
  rep.events = acc.events;
  rep.p_event = static_cast<double>(acc.events) / static_cast<double>(reps);
  rep.p_event_se =
      std::sqrt(std::max(0.0, rep.p_event * (1.0 - rep.p_event) / static_cast<double>(reps)));
  rep.trend_ref = static_cast<double>(n) * std::pow(a, -alpha / 2.0);
  rep.insufficient = acc.events < 100;
  std::uint64_t best = 0;
  for (const auto& [cnt, hits] : acc.hist) {
    rep.histogram.emplace_back(cnt, hits);
    if (hits > best) {
      best = hits;
      rep.modal_count = cnt;
    }
  }
  if (acc.events > 0) {
    const auto it = acc.hist.find(1);
    rep.p_mass_1 = it == acc.hist.end()
                       ? 0.0
                       : static_cast<double>(it->second) / static_cast<double>(acc.events);
  }
  return rep;
}

// (1 - alpha')^2 (xy)^(-alpha'), the density of the rescaled limit graphon
inline double limit_graphon_value(double alphaprime, double x, double y) {
  if (!(alphaprime > 0.0) || !(alphaprime < 1.0))
    throw std::invalid_argument("limit_graphon_value: alphaprime must lie in (0,1)");
  if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("limit_graphon_value: need x, y > 0");
  const double c = 1.0 - alphaprime;
  return c * c * std::pow(x * y, -alphaprime);
}

struct PartialIntegralResult {
  double value = 0.0;   // S(x,y) / (n^2 c_n), self-normalized so value(1,1) = 1
  double target = 0.0;  // (xy)^(1 - alpha')
  double limit_graphon = 0.0;
  double c_n = 0.0;  // empirical edge density
  std::size_t n = 0;
  double x = 0.0, y = 0.0;
};

// Partial integral of the empirical graphon of the Bernoulli graph with
// a_n = n^(2 alpha' - beta), vertices by decreasing value, c_n the empirical
// edge density. The sum runs over ordered pairs with i <= ceil(xn),
// j <= ceil(yn).
inline PartialIntegralResult rescaled_graphon_partial_integral(double alphaprime, double beta,
                                                               std::size_t n, double x, double y,
                                                               std::uint64_t seed) {
  if (!(alphaprime > 0.0) || !(alphaprime < 1.0))
    throw std::invalid_argument("rescaled_graphon_partial_integral: alphaprime must lie in (0,1)");
  if (!(beta > 0.0) || !(beta < 2.0 * alphaprime))
    throw std::invalid_argument("rescaled_graphon_partial_integral: beta must lie in (0, 2 alphaprime)");
  if (n < 2) throw std::invalid_argument("rescaled_graphon_partial_integral: need n >= 2");
  if (n > kBernoulliFullBuildCap)
    throw std::length_error("rescaled_graphon_partial_integral: n above full-build cap");
  if (!(x > 0.0) || !(x <= 1.0) || !(y > 0.0) || !(y <= 1.0))
    throw std::invalid_argument("rescaled_graphon_partial_integral: x, y must lie in (0,1]");

  const double alpha = 1.0 / alphaprime;
  const double a = std::pow(static_cast<double>(n), 2.0 * alphaprime - beta);
  std::vector<double> v(n);
  {
    RngStream rng(derive_key(seed, 11));
    for (auto& w : v) w = inv_power(rng.next_unit(), alpha);
  }
  std::sort(v.begin(), v.end(), std::greater<>());

  const auto cap = [n](double t) {
    auto c = static_cast<std::size_t>(std::ceil(t * static_cast<double>(n)));
    return std::min(std::max<std::size_t>(c, 1), n);
  };
  const std::size_t cx = cap(x), cy = cap(y);

  const std::uint64_t key = derive_key(seed, 11, 7);
  std::uint64_t s = 0, total = 0;
  for (std::uint32_t i = 0; i + 1 < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (pair_unit(key, i, j) * a <= v[i] * v[j]) {
        total += 2;
        s += (i < cx && j < cy) ? 1 : 0;
        s += (j < cx && i < cy) ? 1 : 0;
      }
    }

  PartialIntegralResult out;
  out.n = n;
  out.x = x;
  out.y = y;
  out.c_n = static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(n));
  out.value = total > 0 ? static_cast<double>(s) / static_cast<double>(total) : 0.0;
  out.target = std::pow(x * y, 1.0 - alphaprime);
  out.limit_graphon = limit_graphon_value(alphaprime, x, y);
  return out;
}

}  // namespace plrg
