#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "plrg/hard_graph.hpp"
#include "plrg/rng.hpp"

// Critical-regime limit graph: a Poisson point process with intensity
// t * alpha x^(-alpha-1) on x >= 1, thresholded at x0. Only the counts that
// determine the graph law are sampled (clique points above sqrt(x0), group
// counts between interval endpoints); the PPP is never materialized globally.

namespace plrg {

struct GraphexGraph {
  double t = 0.0;
  double x0 = 0.0;
  double alpha = 0.0;
  std::vector<double> clique_values;                 // strictly decreasing, > sqrt(x0)
  std::vector<double> clique_times;                  // in (0, t], aligned with values
  std::vector<std::uint64_t> follower_counts;        // K_j, j = 1..K0
  std::vector<std::vector<double>> follower_times;   // per group, in (0, t]

  std::uint64_t k0() const { return clique_values.size(); }
};

// lambda_j = t * (max(1, L_j)^(-alpha) - max(1, R_j)^(-alpha)) for the value
// intervals (L_j, R_j]: j = 1 is (x0/v_{K0}, sqrt(x0)], j >= 2 is
// (x0/v_{K0+1-j}, x0/v_{K0+2-j}]. Clamping at 1 reflects the intensity
// support x >= 1.
inline std::vector<double> interval_intensities(const std::vector<double>& clique_values,
                                                double t, double x0, double alpha) {
  if (!(t > 0.0) || !(x0 > 1.0) || !(alpha > 0.0))
    throw std::invalid_argument("interval_intensities: need t > 0, x0 > 1, alpha > 0");
  const double root = std::sqrt(x0);
  for (std::size_t i = 0; i < clique_values.size(); ++i) {
    if (!(clique_values[i] > root))
      throw std::invalid_argument("interval_intensities: clique values must exceed sqrt(x0)");
    if (i > 0 && !(clique_values[i] < clique_values[i - 1]))
      throw std::invalid_argument("interval_intensities: clique values must be strictly decreasing");
  }
  const std::size_t k0 = clique_values.size();
  std::vector<double> lambda(k0, 0.0);
  auto tail_mass = [&](double v) { return std::pow(std::max(1.0, v), -alpha); };
  double upper = root;
  for (std::size_t j = 1; j <= k0; ++j) {
    const double lower = x0 / clique_values[k0 - j];  // x0 / v_{K0+1-j}
    lambda[j - 1] = t * std::max(0.0, tail_mass(lower) - tail_mass(upper));
    upper = lower;
  }
  return lambda;
}

inline GraphexGraph sample_graphex(double t, double x0, double alpha, std::uint64_t seed) {
  if (!(t > 0.0)) throw std::invalid_argument("sample_graphex: t must be > 0");
  if (!(x0 > 1.0)) throw std::invalid_argument("sample_graphex: x0 must be > 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_graphex: alpha must be > 0");

  RngStream rng(derive_key(seed, /*stream=*/2));
  GraphexGraph g;
  g.t = t;
  g.x0 = x0;
  g.alpha = alpha;

  const double root = std::sqrt(x0);
  const std::uint64_t k0 = sample_poisson(t * std::pow(x0, -alpha / 2.0), rng);

  // Clique values: Pareto conditioned above sqrt(x0), i.e. sqrt(x0) * Pareto(alpha).
  // Ties are resampled (probability zero) to keep the ordering strict.
  g.clique_values.resize(k0);
  for (int attempt = 0;; ++attempt) {
    for (auto& v : g.clique_values) v = root * inv_power(rng.next_unit(), alpha);
    std::sort(g.clique_values.begin(), g.clique_values.end(), std::greater<>());
    if (std::adjacent_find(g.clique_values.begin(), g.clique_values.end()) ==
        g.clique_values.end())
      break;
    if (attempt > 100) throw std::runtime_error("sample_graphex: persistent clique-value ties");
  }
  g.clique_times.resize(k0);
  for (auto& s : g.clique_times) s = t * rng.next_unit();

  const auto lambda = interval_intensities(g.clique_values, t, x0, alpha);
  g.follower_counts.resize(k0);
  g.follower_times.resize(k0);
  for (std::size_t j = 0; j < k0; ++j) {
    g.follower_counts[j] = sample_poisson(lambda[j], rng);
    g.follower_times[j].resize(g.follower_counts[j]);
    for (auto& s : g.follower_times[j]) s = t * rng.next_unit();
  }
  return g;
}

// Restriction to points born by time s. A follower attached to the top
// K0+1-j clique points stays attached to the survivors of that same set, so
// its new group index is determined by its surviving-neighbor count.
inline GraphexGraph nested_subgraph(const GraphexGraph& g, double s) {
  if (s > g.t) throw std::out_of_range("nested_subgraph: s exceeds the graph horizon");
  if (s < 0.0) throw std::out_of_range("nested_subgraph: s must be >= 0");
  GraphexGraph out;
  out.t = s;
  out.x0 = g.x0;
  out.alpha = g.alpha;

  const std::size_t k0_old = g.clique_values.size();
  std::vector<char> survives(k0_old, 0);
  for (std::size_t i = 0; i < k0_old; ++i) {
    if (g.clique_times[i] <= s) {
      survives[i] = 1;
      out.clique_values.push_back(g.clique_values[i]);
      out.clique_times.push_back(g.clique_times[i]);
    }
  }
  // prefix[m] = surviving count among the top m old clique points
  std::vector<std::size_t> prefix(k0_old + 1, 0);
  for (std::size_t i = 0; i < k0_old; ++i) prefix[i + 1] = prefix[i] + (survives[i] ? 1 : 0);

  const std::size_t k0_new = out.clique_values.size();
  out.follower_counts.assign(k0_new, 0);
  out.follower_times.assign(k0_new, {});
  for (std::size_t j = 1; j <= k0_old; ++j) {
    const std::size_t old_degree = k0_old + 1 - j;
    const std::size_t new_degree = prefix[old_degree];
    if (new_degree == 0) continue;  // all its clique neighbors gone; follower drops out
    const std::size_t j_new = k0_new + 1 - new_degree;
    for (double time : g.follower_times[j - 1]) {
      if (time <= s) {
        ++out.follower_counts[j_new - 1];
        out.follower_times[j_new - 1].push_back(time);
      }
    }
  }
  return out;
}

inline KVector to_kvector(const GraphexGraph& g) {
  KVector kv;
  kv.k0 = g.k0();
  kv.followers = g.follower_counts;
  return kv;
}

}  // namespace plrg
