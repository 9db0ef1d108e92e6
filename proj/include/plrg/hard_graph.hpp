#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "plrg/dist.hpp"

// Hard-edge graph on weighted vertices: i ~ j iff X_i * X_j > a, strictly.
// Neighborhoods are nested in the weight order, so the whole graph reduces
// to a clique count plus per-group follower counts (the K-vector).

namespace plrg {

struct HardGraph {
  std::size_t n_original = 0;                              // sample size
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // i < j, 0-based
  std::vector<std::uint32_t> vertices;                     // non-isolated, ascending

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t edge_count() const { return edges.size(); }
};

namespace detail {

inline HardGraph finalize_graph(std::size_t n,
                                std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  HardGraph g;
  g.n_original = n;
  g.edges = std::move(edges);
  std::vector<char> seen(n, 0);
  for (auto& [i, j] : g.edges) {
    seen[i] = 1;
    seen[j] = 1;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (seen[v]) g.vertices.push_back(static_cast<std::uint32_t>(v));
  return g;
}

}  // namespace detail

// O(n log n + m): sort by weight, then each vertex's neighbors among heavier
// vertices form a prefix of the sorted order found by binary search.
inline HardGraph build_hard_graph(const WeightedSample& sample, double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("build_hard_graph: threshold must be finite and > 0");
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("build_hard_graph: empty sample");
  if (n > static_cast<std::size_t>(std::numeric_limits<std::uint32_t>::max()))
    throw std::length_error("build_hard_graph: sample too large for 32-bit vertex ids");

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    const double vx = sample.values[x], vy = sample.values[y];
    return vx != vy ? vx > vy : x < y;
  });
  std::vector<double> sorted(n);
  for (std::size_t p = 0; p < n; ++p) sorted[p] = sample.values[order[p]];

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t p = 1; p < n; ++p) {
    const double v = sorted[p];
    // neighbors among positions [0, p): prefix with sorted[q] * v > a
    const double thr = a / v;
    const auto it = std::upper_bound(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(p),
                                     thr, [](double t, double s) { return s <= t; });
    const auto cnt = static_cast<std::size_t>(it - sorted.begin());
    for (std::size_t q = 0; q < cnt; ++q) {
      const std::uint32_t i = order[q], j = order[p];
      edges.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(edges.begin(), edges.end());
  return detail::finalize_graph(n, std::move(edges));
}

// Quadratic-time oracle for cross-checking build_hard_graph.
inline HardGraph brute_force_graph(const WeightedSample& sample, double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("brute_force_graph: threshold must be finite and > 0");
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("brute_force_graph: empty sample");
  if (n > 10000) throw std::length_error("brute_force_graph: refuses n > 1e4");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (sample.values[i] * sample.values[j] > a)
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  return detail::finalize_graph(n, std::move(edges));
}

// K-vector: k0 clique vertices (weights strictly above sqrt(a)) plus
// follower counts K_j, where group j followers attach to exactly the top
// k0+1-j clique vertices.
struct KVector {
  std::uint64_t k0 = 0;
  std::vector<std::uint64_t> followers;  // followers[j-1] = K_j, j = 1..k0

  std::uint64_t follower_total() const {
    return std::accumulate(followers.begin(), followers.end(), std::uint64_t{0});
  }

  // Non-isolated vertex count of the graph this K-vector describes. A lone
  // clique vertex with no followers has no edges, hence counts as zero.
  std::uint64_t vertex_count() const {
    const std::uint64_t s = follower_total();
    if (k0 == 0) return 0;
    if (k0 == 1) return s > 0 ? 1 + s : 0;
    return k0 + s;
  }
};

// |E| = C(k0, 2) + sum_j (k0 + 1 - j) K_j, exactly the hard graph's edges.
inline std::uint64_t edge_count(const KVector& kv) {
  if (kv.followers.size() != kv.k0)
    throw std::invalid_argument("edge_count: follower vector must have k0 entries");
  std::uint64_t e = kv.k0 * (kv.k0 - (kv.k0 > 0 ? 1 : 0)) / 2;
  for (std::uint64_t j = 1; j <= kv.k0; ++j) e += (kv.k0 + 1 - j) * kv.followers[j - 1];
  return e;
}

// Follower group j collects weights in (a / Y~_{k0+1-j}, a / Y~_{k0+2-j}],
// with the j = 1 upper end a / Y~_{k0+1} = sqrt(a) inclusive.
inline KVector k_vector(const WeightedSample& sample, double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("k_vector: threshold must be finite and > 0");
  if (sample.size() == 0) throw std::invalid_argument("k_vector: empty sample");
  const double root = std::sqrt(a);

  std::vector<double> clique;
  std::vector<double> rest;
  for (double v : sample.values) (v > root ? clique : rest).push_back(v);
  std::sort(clique.begin(), clique.end(), std::greater<>());
  std::sort(rest.begin(), rest.end());

  KVector kv;
  kv.k0 = clique.size();
  kv.followers.assign(clique.size(), 0);
  if (kv.k0 == 0) return kv;

  auto count_at_most = [&](double t) {
    return static_cast<std::uint64_t>(
        std::upper_bound(rest.begin(), rest.end(), t) - rest.begin());
  };
  double upper = root;  // group 1 upper end, inclusive
  for (std::uint64_t j = 1; j <= kv.k0; ++j) {
    const double lower = a / clique[kv.k0 - j];  // a / Y~_{k0+1-j}
    kv.followers[j - 1] = count_at_most(upper) - count_at_most(lower);
    upper = lower;
  }
  return kv;
}

// Canonical realization: vertices 0..k0-1 are the clique in decreasing
// weight order, followers appended group by group. Preserves edge count and
// the degree multiset of any graph with this K-vector.
inline HardGraph assemble_from_kvector(const KVector& kv) {
  if (kv.followers.size() != kv.k0)
    throw std::invalid_argument("assemble_from_kvector: follower vector must have k0 entries");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < kv.k0; ++i)
    for (std::uint32_t j = i + 1; j < kv.k0; ++j) edges.emplace_back(i, j);
  auto next = static_cast<std::uint32_t>(kv.k0);
  for (std::uint64_t j = 1; j <= kv.k0; ++j) {
    const auto deg = static_cast<std::uint32_t>(kv.k0 + 1 - j);
    for (std::uint64_t f = 0; f < kv.followers[j - 1]; ++f) {
      for (std::uint32_t c = 0; c < deg; ++c) edges.emplace_back(c, next);
      ++next;
    }
  }
  std::sort(edges.begin(), edges.end());
  return detail::finalize_graph(next, std::move(edges));
}

// ---- plain-text serialization ----

// Header "n_original m", then one "i j" pair per line, 0-based.
inline void write_edge_list(std::ostream& os, const HardGraph& g) {
  os << g.n_original << ' ' << g.edges.size() << '\n';
  for (const auto& [i, j] : g.edges) os << i << ' ' << j << '\n';
}

inline HardGraph read_edge_list(std::istream& is) {
  std::size_t n = 0, m = 0;
  if (!(is >> n >> m)) throw std::runtime_error("read_edge_list: bad header");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::uint32_t i = 0, j = 0;
    if (!(is >> i >> j)) throw std::runtime_error("read_edge_list: truncated edge list");
    if (i >= n || j >= n || i == j)
      throw std::runtime_error("read_edge_list: edge endpoint out of range");
    edges.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(edges.begin(), edges.end());
  return detail::finalize_graph(n, std::move(edges));
}

// "k0 K1 K2 ... Kk0" on one line.
inline std::string kvector_to_string(const KVector& kv) {
  std::ostringstream os;
  os << kv.k0;
  for (auto k : kv.followers) os << ' ' << k;
  return os.str();
}

inline KVector kvector_from_string(const std::string& line) {
  std::istringstream is(line);
  KVector kv;
  if (!(is >> kv.k0)) throw std::runtime_error("kvector_from_string: missing k0");
  kv.followers.resize(kv.k0);
  for (std::uint64_t j = 0; j < kv.k0; ++j)
    if (!(is >> kv.followers[j]))
      throw std::runtime_error("kvector_from_string: expected k0 follower counts");
  return kv;
}

// Degrees indexed by original vertex id (isolated vertices report 0).
inline std::vector<std::uint64_t> degrees(const HardGraph& g) {
  std::vector<std::uint64_t> d(g.n_original, 0);
  for (const auto& [i, j] : g.edges) {
    ++d[i];
    ++d[j];
  }
  return d;
}

}  // namespace plrg
