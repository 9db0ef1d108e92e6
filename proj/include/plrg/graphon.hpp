#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plrg/hard_graph.hpp"
#include "plrg/rng.hpp"

// Step-function graphons on [0, side]^2, the three normalizations (L1
// rescale, measure-preserving stretch, clique-scale zoom), cut norm, and an
// aligned cut distance. Graph-derived grids are non-negative; difference
// grids carry signed values and are flagged.

namespace plrg {

struct GraphonGrid {
  std::size_t k = 0;
  double side = 1.0;
  std::vector<double> values;  // row-major k x k, cell averages
  bool from_empty_graph = false;
  bool signed_values = false;
  bool truncated = false;

  double cell_measure() const {
    const double h = side / static_cast<double>(k);
    return h * h;
  }
  double& at(std::size_t i, std::size_t j) { return values[i * k + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * k + j]; }
  double l1_norm() const {
    double s = 0.0;
    for (double v : values) s += std::abs(v);
    return s * cell_measure();
  }
};

enum class VertexOrdering { ByValueDesc, ByIndex };

namespace detail {

// Ranks over all n vertices: non-isolated first by decreasing degree (ties by
// index), which coincides with decreasing-value order for threshold graphs.
inline std::vector<std::uint32_t> degree_order(const HardGraph& g) {
  const auto deg = degrees(g);
  std::vector<std::uint32_t> order(g.n_original);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return deg[a] != deg[b] ? deg[a] > deg[b] : a < b;
  });
  return order;
}

}  // namespace detail

inline GraphonGrid empirical_graphon(const HardGraph& g, VertexOrdering ordering, std::size_t k) {
  const std::size_t m = g.n_original;
  if (k < 1 || k > m) throw std::invalid_argument("empirical_graphon: need 1 <= k <= n");
  GraphonGrid w;
  w.k = k;
  w.side = 1.0;
  w.values.assign(k * k, 0.0);
  if (g.edges.empty()) {
    w.from_empty_graph = true;
    return w;
  }

  std::vector<std::uint32_t> rank(m);
  if (ordering == VertexOrdering::ByIndex) {
    std::iota(rank.begin(), rank.end(), 0u);
  } else {
    const auto order = detail::degree_order(g);
    for (std::size_t pos = 0; pos < m; ++pos) rank[order[pos]] = static_cast<std::uint32_t>(pos);
  }

  // Vertex r occupies [r/m, (r+1)/m); with k <= m it meets at most two cells.
  const double md = static_cast<double>(m), kd = static_cast<double>(k);
  struct Piece {
    std::size_t cell;
    double len;
  };
  auto pieces = [&](std::size_t r, Piece out[2]) -> int {
    const std::size_t lo = r * k / m;
    const std::size_t hi = std::min(k - 1, ((r + 1) * k - 1) / m);
    int cnt = 0;
    for (std::size_t c = lo; c <= hi; ++c) {
      const double a = std::max(static_cast<double>(c) / kd, static_cast<double>(r) / md);
      const double b = std::min(static_cast<double>(c + 1) / kd, static_cast<double>(r + 1) / md);
      if (b > a) out[cnt++] = {c, b - a};
    }
    return cnt;
  };

  const double k2 = kd * kd;
  Piece pu[2], pv[2];
  for (const auto& [u, v] : g.edges) {
    const int nu = pieces(rank[u], pu);
    const int nv = pieces(rank[v], pv);
    for (int a = 0; a < nu; ++a)
      for (int b = 0; b < nv; ++b) {
        const double mass = pu[a].len * pv[b].len * k2;
        w.at(pu[a].cell, pv[b].cell) += mass;
        w.at(pv[b].cell, pu[a].cell) += mass;
      }
  }
  return w;
}

inline GraphonGrid rescale_l1(const GraphonGrid& w) {
  const double l1 = w.l1_norm();
  if (!(l1 > 0.0)) throw std::domain_error("rescale_l1: zero graphon");
  GraphonGrid out = w;
  for (double& v : out.values) v /= l1;
  return out;
}

inline GraphonGrid stretch(const GraphonGrid& w) {
  const double l1 = w.l1_norm();
  if (!(l1 > 0.0)) throw std::domain_error("stretch: zero graphon");
  GraphonGrid out = w;
  out.side = w.side / std::sqrt(l1);
  return out;
}

// Zoom of the unit-square-per-vertex graphon on [0,n]^2: cell averages of
// W_n(ek0 * x, ek0 * y) on [0, window]^2, vertices by decreasing value. The
// sub-critical limit is the indicator of xy <= 1.
inline GraphonGrid stretch_by_clique(const HardGraph& g, double ek0, double window,
                                     std::size_t k) {
  if (!(ek0 > 0.0) || !(window > 0.0) || k < 1)
    throw std::invalid_argument("stretch_by_clique: need ek0 > 0, window > 0, k >= 1");
  const double span = ek0 * window;  // vertex units covered per axis
  GraphonGrid w;
  w.k = k;
  w.side = window;
  w.values.assign(k * k, 0.0);
  w.truncated = span > static_cast<double>(g.n_original);

  const std::size_t r_max =
      std::min<std::size_t>(g.n_original, static_cast<std::size_t>(std::ceil(span)));
  if (r_max == 0) return w;
  if (r_max > 20000) throw std::length_error("stretch_by_clique: window covers too many vertices");

  const auto order = detail::degree_order(g);
  std::vector<std::uint32_t> rank(g.n_original, std::numeric_limits<std::uint32_t>::max());
  for (std::size_t pos = 0; pos < r_max; ++pos) rank[order[pos]] = static_cast<std::uint32_t>(pos);
  std::vector<char> adj(r_max * r_max, 0);
  for (const auto& [u, v] : g.edges) {
    const auto ru = rank[u], rv = rank[v];
    if (ru < r_max && rv < r_max) adj[ru * r_max + rv] = adj[rv * r_max + ru] = 1;
  }

  const double cell = span / static_cast<double>(k);  // cell width in vertex units
  auto cell_range = [&](std::size_t c, std::size_t& lo, std::size_t& hi, double& a, double& b) {
    a = cell * static_cast<double>(c);
    b = cell * static_cast<double>(c + 1);
    lo = static_cast<std::size_t>(std::floor(a));
    hi = std::min(r_max, static_cast<std::size_t>(std::ceil(b)));
  };
  for (std::size_t c1 = 0; c1 < k; ++c1) {
    std::size_t lo1, hi1;
    double a1, b1;
    cell_range(c1, lo1, hi1, a1, b1);
    for (std::size_t c2 = 0; c2 < k; ++c2) {
      std::size_t lo2, hi2;
      double a2, b2;
      cell_range(c2, lo2, hi2, a2, b2);
      double mass = 0.0;
      for (std::size_t r1 = lo1; r1 < hi1; ++r1) {
        const double len1 = std::min(b1, static_cast<double>(r1 + 1)) -
                            std::max(a1, static_cast<double>(r1));
        if (!(len1 > 0.0)) continue;
        for (std::size_t r2 = lo2; r2 < hi2; ++r2) {
          if (!adj[r1 * r_max + r2]) continue;
          const double len2 = std::min(b2, static_cast<double>(r2 + 1)) -
                              std::max(a2, static_cast<double>(r2));
          if (len2 > 0.0) mass += len1 * len2;
        }
      }
      w.at(c1, c2) = mass / (cell * cell);
    }
  }
  return w;
}

// Fraction of cells whose binarized value disagrees with 1{xy <= 1} at the
// cell center; the clique-window boundary convergence diagnostic.
inline double boundary_mismatch_fraction(const GraphonGrid& w) {
  if (w.k == 0) throw std::invalid_argument("boundary_mismatch_fraction: empty grid");
  const double h = w.side / static_cast<double>(w.k);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < w.k; ++i)
    for (std::size_t j = 0; j < w.k; ++j) {
      const double x = (static_cast<double>(i) + 0.5) * h;
      const double y = (static_cast<double>(j) + 0.5) * h;
      const bool target = x * y <= 1.0;
      if ((w.at(i, j) > 0.5) != target) ++bad;
    }
  return static_cast<double>(bad) / static_cast<double>(w.k * w.k);
}

// max over block subsets S, T of |sum over S x T| * cell-measure; for step
// graphons the measurable-set optimum is attained on block unions. Gray-code
// walk over S with incremental column sums.
inline double cut_norm_exact(const GraphonGrid& w) {
  if (w.k > 16) throw std::length_error("cut_norm_exact: k > 16, use cut_norm_heuristic");
  if (w.k == 0) return 0.0;
  const std::size_t k = w.k;
  std::vector<double> colsum(k, 0.0);
  double best = 0.0;
  const std::uint64_t total = 1ull << k;
  std::uint64_t prev_gray = 0;
  for (std::uint64_t i = 1; i < total; ++i) {
    const std::uint64_t gray = i ^ (i >> 1);
    const std::uint64_t diff = gray ^ prev_gray;
    const auto bit = static_cast<std::size_t>(std::countr_zero(diff));
    const double sign = (gray & diff) ? 1.0 : -1.0;
    for (std::size_t j = 0; j < k; ++j) colsum[j] += sign * w.at(bit, j);
    prev_gray = gray;
    double pos = 0.0, neg = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (colsum[j] > 0.0) pos += colsum[j];
      else neg += colsum[j];
    }
    best = std::max({best, pos, -neg});
  }
  return best * w.cell_measure();
}

// Alternating conditional ascent from random (and deterministic) starts;
// every candidate is an actual subset-pair objective, so the result is a
// lower bound on the exact cut norm and non-decreasing in restarts.
inline double cut_norm_heuristic(const GraphonGrid& w, std::size_t restarts, std::uint64_t seed) {
  const std::size_t k = w.k;
  if (k == 0) return 0.0;
  std::vector<char> in_t(k, 1);
  std::vector<double> rowsum(k), colsum(k);
  double best = 0.0;

  auto ascend = [&](double sign, std::vector<char> t) {
    double val = -1.0;
    for (int iter = 0; iter < 100; ++iter) {
      for (std::size_t i = 0; i < k; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j)
          if (t[j]) s += w.at(i, j);
        rowsum[i] = s;
      }
      double cur = 0.0;
      std::vector<char> sset(k, 0);
      for (std::size_t i = 0; i < k; ++i)
        if (sign * rowsum[i] > 0.0) {
          sset[i] = 1;
          cur += sign * rowsum[i];
        }
      for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i)
          if (sset[i]) s += w.at(i, j);
        colsum[j] = s;
      }
      double cur2 = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        t[j] = sign * colsum[j] > 0.0 ? 1 : 0;
        if (t[j]) cur2 += sign * colsum[j];
      }
      if (cur2 <= val) break;
      val = cur2;
    }
    return std::max(val, 0.0);
  };

  for (double sign : {1.0, -1.0}) best = std::max(best, ascend(sign, in_t));
  RngStream rng(derive_key(seed, 9));
  for (std::size_t r = 0; r < restarts; ++r) {
    std::vector<char> t(k);
    for (auto& b : t) b = (rng.next_u64() & 1ull) ? 1 : 0;
    for (double sign : {1.0, -1.0}) best = std::max(best, ascend(sign, t));
  }
  return best * w.cell_measure();
}

namespace detail {

inline GraphonGrid refine_grid(const GraphonGrid& w, std::size_t k) {
  if (k % w.k != 0) throw std::invalid_argument("refine_grid: not a multiple");
  const std::size_t f = k / w.k;
  GraphonGrid out = w;
  out.k = k;
  out.values.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) out.at(i, j) = w.at(i / f, j / f);
  return out;
}

inline GraphonGrid canonical_sort(const GraphonGrid& w) {
  std::vector<double> rs(w.k, 0.0);
  for (std::size_t i = 0; i < w.k; ++i)
    for (std::size_t j = 0; j < w.k; ++j) rs[i] += w.at(i, j);
  std::vector<std::size_t> order(w.k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rs[a] != rs[b] ? rs[a] > rs[b] : a < b;
  });
  GraphonGrid out = w;
  for (std::size_t i = 0; i < w.k; ++i)
    for (std::size_t j = 0; j < w.k; ++j) out.at(i, j) = w.at(order[i], order[j]);
  return out;
}

}  // namespace detail

// Cut norm of the difference after degree-sorted canonical alignment on a
// common refinement; an upper-bound proxy for the cut distance (no infimum
// over couplings is attempted).
inline double aligned_cut_distance(const GraphonGrid& w1, const GraphonGrid& w2) {
  if (w1.k == 0 || w2.k == 0) throw std::invalid_argument("aligned_cut_distance: empty grid");
  if (std::abs(w1.side - w2.side) > 1e-9 * std::max({1.0, w1.side, w2.side}))
    throw std::invalid_argument("aligned_cut_distance: side lengths differ");
  const std::size_t k = std::lcm(w1.k, w2.k);
  if (k > 4096) throw std::length_error("aligned_cut_distance: common refinement too fine");
  const GraphonGrid a = detail::canonical_sort(detail::refine_grid(w1, k));
  const GraphonGrid b = detail::canonical_sort(detail::refine_grid(w2, k));
  GraphonGrid diff = a;
  diff.signed_values = true;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= b.values[i];
  return k <= 16 ? cut_norm_exact(diff) : cut_norm_heuristic(diff, 64, 0);
}

inline void save_grid(std::ostream& os, const GraphonGrid& w) {
  os << w.k << " " << w.side << "\n";
  char buf[32];
  for (std::size_t i = 0; i < w.k; ++i) {
    for (std::size_t j = 0; j < w.k; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", w.at(i, j));
      os << (j ? " " : "") << buf;
    }
    os << "\n";
  }
}

inline GraphonGrid load_grid(std::istream& is) {
  GraphonGrid w;
  if (!(is >> w.k >> w.side) || w.k < 1 || !(w.side > 0.0))
    throw std::runtime_error("load_grid: bad header");
  w.values.assign(w.k * w.k, 0.0);
  for (auto& v : w.values)
    if (!(is >> v)) throw std::runtime_error("load_grid: truncated grid");
  double vmax = 0.0;
  for (double v : w.values) {
    vmax = std::max(vmax, std::abs(v));
    if (v < 0.0) w.signed_values = true;
  }
  for (std::size_t i = 0; i < w.k; ++i)
    for (std::size_t j = i + 1; j < w.k; ++j)
      if (std::abs(w.at(i, j) - w.at(j, i)) > 1e-9 * (1.0 + vmax))
        throw std::runtime_error("load_grid: matrix not symmetric");
  return w;
}

}  // namespace plrg
