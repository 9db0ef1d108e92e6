#pragma once

// Experiment runner behind the CLI. A run validates its config, derives one
// sub-seed per (gamma, n) cell, dispatches to the module estimators, and
// writes a report CSV plus a JSON manifest (config echo, seed, sub-seeds,
// wall time, version, file list). CSV bytes are a pure function of the
// config; the thread count only changes the schedule, never the numbers.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "plrg/bernoulli.hpp"
#include "plrg/dist.hpp"
#include "plrg/graphex.hpp"
#include "plrg/graphon.hpp"
#include "plrg/hard_graph.hpp"
#include "plrg/height.hpp"
#include "plrg/parallel.hpp"
#include "plrg/rng.hpp"
#include "plrg/stats.hpp"

namespace plrg {

inline constexpr const char* kVersion = "1.0.0";

enum class Experiment {
  Motifs,
  EdgesVertices,
  Supercritical,
  Graphex,
  Height,
  Graphon,
  Bernoulli,
  Regimes,
};

inline constexpr std::array<const char*, 8> kExperimentNames = {
    "motifs", "edges_vertices", "supercritical", "graphex",
    "height", "graphon",        "bernoulli",     "regimes",
};

inline const char* experiment_name(Experiment e) {
  return kExperimentNames[static_cast<std::size_t>(e)];
}

inline Experiment parse_experiment(const std::string& name) {
  for (std::size_t i = 0; i < kExperimentNames.size(); ++i)
    if (name == kExperimentNames[i]) return static_cast<Experiment>(i);
  throw std::invalid_argument("unknown experiment '" + name +
                              "' (expected one of: motifs, edges_vertices, supercritical, "
                              "graphex, height, graphon, bernoulli, regimes)");
}

struct ExperimentConfig {
  Experiment experiment = Experiment::Motifs;
  double alpha = 1.5;
  std::vector<double> gamma = {1.5};
  std::vector<std::size_t> n_list = {10000};
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
  std::vector<double> x_grid = {0.25, 0.5, 0.75};
  std::string output_dir = ".";
  bool check = false;
  int threads = 0;
  // graphex-only knobs: observation time and clique threshold of the limit
  // model; ignored by the finite-n experiments.
  double graphex_t = 1.0;
  double graphex_x0 = 4.0;
};

inline std::vector<std::string> config_problems(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.reps < 1) out.push_back("reps must be >= 1");
  if (cfg.n_list.empty()) out.push_back("n_list must be non-empty");
  const std::size_t n_min = cfg.experiment == Experiment::Motifs ? 3 : 2;
  for (std::size_t n : cfg.n_list)
    if (n < n_min) out.push_back("n must be >= " + std::to_string(n_min));
  if (!(cfg.alpha > 0.0)) out.push_back("alpha must be > 0");
  if (cfg.gamma.empty()) out.push_back("gamma list must be non-empty");
  for (double g : cfg.gamma)
    if (!(g > 0.0)) out.push_back("gamma must be > 0");
  if (cfg.x_grid.empty()) out.push_back("x_grid must be non-empty");
  for (double x : cfg.x_grid)
    if (!(x > 0.0) || !(x < 1.0)) out.push_back("x_grid values must lie in (0,1)");
  if (cfg.output_dir.empty()) out.push_back("output_dir must be non-empty");
  if (cfg.threads < 0) out.push_back("threads must be >= 0");

  switch (cfg.experiment) {
    case Experiment::Height:
      for (double g : cfg.gamma)
        if (!(g < 2.0)) out.push_back("height experiment needs gamma < 2 (growing clique)");
      for (double x : cfg.x_grid)
        if (x > 0.8) out.push_back("height experiment needs x_grid <= 0.8");
      break;
    case Experiment::Supercritical:
      for (double g : cfg.gamma)
        if (!(g > 2.0)) out.push_back("supercritical experiment needs gamma > 2");
      break;
    case Experiment::Bernoulli:
      for (double g : cfg.gamma)
        if (!(g > 2.0)) out.push_back("bernoulli experiment needs gamma > 2");
      if (!(cfg.alpha > 1.0))
        out.push_back("bernoulli experiment needs alpha > 1 (integrable weights)");
      break;
    case Experiment::Graphex:
      if (!(cfg.graphex_t > 0.0)) out.push_back("graphex t must be > 0");
      if (!(cfg.graphex_x0 > 1.0)) out.push_back("graphex x0 must be > 1");
      break;
    default:
      break;
  }
  return out;
}

// -- CSV ---------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "experiment,event,alpha,gamma,n,reps,estimate,se,asymptote,ratio";

struct CsvRow {
  std::string event;
  double alpha = 0.0;
  double gamma = 0.0;
  std::uint64_t n = 0;
  std::uint64_t reps = 0;
  double estimate = 0.0;
  double se = 0.0;
  double asymptote = 0.0;
  double ratio = 0.0;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline void write_csv(std::ostream& os, Experiment e, const std::vector<CsvRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << experiment_name(e) << ',' << r.event << ',' << format_double(r.alpha) << ','
       << format_double(r.gamma) << ',' << r.n << ',' << r.reps << ','
       << format_double(r.estimate) << ',' << format_double(r.se) << ','
       << format_double(r.asymptote) << ',' << format_double(r.ratio) << '\n';
  }
}

inline double safe_ratio(double estimate, double reference) {
  return reference > 0.0 ? estimate / reference : std::numeric_limits<double>::quiet_NaN();
}

inline CsvRow row_from_report(const EstimateReport& r) {
  return {r.event, r.alpha, r.gamma, r.n, r.reps, r.mc_mean, r.mc_se, r.asymptote, r.ratio};
}

// -- Plot data ----------------------------------------------------------

enum class PlotKind { GraphonHeatmap, BoundaryCurve, CovMatrix };

inline PlotKind parse_plot_kind(const std::string& s) {
  if (s == "graphon_heatmap") return PlotKind::GraphonHeatmap;
  if (s == "boundary_curve") return PlotKind::BoundaryCurve;
  if (s == "cov_matrix") return PlotKind::CovMatrix;
  throw std::invalid_argument("emit_plot_data: unknown kind '" + s + "'");
}

inline void emit_plot_data(std::ostream& os, const GraphonGrid& w, PlotKind kind) {
  if (kind != PlotKind::GraphonHeatmap)
    throw std::invalid_argument("emit_plot_data: grid reports serialize as graphon_heatmap only");
  save_grid(os, w);
}

// Rows (x, h_hat, 1/x): the estimated boundary next to its reference curve.
inline void emit_plot_data(std::ostream& os, const BoundaryReport& r, PlotKind kind) {
  if (kind != PlotKind::BoundaryCurve)
    throw std::invalid_argument("emit_plot_data: boundary reports serialize as boundary_curve only");
  for (const auto& row : r.rows)
    os << format_double(row.x) << ' ' << format_double(row.h_hat) << ' '
       << format_double(row.h_ref) << '\n';
}

// Rows (x, y, emp_cov, target_cov) over all grid pairs.
inline void emit_plot_data(std::ostream& os, const MomentSummary& ms, PlotKind kind) {
  if (kind != PlotKind::CovMatrix)
    throw std::invalid_argument("emit_plot_data: covariance reports serialize as cov_matrix only");
  const std::size_t g = ms.x_grid.size();
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j)
      os << format_double(ms.x_grid[i]) << ' ' << format_double(ms.x_grid[j]) << ' '
         << format_double(ms.emp_cov[i * g + j]) << ' ' << format_double(ms.target_cov[i * g + j])
         << '\n';
}

// -- Run plumbing --------------------------------------------------------

struct RunOutput {
  std::vector<CsvRow> rows;
  std::vector<std::string> files;
  std::vector<std::string> check_failures;
  nlohmann::json sub_seeds = nlohmann::json::object();
};

namespace detail {

// Sub-seed for one (gamma, n) cell. Modules split further by replicate, so
// distinct cells never share a counter stream.
inline std::uint64_t cell_seed(const ExperimentConfig& cfg, std::size_t gi, std::size_t ni) {
  return derive_key(cfg.seed, 1000 + static_cast<std::uint64_t>(cfg.experiment), gi + 1, ni + 1);
}

inline std::string cell_label(double gamma, std::size_t n) {
  return "gamma" + format_double(gamma) + "_n" + std::to_string(n);
}

template <typename Body>
inline void write_file(const ExperimentConfig& cfg, RunOutput& out, const std::string& name,
                       Body&& body) {
  const auto path = std::filesystem::path(cfg.output_dir) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file " + path.string());
  body(os);
  if (!os) throw std::runtime_error("write failed for " + path.string());
  out.files.push_back(path.string());
}

inline void note_check(const ExperimentConfig& cfg, RunOutput& out, bool ok,
                       const std::string& what) {
  if (cfg.check && !ok) out.check_failures.push_back(what);
}

// -- motifs --------------------------------------------------------------

inline void run_motifs(const ExperimentConfig& cfg, RunOutput& out) {
  constexpr std::array<MotifEvent, 8> events = {
      MotifEvent::EdgePresent,  MotifEvent::TwoStar,        MotifEvent::Path2,
      MotifEvent::Triangle,     MotifEvent::EdgeVacant2,    MotifEvent::VacantTriangle,
      MotifEvent::OneEdgeTriple, MotifEvent::NonIsolatedVertex,
  };
  for (std::size_t gi = 0; gi < cfg.gamma.size(); ++gi) {
    const double g = cfg.gamma[gi];
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const std::size_t n = cfg.n_list[ni];
      const std::uint64_t sub = cell_seed(cfg, gi, ni);
      out.sub_seeds[cell_label(g, n)] = sub;
      EstimateReport edge_rep, noniso_rep;
      for (MotifEvent e : events) {
        auto rep = motif_mc(e, cfg.alpha, g, n, cfg.reps, sub, cfg.threads);
        if (e == MotifEvent::EdgePresent) edge_rep = rep;
        if (e == MotifEvent::NonIsolatedVertex) noniso_rep = rep;
        out.rows.push_back(row_from_report(rep));
      }
      if (cfg.check) {
        // Exact finite-n oracles: P(edge) = c(1 - ln c) and the single-vertex
        // non-isolation quadrature, both reachable through the public modes.
        const double nn = static_cast<double>(n);
        const double c = 1.0 / (std::pow(nn, g) * std::log(nn));
        const double edge_exact =
            c < 1.0 ? c * (1.0 - std::log(c)) : 1.0;
        note_check(cfg, out, std::abs(edge_rep.mc_mean - edge_exact) <= 6.0 * edge_rep.mc_se + 1e-12,
                   "motifs: edge_present off its exact value at " + cell_label(g, n));
        const double noniso_exact =
            expected_vertices(cfg.alpha, g, n, EstimateMode::Exact) / nn;
        note_check(cfg, out,
                   std::abs(noniso_rep.mc_mean - noniso_exact) <= 6.0 * noniso_rep.mc_se + 1e-12,
                   "motifs: nonisolated_vertex off its exact value at " + cell_label(g, n));
      }
    }
  }
}

// -- edges_vertices -------------------------------------------------------

inline void run_edges_vertices(const ExperimentConfig& cfg, RunOutput& out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t gi = 0; gi < cfg.gamma.size(); ++gi) {
    const double g = cfg.gamma[gi];
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const std::size_t n = cfg.n_list[ni];
      const std::uint64_t sub = cell_seed(cfg, gi, ni);
      out.sub_seeds[cell_label(g, n)] = sub;

      const double e_exact = expected_edges(cfg.alpha, g, n, EstimateMode::Exact);
      const double e_asym = expected_edges(cfg.alpha, g, n, EstimateMode::Asymptotic);
      const double e_mc =
          expected_edges(cfg.alpha, g, n, EstimateMode::MC, cfg.reps, sub, cfg.threads);
      out.rows.push_back(
          {"expected_edges", cfg.alpha, g, n, cfg.reps, e_exact, 0.0, e_asym, safe_ratio(e_exact, e_asym)});
      out.rows.push_back(
          {"expected_edges_mc", cfg.alpha, g, n, cfg.reps, e_mc, nan, e_exact, safe_ratio(e_mc, e_exact)});

      const double v_exact = expected_vertices(cfg.alpha, g, n, EstimateMode::Exact);
      const double v_asym = expected_vertices(cfg.alpha, g, n, EstimateMode::Asymptotic);
      const double v_mc =
          expected_vertices(cfg.alpha, g, n, EstimateMode::MC, cfg.reps, sub, cfg.threads);
      out.rows.push_back({"expected_vertices", cfg.alpha, g, n, cfg.reps, v_exact, 0.0, v_asym,
                          safe_ratio(v_exact, v_asym)});
      out.rows.push_back({"expected_vertices_mc", cfg.alpha, g, n, cfg.reps, v_mc, nan, v_exact,
                          safe_ratio(v_mc, v_exact)});

      if (cfg.reps >= 1000) {
        note_check(cfg, out, std::abs(e_mc - e_exact) <= 0.2 * e_exact + 1e-9,
                   "edges_vertices: edge count MC off its exact mean at " + cell_label(g, n));
        note_check(cfg, out, std::abs(v_mc - v_exact) <= 0.2 * v_exact + 1e-9,
                   "edges_vertices: vertex count MC off its exact mean at " + cell_label(g, n));
      }
    }
  }
}

// -- supercritical ---------------------------------------------------------

inline void run_supercritical(const ExperimentConfig& cfg, RunOutput& out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t gi = 0; gi < cfg.gamma.size(); ++gi) {
    const double g = cfg.gamma[gi];
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const std::size_t n = cfg.n_list[ni];
      const std::uint64_t sub = cell_seed(cfg, gi, ni);
      out.sub_seeds[cell_label(g, n)] = sub;

      const auto rep = supercritical_clique_stats(cfg.alpha, g, n, cfg.reps, sub, cfg.threads);
      out.rows.push_back({"p_clique_ge1", cfg.alpha, g, n, cfg.reps, rep.p_ge1_exact, 0.0,
                          rep.p_ge1_asymptote, safe_ratio(rep.p_ge1_exact, rep.p_ge1_asymptote)});
      out.rows.push_back(
          {"p_clique_eq1", cfg.alpha, g, n, cfg.reps, rep.p_eq1_exact, 0.0, nan, nan});
      out.rows.push_back(row_from_report(rep.star));
      out.rows.push_back(row_from_report(rep.star_one_follower));
      const double p_nonempty = static_cast<double>(rep.nonempty_count) / static_cast<double>(cfg.reps);
      out.rows.push_back({"nonempty_fraction", cfg.alpha, g, n, cfg.reps, p_nonempty,
                          std::sqrt(std::max(0.0, p_nonempty * (1.0 - p_nonempty) /
                                                      static_cast<double>(cfg.reps))),
                          nan, nan});
      for (std::size_t i = 0; i < rep.configs.size() && i < 5; ++i) {
        const auto& cc = rep.configs[i];
        const double p = static_cast<double>(cc.count) / static_cast<double>(cfg.reps);
        out.rows.push_back({"config_v" + std::to_string(cc.vertices) + "_k" +
                                std::to_string(cc.clique),
                            cfg.alpha, g, n, cfg.reps, p,
                            std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(cfg.reps))),
                            nan, nan});
      }

      note_check(cfg, out, rep.p_eq1_exact <= rep.p_ge1_exact + 1e-15,
                 "supercritical: P(K=1) exceeds P(K>=1) at " + cell_label(g, n));
      note_check(cfg, out, rep.star_one_follower.mc_mean <= rep.star.mc_mean + 1e-15,
                 "supercritical: one-follower event not a sub-event at " + cell_label(g, n));
      note_check(cfg, out, rep.nonempty_count > 0,
                 "supercritical: no non-empty replicates at " + cell_label(g, n));
      if (rep.nonempty_count >= 50)
        note_check(cfg, out, rep.modal_vertices == 2 && rep.modal_clique == 1,
                   "supercritical: modal non-empty configuration is not (2,1) at " + cell_label(g, n));
    }
  }
}

// -- graphex ----------------------------------------------------------------

inline void run_graphex(const ExperimentConfig& cfg, RunOutput& out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double t = cfg.graphex_t;
  const double x0 = cfg.graphex_x0;
  const std::uint64_t sub = cell_seed(cfg, 0, 0);
  out.sub_seeds["graphex"] = sub;

  struct Acc {
    MeanAccumulator k0, followers, nested;
    std::array<std::uint64_t, 5> pmf{};
    void merge(const Acc& o) {
      k0.merge(o.k0);
      followers.merge(o.followers);
      nested.merge(o.nested);
      for (std::size_t i = 0; i < pmf.size(); ++i) pmf[i] += o.pmf[i];
    }
  };
  const double s = t / 2.0;
  Acc acc = parallel_reduce<Acc>(
      cfg.reps, cfg.threads,
      [&](std::uint64_t b, std::uint64_t e) {
        Acc a;
        for (std::uint64_t r = b; r < e; ++r) {
          const auto gph = sample_graphex(t, x0, cfg.alpha, replicate_key(sub, r));
          a.k0.add(static_cast<double>(gph.k0()));
          const auto kv = to_kvector(gph);
          a.followers.add(static_cast<double>(kv.follower_total()));
          if (gph.k0() < a.pmf.size()) ++a.pmf[gph.k0()];
          a.nested.add(static_cast<double>(nested_subgraph(gph, s).k0()));
        }
        return a;
      },
      [](Acc& a, const Acc& b) { a.merge(b); });

  const double lambda = t * std::pow(x0, -cfg.alpha / 2.0);
  const double reps_d = static_cast<double>(cfg.reps);
  out.rows.push_back({"clique_count_mean", cfg.alpha, nan, 0, cfg.reps, acc.k0.mean,
                      acc.k0.se_of_mean(), lambda, safe_ratio(acc.k0.mean, lambda)});
  double log_pk = -lambda;  // ln Poisson(lambda) pmf at k, updated in the loop
  for (std::size_t k = 0; k < acc.pmf.size(); ++k) {
    if (k > 0) log_pk += std::log(lambda / static_cast<double>(k));
    const double target = std::exp(log_pk);
    const double p = static_cast<double>(acc.pmf[k]) / reps_d;
    out.rows.push_back({"clique_count_pmf_" + std::to_string(k), cfg.alpha, nan, 0, cfg.reps, p,
                        std::sqrt(std::max(0.0, p * (1.0 - p) / reps_d)), target,
                        safe_ratio(p, target)});
  }
  out.rows.push_back({"follower_total_mean", cfg.alpha, nan, 0, cfg.reps, acc.followers.mean,
                      acc.followers.se_of_mean(), nan, nan});
  out.rows.push_back({"nested_clique_mean", cfg.alpha, nan, 0, cfg.reps, acc.nested.mean,
                      acc.nested.se_of_mean(), lambda * s / t,
                      safe_ratio(acc.nested.mean, lambda * s / t)});

  // The nested subgraph at time s is marginally the time-s graph, so its
  // clique count is Poisson(lambda s / t) exactly; both gates are exact laws.
  note_check(cfg, out, std::abs(acc.k0.mean - lambda) <= 6.0 * acc.k0.se_of_mean() + 1e-12,
             "graphex: clique count mean off Poisson intensity");
  note_check(cfg, out,
             std::abs(acc.nested.mean - lambda * s / t) <= 6.0 * acc.nested.se_of_mean() + 1e-12,
             "graphex: nested clique count mean off thinned intensity");
  const double p0 = static_cast<double>(acc.pmf[0]) / reps_d;
  const double p0_se = std::sqrt(std::max(0.0, p0 * (1.0 - p0) / reps_d));
  note_check(cfg, out, std::abs(p0 - std::exp(-lambda)) <= 6.0 * p0_se + 1e-12,
             "graphex: empty-clique mass off exp(-lambda)");
}

// -- height -------------------------------------------------------------------

inline void run_height(const ExperimentConfig& cfg, RunOutput& out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const TailModel model = TailModel::pareto(cfg.alpha);
  for (std::size_t gi = 0; gi < cfg.gamma.size(); ++gi) {
    const double g = cfg.gamma[gi];
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const std::size_t n = cfg.n_list[ni];
      const std::uint64_t sub = cell_seed(cfg, gi, ni);
      out.sub_seeds[cell_label(g, n)] = sub;
      const double a_n = scaling_a_n(cfg.alpha, g, n);

      const auto fs = fluctuation_summary(model, n, a_n, cfg.x_grid, cfg.reps, sub, cfg.threads);
      const std::size_t gsz = cfg.x_grid.size();
      for (std::size_t i = 0; i < gsz; ++i) {
        const double x = cfg.x_grid[i];
        const std::size_t d = i * gsz + i;
        out.rows.push_back({"total_variance_at_" + format_double(x), cfg.alpha, g, n, cfg.reps,
                            fs.total.emp_cov[d], nan, fs.total.target_cov[d],
                            safe_ratio(fs.total.emp_cov[d], fs.total.target_cov[d])});
        out.rows.push_back({"bridge_variance_at_" + format_double(x), cfg.alpha, g, n, cfg.reps,
                            fs.bridge.emp_cov[d], nan, fs.bridge.target_cov[d],
                            safe_ratio(fs.bridge.emp_cov[d], fs.bridge.target_cov[d])});
        out.rows.push_back({"quantile_variance_at_" + format_double(x), cfg.alpha, g, n, cfg.reps,
                            fs.quantile.emp_cov[d], nan, fs.quantile.target_cov[d],
                            safe_ratio(fs.quantile.emp_cov[d], fs.quantile.target_cov[d])});
        const double mean_target = fs.sigma2 * (theta_n(1.0 - x, model, a_n) - 1.0);
        out.rows.push_back({"mean_height_at_" + format_double(x), cfg.alpha, g, n, cfg.reps,
                            fs.raw_mean_h[i], nan, mean_target,
                            safe_ratio(fs.raw_mean_h[i], mean_target)});
      }
      const std::string suffix = "_gamma" + format_double(g) + "_n" + std::to_string(n) + ".txt";
      write_file(cfg, out, "height_cov_total" + suffix,
                 [&](std::ostream& os) { emit_plot_data(os, fs.total, PlotKind::CovMatrix); });
      write_file(cfg, out, "height_cov_bridge" + suffix,
                 [&](std::ostream& os) { emit_plot_data(os, fs.bridge, PlotKind::CovMatrix); });
      write_file(cfg, out, "height_cov_quantile" + suffix,
                 [&](std::ostream& os) { emit_plot_data(os, fs.quantile, PlotKind::CovMatrix); });

      const auto qb = quantile_bridge_check(model, n, a_n, cfg.x_grid, cfg.reps, sub, cfg.threads);
      out.rows.push_back({"quantile_bridge_dkw_fraction", cfg.alpha, g, n, cfg.reps,
                          qb.frac_within_dkw, nan, nan, nan});

      const auto br = boundary_profile(model, n, a_n, cfg.x_grid, cfg.reps, sub, cfg.threads);
      for (const auto& row : br.rows)
        out.rows.push_back({"boundary_height_at_" + format_double(row.x), cfg.alpha, g, n,
                            cfg.reps, row.h_hat, nan, row.h_ref, row.ratio});
      write_file(cfg, out, "boundary_curve" + suffix,
                 [&](std::ostream& os) { emit_plot_data(os, br, PlotKind::BoundaryCurve); });

      note_check(cfg, out, fs.max_identity_rel_err < 1e-9,
                 "height: decomposition identity violated at " + cell_label(g, n));
      if (cfg.reps >= 200)
        note_check(cfg, out, qb.frac_within_dkw >= 0.95,
                   "height: quantile bridge escapes its band too often at " + cell_label(g, n));
      if (cfg.reps >= 2000) {
        const std::size_t d0 = 0;
        const double rel = std::abs(fs.total.emp_cov[d0] - fs.total.target_cov[d0]) /
                           fs.total.target_cov[d0];
        note_check(cfg, out, rel <= 0.35,
                   "height: total variance far from its limit at " + cell_label(g, n));
      }
    }
  }
}

// -- graphon ---------------------------------------------------------------

// Cell averages of the limit kernel 1{x y <= 1} on [0, side]^2.
inline GraphonGrid clique_limit_grid(std::size_t k, double side) {
  if (k < 1 || !(side > 0.0)) throw std::invalid_argument("clique_limit_grid: bad parameters");
  GraphonGrid w;
  w.k = k;
  w.side = side;
  w.values.assign(k * k, 0.0);
  const double h = side / static_cast<double>(k);
  // integral over [a1,b1] of |{y in [a2,b2] : x y <= 1}| dx
  auto strip = [](double a1, double b1, double a2, double b2) {
    double total = 0.0;
    const double x_full = b2 > 0.0 ? 1.0 / b2 : b1;  // below: the whole column fits
    const double hi_full = std::min(b1, x_full);
    if (hi_full > a1) total += (b2 - a2) * (hi_full - a1);
    const double x_zero = a2 > 0.0 ? 1.0 / a2 : b1 + 1.0;  // above: nothing fits
    const double lo = std::max(a1, x_full);
    const double hi = std::min(b1, x_zero);
    if (hi > lo) total += std::log(hi / lo) - a2 * (hi - lo);
    return total;
  };
  for (std::size_t i = 0; i < k; ++i) {
    const double a1 = h * static_cast<double>(i), b1 = a1 + h;
    for (std::size_t j = 0; j <= i; ++j) {
      const double a2 = h * static_cast<double>(j), b2 = a2 + h;
      const double v = strip(a1, b1, a2, b2) / (h * h);
      w.values[i * k + j] = w.values[j * k + i] = v;
    }
  }
  return w;
}

inline void run_graphon(const ExperimentConfig& cfg, RunOutput& out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const TailModel model = TailModel::pareto(cfg.alpha);
  constexpr double kWindow = 3.0;  // clique-scale zoom, in units of E[K_{n,0}]
  for (std::size_t gi = 0; gi < cfg.gamma.size(); ++gi) {
    const double g = cfg.gamma[gi];
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const std::size_t n = cfg.n_list[ni];
      const std::uint64_t sub = cell_seed(cfg, gi, ni);
      out.sub_seeds[cell_label(g, n)] = sub;
      const double a_n = scaling_a_n(cfg.alpha, g, n);

      const auto sample = sample_iid(model, n, sub);
      const auto graph = build_hard_graph(sample, a_n);
      const std::size_t k = std::min<std::size_t>(64, n);
      const auto w = empirical_graphon(graph, VertexOrdering::ByValueDesc, k);

      const double nn = static_cast<double>(n);
      const double density_exact =
          expected_edges(cfg.alpha, g, n, EstimateMode::Exact) * 2.0 / (nn * nn);
      out.rows.push_back({"graphon_l1", cfg.alpha, g, n, 1, w.l1_norm(), nan, density_exact,
                          safe_ratio(w.l1_norm(), density_exact)});
      const std::string suffix = "_gamma" + format_double(g) + "_n" + std::to_string(n) + ".txt";
      write_file(cfg, out, "graphon_heatmap" + suffix,
                 [&](std::ostream& os) { emit_plot_data(os, w, PlotKind::GraphonHeatmap); });

      if (w.l1_norm() > 0.0) {
        const auto ws = stretch(w);
        out.rows.push_back(
            {"stretch_side", cfg.alpha, g, n, 1, ws.side, nan, nan, nan});
      }

      const double ek0 = nn * model.tail(std::sqrt(a_n));
      out.rows.push_back({"expected_clique_count", cfg.alpha, g, n, 1, ek0, nan, nan, nan});
      const auto wc = stretch_by_clique(graph, ek0, kWindow, k);
      const double mismatch = boundary_mismatch_fraction(wc);
      out.rows.push_back({"boundary_mismatch", cfg.alpha, g, n, 1, mismatch, nan, nan, nan});
      out.rows.push_back({"stretch_truncated", cfg.alpha, g, n, 1, wc.truncated ? 1.0 : 0.0, nan,
                          nan, nan});
      const auto limit = clique_limit_grid(k, kWindow);
      const double dist = aligned_cut_distance(wc, limit);
      out.rows.push_back({"clique_cut_distance", cfg.alpha, g, n, 1, dist, nan, nan, nan});
      write_file(cfg, out, "graphon_clique_heatmap" + suffix,
                 [&](std::ostream& os) { emit_plot_data(os, wc, PlotKind::GraphonHeatmap); });

      note_check(cfg, out,
                 std::abs(w.l1_norm() - 2.0 * static_cast<double>(graph.edge_count()) / (nn * nn)) <=
                     1e-12,
                 "graphon: L1 norm disagrees with the edge count at " + cell_label(g, n));
      // Single-replicate gates, only where the window holds a real clique.
      if (ek0 >= 20.0) {
        note_check(cfg, out, mismatch <= 0.25,
                   "graphon: clique-window boundary mismatch too large at " + cell_label(g, n));
        note_check(cfg, out, dist <= 1.5,
                   "graphon: clique-window cut distance too large at " + cell_label(g, n));
      }
    }
  }
}

// -- bernoulli ----------------------------------------------------------------

inline constexpr std::size_t kEmptyGraphNCap = 1000;
inline constexpr std::size_t kEmptyGraphRepCap = 500;
inline constexpr std::size_t kPartialIntegralNCap = 2000;

inline void run_bernoulli(const ExperimentConfig& cfg, RunOutput& out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double alphaprime = 1.0 / cfg.alpha;
  for (std::size_t gi = 0; gi < cfg.gamma.size(); ++gi) {
    const double g = cfg.gamma[gi];
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const std::size_t n = cfg.n_list[ni];
      const std::uint64_t sub = cell_seed(cfg, gi, ni);
      out.sub_seeds[cell_label(g, n)] = sub;

      const auto noniso =
          mc_nonisolated_given_no_clique(cfg.alpha, g, n, cfg.reps, sub, cfg.threads);
      out.rows.push_back(row_from_report(noniso));

      // The empty-graph scan touches all vertex pairs of sparse replicates,
      // so this sub-experiment runs on a capped instance.
      const std::size_t n_e = std::min(n, kEmptyGraphNCap);
      const std::size_t reps_e = std::min(cfg.reps, kEmptyGraphRepCap);
      const auto empty = mc_empty_graph(cfg.alpha, g, n_e, reps_e, sub, cfg.threads);
      out.rows.push_back(row_from_report(empty));

      const auto lone = lone_clique_follower_stats(cfg.alpha, g, n, cfg.reps, sub, cfg.threads);
      out.rows.push_back({"lone_clique_edge_event", cfg.alpha, g, n, cfg.reps, lone.p_event,
                          lone.p_event_se, nan, nan});
      out.rows.push_back({"lone_clique_modal_follower_count", cfg.alpha, g, n, cfg.reps,
                          static_cast<double>(lone.modal_count), nan, nan, nan});
      out.rows.push_back({"lone_clique_mass_at_one", cfg.alpha, g, n, cfg.reps, lone.p_mass_1,
                          nan, nan, nan});

      const std::size_t n_p = std::min(n, kPartialIntegralNCap);
      for (double x : cfg.x_grid) {
        const auto part = rescaled_graphon_partial_integral(alphaprime, alphaprime, n_p, x, x, sub);
        out.rows.push_back({"partial_integral_at_" + format_double(x), cfg.alpha, g, n_p, 1,
                            part.value, nan, part.target, safe_ratio(part.value, part.target)});
      }
      const auto whole = rescaled_graphon_partial_integral(alphaprime, alphaprime, n_p, 1.0, 1.0, sub);
      out.rows.push_back({"partial_integral_at_1", cfg.alpha, g, n_p, 1, whole.value, nan,
                          whole.target, safe_ratio(whole.value, whole.target)});

      if (cfg.check) {
        // Hard edges are kept by every coin, so they embed in the Bernoulli
        // graph built from the same values and threshold.
        const std::size_t n_c = std::min<std::size_t>(n, 500);
        const auto sample_c = sample_iid(TailModel::pareto(cfg.alpha), n_c, derive_key(sub, 77));
        const double a_c = scaling_a_n(cfg.alpha, g, n_c);
        const auto hard = build_hard_graph(sample_c, a_c);
        const auto ber = build_bernoulli_graph(sample_c, a_c, derive_key(sub, 78));
        const bool subset =
            std::includes(ber.edges.begin(), ber.edges.end(), hard.edges.begin(), hard.edges.end());
        note_check(cfg, out, subset,
                   "bernoulli: hard edges missing from the Bernoulli graph at " + cell_label(g, n));
        note_check(cfg, out, whole.value == 1.0,
                   "bernoulli: full partial integral not normalized at " + cell_label(g, n));
        note_check(cfg, out,
                   noniso.mc_mean >= 0.0 && noniso.mc_mean <= 1.0 && std::isfinite(noniso.mc_se),
                   "bernoulli: non-isolation estimate outside [0,1] at " + cell_label(g, n));
        if (std::isfinite(empty.asymptote))
          note_check(cfg, out, empty.mc_mean >= empty.asymptote - 6.0 * empty.mc_se - 1e-12,
                     "bernoulli: empty-graph estimate below its lower bound at " + cell_label(g, n));
      }
    }
  }
}

// -- regimes ---------------------------------------------------------------

inline void run_regimes(const ExperimentConfig& cfg, RunOutput& out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const TailModel model = TailModel::pareto(cfg.alpha);
  for (double g : cfg.gamma) {
    const auto rr = classify_regime(model, g);
    std::string name;
    switch (rr.tag) {
      case Regime::SubCritical: name = "subcritical"; break;
      case Regime::Critical: name = "critical"; break;
      case Regime::SuperCritical: name = "supercritical"; break;
    }
    if (rr.indeterminate) name += "_indeterminate";
    // Trend statistic v(n) = n * tail(sqrt(a_n)) at the ends of the scan.
    auto v_at = [&](std::size_t n) {
      return static_cast<double>(n) * model.tail(std::sqrt(scaling_a_n(cfg.alpha, g, n)));
    };
    const double v_lo = v_at(std::size_t{1} << 10);
    const double v_hi = v_at(std::size_t{1} << 20);
    out.rows.push_back({name, cfg.alpha, g, std::size_t{1} << 20, 1, v_hi, nan, nan, v_hi / v_lo});

    if (cfg.check) {
      const bool expect_sub = g < 2.0;
      const bool got_sub = rr.tag == Regime::SubCritical;
      note_check(cfg, out, expect_sub == got_sub && rr.tag != Regime::Critical,
                 "regimes: classification disagrees with the closed form at gamma " +
                     format_double(g));
    }
  }
}

}  // namespace detail

// Runs the experiment and fills rows, aux files, sub-seeds, and any --check
// failures. Throws on invalid parameters (std::logic_error family) and on
// numeric or I/O failure (std::runtime_error family).
inline RunOutput run_experiment(const ExperimentConfig& cfg) {
  RunOutput out;
  std::filesystem::create_directories(cfg.output_dir);
  switch (cfg.experiment) {
    case Experiment::Motifs: detail::run_motifs(cfg, out); break;
    case Experiment::EdgesVertices: detail::run_edges_vertices(cfg, out); break;
    case Experiment::Supercritical: detail::run_supercritical(cfg, out); break;
    case Experiment::Graphex: detail::run_graphex(cfg, out); break;
    case Experiment::Height: detail::run_height(cfg, out); break;
    case Experiment::Graphon: detail::run_graphon(cfg, out); break;
    case Experiment::Bernoulli: detail::run_bernoulli(cfg, out); break;
    case Experiment::Regimes: detail::run_regimes(cfg, out); break;
  }
  return out;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["alpha"] = cfg.alpha;
  j["gamma"] = cfg.gamma;
  j["n"] = cfg.n_list;
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  j["x_grid"] = cfg.x_grid;
  j["output_dir"] = cfg.output_dir;
  j["check"] = cfg.check;
  j["threads"] = cfg.threads;
  if (cfg.experiment == Experiment::Graphex) {
    j["t"] = cfg.graphex_t;
    j["x0"] = cfg.graphex_x0;
  }
  return j;
}

// Fills cfg from a JSON object with the same keys the CLI flags use. Scalars
// are accepted where lists are expected. Unknown keys are rejected so config
// typos fail loudly.
inline void apply_json_config(ExperimentConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config JSON must be an object");
  auto as_doubles = [](const nlohmann::json& v) {
    std::vector<double> out;
    if (v.is_array())
      for (const auto& e : v) out.push_back(e.get<double>());
    else
      out.push_back(v.get<double>());
    return out;
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") cfg.experiment = parse_experiment(value.get<std::string>());
    else if (key == "alpha") cfg.alpha = value.get<double>();
    else if (key == "gamma") cfg.gamma = as_doubles(value);
    else if (key == "n") {
      cfg.n_list.clear();
      if (value.is_array())
        for (const auto& e : value) cfg.n_list.push_back(e.get<std::size_t>());
      else
        cfg.n_list.push_back(value.get<std::size_t>());
    } else if (key == "reps") cfg.reps = value.get<std::size_t>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "x_grid") cfg.x_grid = as_doubles(value);
    else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
    else if (key == "check") cfg.check = value.get<bool>();
    else if (key == "threads") cfg.threads = value.get<int>();
    else if (key == "t") cfg.graphex_t = value.get<double>();
    else if (key == "x0") cfg.graphex_x0 = value.get<double>();
    else throw std::invalid_argument("config JSON: unknown key '" + key + "'");
  }
}

// Exit codes: 0 ok, 1 invalid config, 2 numeric or I/O failure, 3 check
// failure. Diagnostics go to stderr; the CSV and manifest land in output_dir.
inline int run(const ExperimentConfig& cfg) {
  const auto problems = config_problems(cfg);
  if (!problems.empty()) {
    for (const auto& p : problems) std::fprintf(stderr, "config error: %s\n", p.c_str());
    return 1;
  }
  const auto t0 = std::chrono::steady_clock::now();
  RunOutput out;
  std::filesystem::path csv_path;
  try {
    out = run_experiment(cfg);
    csv_path = std::filesystem::path(cfg.output_dir) /
               (std::string(experiment_name(cfg.experiment)) + ".csv");
    {
      std::ofstream os(csv_path);
      if (!os) throw std::runtime_error("cannot open output file " + csv_path.string());
      write_csv(os, cfg.experiment, out.rows);
      if (!os) throw std::runtime_error("write failed for " + csv_path.string());
    }
    out.files.insert(out.files.begin(), csv_path.string());

    const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = config_to_json(cfg);
    manifest["seed"] = cfg.seed;
    manifest["sub_seeds"] = out.sub_seeds;
    manifest["wall_ms"] = wall_ms;
    manifest["files"] = out.files;
    manifest["check_failures"] = out.check_failures;
    const auto mpath = std::filesystem::path(cfg.output_dir) /
                       (std::string(experiment_name(cfg.experiment)) + "_manifest.json");
    std::ofstream ms(mpath);
    if (!ms) throw std::runtime_error("cannot open output file " + mpath.string());
    ms << manifest.dump(2) << '\n';
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return 2;
  }
  if (cfg.check && !out.check_failures.empty()) {
    for (const auto& f : out.check_failures)
      std::fprintf(stderr, "check failed: %s\n", f.c_str());
    return 3;
  }
  return 0;
}

}  // namespace plrg
