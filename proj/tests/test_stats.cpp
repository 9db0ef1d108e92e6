#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plrg/stats.hpp"

namespace {

using namespace plrg;
using boost::math::quadrature::gauss_kronrod;

double edge_constant(double gamma, std::size_t n) {
  return 1.0 / (std::pow(static_cast<double>(n), gamma) * std::log(static_cast<double>(n)));
}

// Independent integration of the three-vertex motif laws, conditioning on the
// hub value. For a path both leaves just need u < c/u2; the open wedge
// additionally keeps the leaf product at or above c.
double path2_oracle(double c) {
  auto f = [&](double u2) {
    const double t = std::min(1.0, c / u2);
    return t * t;
  };
  return c + gauss_kronrod<double, 31>::integrate(f, c, 1.0, 12, 1e-12);
}

double twostar_oracle(double c) {
  auto open_leaf_mass = [&](double t) {
    // P(u1 < t, u3 < t, u1 u3 >= c), zero once t^2 <= c
    if (t * t <= c) return 0.0;
    return t * t - c - c * std::log(t * t / c);
  };
  auto f = [&](double u2) { return open_leaf_mass(std::min(1.0, c / u2)); };
  return c * open_leaf_mass(1.0) +
         gauss_kronrod<double, 31>::integrate(f, c, std::sqrt(c), 12, 1e-12);
}

double triangle_oracle(double c) {
  auto inner = [&](double u1) {
    auto g = [&](double u2) {
      if (!(u1 * u2 < c)) return 0.0;
      return std::min({1.0, c / u1, c / u2});
    };
    return gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 12, 1e-10);
  };
  return gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 12, 1e-10);
}

TEST(MotifOracles, ClosedFormsMatchQuadrature) {
  for (double c : {0.17517, 0.05, 0.002}) {
    EXPECT_NEAR(path2_oracle(c), 2.0 * c - c * c, 1e-9);
    const double s = std::sqrt(c);
    EXPECT_NEAR(twostar_oracle(c), 2.0 * c * (1.0 - s) * (1.0 - s), 1e-9);
  }
}

TEST(MotifMc, ThreeVertexEventsMatchOracles) {
  const double gamma = 1.5;
  const std::size_t n = 3;
  const double c = edge_constant(gamma, n);
  const std::size_t reps = 400000;

  const auto path = motif_mc(MotifEvent::Path2, 2.0, gamma, n, reps, 11);
  EXPECT_NEAR(path.mc_mean, path2_oracle(c), 3.0 * path.mc_se);

  const auto star = motif_mc(MotifEvent::TwoStar, 2.0, gamma, n, reps, 11);
  EXPECT_NEAR(star.mc_mean, twostar_oracle(c), 3.0 * star.mc_se);

  const auto tri = motif_mc(MotifEvent::Triangle, 2.0, gamma, n, reps, 11);
  EXPECT_NEAR(tri.mc_mean, triangle_oracle(c), 3.0 * tri.mc_se);
}

TEST(MotifMc, HubEventsDoNotDependOnRestSizeLaw) {
  // path / wedge / triangle touch only the three designated vertices, so the
  // same c must give the same law at any n with equal gamma-n product scale
  const std::size_t n = 50;
  const double c = edge_constant(1.0, n);
  const auto path = motif_mc(MotifEvent::Path2, 1.0, 1.0, n, 300000, 3);
  EXPECT_NEAR(path.mc_mean, 2.0 * c - c * c, 3.0 * path.mc_se);
}

TEST(MotifMc, EdgeEventMatchesPairProductTail) {
  const double alpha = 2.0, gamma = 1.0;
  const std::size_t n = 100;
  const auto rep = motif_mc(MotifEvent::EdgePresent, alpha, gamma, n, 400000, 21);
  const double exact =
      product_tail(TailModel::pareto(alpha), scaling_a_n(alpha, gamma, n));
  EXPECT_NEAR(rep.mc_mean, exact, 3.0 * rep.mc_se);
  // same value through the u-space constant
  const double c = edge_constant(gamma, n);
  EXPECT_NEAR(exact, c * (1.0 - std::log(c)), 1e-12);
}

TEST(MotifMc, FrequencyOrderingAtModerateReps) {
  const double gamma = 1.0;
  const std::size_t n = 100, reps = 2000000;
  const auto path = motif_mc(MotifEvent::Path2, 2.0, gamma, n, reps, 40);
  const auto star = motif_mc(MotifEvent::TwoStar, 2.0, gamma, n, reps, 40);
  const auto tri = motif_mc(MotifEvent::Triangle, 2.0, gamma, n, reps, 40);
  EXPECT_GT(path.mc_mean, star.mc_mean);
  EXPECT_GT(star.mc_mean, tri.mc_mean);
}

TEST(MotifMc, SparseRegionEdgeVacant2IsNearOne) {
  const auto rep = motif_mc(MotifEvent::EdgeVacant2, 2.0, 0.5, 10000, 200000, 8);
  EXPECT_EQ(rep.region, "gamma < 1");
  EXPECT_DOUBLE_EQ(rep.asymptote, 1.0);
  EXPECT_GT(rep.mc_mean, 0.95);
  EXPECT_LE(rep.mc_mean, 1.0);
}

TEST(MotifMc, NonIsolatedVertexMatchesExactIntegral) {
  const double alpha = 2.0, gamma = 1.5;
  const std::size_t n = 1000;
  const auto rep = motif_mc(MotifEvent::NonIsolatedVertex, alpha, gamma, n, 300000, 17);
  const double exact = expected_vertices(alpha, gamma, n, EstimateMode::Exact) /
                       static_cast<double>(n);
  EXPECT_NEAR(rep.mc_mean, exact, 3.0 * rep.mc_se);
}

TEST(MotifMc, ReportBookkeeping) {
  const auto rep = motif_mc(MotifEvent::Path2, 2.0, 1.5, 1000, 2000, 1);
  EXPECT_EQ(rep.event, "path2");
  EXPECT_EQ(rep.n, 1000u);
  EXPECT_EQ(rep.reps, 2000u);
  EXPECT_FALSE(rep.low_reps);
  EXPECT_NEAR(rep.ratio, rep.mc_mean / rep.asymptote, 1e-15);
  EXPECT_TRUE(motif_mc(MotifEvent::Path2, 2.0, 1.5, 1000, 500, 1).low_reps);
  EXPECT_TRUE(std::isnan(motif_mc(MotifEvent::Triangle, 2.0, 1.5, 100, 100, 1).ratio));
  EXPECT_THROW(motif_mc(MotifEvent::Triangle, 2.0, 1.5, 2, 10, 1), std::invalid_argument);
  EXPECT_THROW(motif_mc(MotifEvent::EdgePresent, 0.0, 1.5, 10, 10, 1), std::invalid_argument);
  EXPECT_THROW(motif_mc(MotifEvent::EdgePresent, 2.0, 1.5, 10, 0, 1), std::invalid_argument);
}

TEST(MotifAsymptotes, PinnedLeadingOrderValues) {
  const double n = 1000.0, ln = std::log(1000.0);
  EXPECT_NEAR(motif_asymptote(MotifEvent::EdgePresent, 2, 1.5, 1000).value,
              1.5 * std::pow(n, -1.5), 1e-15);
  EXPECT_NEAR(motif_asymptote(MotifEvent::Path2, 2, 1.5, 1000).value,
              2.0 / (std::pow(n, 1.5) * ln), 1e-15);
  EXPECT_NEAR(motif_asymptote(MotifEvent::TwoStar, 2, 1.5, 1000).value,
              2.0 / (std::pow(n, 1.5) * ln), 1e-15);
  EXPECT_TRUE(motif_asymptote(MotifEvent::Triangle, 2, 1.5, 1000).lower_order_only);
  EXPECT_NEAR(motif_asymptote(MotifEvent::EdgeVacant2, 2, 1.5, 1000).value,
              2.0 / (std::sqrt(n) * ln), 1e-15);
  EXPECT_NEAR(motif_asymptote(MotifEvent::VacantTriangle, 2, 1.5, 1000).value,
              1.5 / (std::sqrt(n) * ln), 1e-15);
  EXPECT_NEAR(motif_asymptote(MotifEvent::OneEdgeTriple, 2, 1.5, 1000).value,
              0.5 * std::pow(n, -2.0), 1e-15);
  EXPECT_NEAR(motif_asymptote(MotifEvent::OneEdgeTriple, 2, 1.0, 1000).value,
              std::log(ln) / (n * ln), 1e-15);
  EXPECT_NEAR(motif_asymptote(MotifEvent::NonIsolatedVertex, 2, 1.5, 1000).value,
              0.5 / std::sqrt(n), 1e-15);
  EXPECT_NEAR(motif_asymptote(MotifEvent::NonIsolatedVertex, 2, 1.0, 1000).value,
              std::log(ln) / ln, 1e-15);
  EXPECT_TRUE(motif_asymptote(MotifEvent::NonIsolatedVertex, 2, 2.5, 1000).lower_order_only);
}

TEST(ExpectedCounts, ExactAgreesWithSampling) {
  const double alpha = 2.0, gamma = 1.5;
  const std::size_t n = 300;
  const double e_exact = expected_edges(alpha, gamma, n, EstimateMode::Exact);
  const double e_mc = expected_edges(alpha, gamma, n, EstimateMode::MC, 20000, 123);
  EXPECT_NEAR(e_mc / e_exact, 1.0, 0.10);

  const double v_exact = expected_vertices(alpha, gamma, n, EstimateMode::Exact);
  const double v_mc = expected_vertices(alpha, gamma, n, EstimateMode::MC, 40000, 123);
  EXPECT_NEAR(v_mc / v_exact, 1.0, 0.10);
}

TEST(ExpectedCounts, LeadingOrderFormulas) {
  EXPECT_NEAR(expected_edges(2, 1.5, 10000, EstimateMode::Asymptotic),
              0.75 * std::sqrt(10000.0), 1e-9);
  EXPECT_DOUBLE_EQ(expected_vertices(2, 2.5, 10000, EstimateMode::Asymptotic), 0.0);
  EXPECT_DOUBLE_EQ(expected_vertices(2, 0.5, 10000, EstimateMode::Asymptotic), 10000.0);
  EXPECT_NEAR(expected_vertices(2, 1.5, 10000, EstimateMode::Asymptotic),
              0.5 * std::sqrt(10000.0), 1e-9);
  // log-order corrections vanish slowly; the ratio must shrink toward 1
  const double r_small = expected_vertices(2, 1.5, 1000, EstimateMode::Exact) /
                         expected_vertices(2, 1.5, 1000, EstimateMode::Asymptotic);
  const double r_large = expected_vertices(2, 1.5, 1000000, EstimateMode::Exact) /
                         expected_vertices(2, 1.5, 1000000, EstimateMode::Asymptotic);
  EXPECT_GT(r_small, r_large);
  EXPECT_GT(r_large, 1.0);
  EXPECT_LT(r_large, 1.5);
  EXPECT_THROW(expected_edges(2, 1.5, 1, EstimateMode::Exact), std::invalid_argument);
  EXPECT_THROW(expected_vertices(0, 1.5, 100, EstimateMode::Exact), std::invalid_argument);
}

TEST(Supercritical, CliqueLawAndModalConfiguration) {
  EXPECT_THROW(supercritical_clique_stats(2.0, 1.5, 100, 10, 1), std::domain_error);

  const double alpha = 2.0, gamma = 2.5;
  const std::size_t n = 3000, reps = 60000;
  const auto rep = supercritical_clique_stats(alpha, gamma, n, reps, 5);

  const double rc = std::sqrt(edge_constant(gamma, n));
  const double nn = static_cast<double>(n);
  EXPECT_NEAR(rep.p_ge1_exact, -std::expm1(nn * std::log1p(-rc)), 1e-12);
  EXPECT_NEAR(rep.p_eq1_exact, nn * rc * std::pow(1.0 - rc, nn - 1.0), 1e-12);
  EXPECT_LE(rep.p_eq1_exact, rep.p_ge1_exact);
  EXPECT_NEAR(rep.p_ge1_exact / rep.p_ge1_asymptote, 1.0, 0.05);

  // an edge forces a clique vertex, so non-empty replicates are bounded by
  // the clique-existence law
  const double nonempty = static_cast<double>(rep.nonempty_count) / static_cast<double>(reps);
  const double se = std::sqrt(rep.p_ge1_exact * (1 - rep.p_ge1_exact) / static_cast<double>(reps));
  EXPECT_LE(nonempty, rep.p_ge1_exact + 3.0 * se);
  ASSERT_GT(rep.nonempty_count, 300u);

  EXPECT_EQ(rep.modal_vertices, 2u);
  EXPECT_EQ(rep.modal_clique, 1u);
  EXPECT_LE(rep.star_one_follower.mc_mean, rep.star.mc_mean);
  EXPECT_LE(rep.star.mc_mean, rep.p_eq1_exact + 3.0 * rep.star.mc_se);

  std::uint64_t total = 0;
  for (const auto& cfgc : rep.configs) total += cfgc.count;
  EXPECT_EQ(total, rep.nonempty_count);
  for (std::size_t i = 0; i + 1 < rep.configs.size(); ++i)
    EXPECT_GE(rep.configs[i].count, rep.configs[i + 1].count);
}

TEST(Anticlustering, ConditionalRatioDecaysLikeInverseLog) {
  const double alpha = 2.0;
  const std::vector<double> grid{std::exp(2.0), std::exp(4.0), std::exp(10.0)};
  const auto rep = anticlustering_diagnostics(alpha, grid, 400000, 19);
  ASSERT_EQ(rep.rows.size(), 3u);

  for (const auto& r : rep.rows) {
    EXPECT_NEAR(r.p12_exact, product_tail(TailModel::pareto(alpha), r.x), 1e-12);
    const double want = (2.0 - std::pow(r.x, -alpha)) / (1.0 + alpha * std::log(r.x));
    EXPECT_NEAR(r.cond_ratio_exact, want, 1e-12);
    EXPECT_NEAR(r.cond_ratio_mc, r.cond_ratio_exact, 3.0 * r.cond_ratio_se)
        << "x=" << r.x;
    // x^alpha * joint stays bounded near 2, the hallmark of the slow decay
    EXPECT_NEAR(r.xalpha_joint, 2.0 - std::pow(r.x, -alpha), 0.05);
  }
  // direct indicator MC is only usable at the small end of the grid; it must
  // reproduce both the pair law and the conditional ratio there
  const auto& r0 = rep.rows[0];
  EXPECT_NEAR(r0.p12_mc, r0.p12_exact, 3.0 * r0.p12_se);
  EXPECT_NEAR(r0.joint_mc / r0.p12_mc, r0.cond_ratio_exact, 0.02);

  EXPECT_LT(rep.rows[2].cond_ratio_mc, rep.rows[0].cond_ratio_mc);
  EXPECT_NEAR(rep.ratio_loglog_slope, -0.89, 0.08);
  EXPECT_THROW(anticlustering_diagnostics(2.0, {0.5}, 100, 1), std::invalid_argument);
}

}  // namespace
