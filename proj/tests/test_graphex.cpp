#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plrg/graphex.hpp"

namespace {

using namespace plrg;

TEST(IntervalIntensities, WorkedTwoPointExample) {
  // values (4, 3) with x0 = 4, alpha = 1, t = 1:
  // group 1 covers (4/3, 2], group 2 covers (1, 4/3], both with mass 1/4
  const auto lambda = interval_intensities({4.0, 3.0}, 1.0, 4.0, 1.0);
  ASSERT_EQ(lambda.size(), 2u);
  EXPECT_NEAR(lambda[0], 0.25, 1e-12);
  EXPECT_NEAR(lambda[1], 0.25, 1e-12);
}

TEST(IntervalIntensities, ClampsAtSupportBoundary) {
  // single value 8: the raw interval (1/2, 2] pokes below the support x >= 1
  const auto lambda = interval_intensities({8.0}, 2.0, 4.0, 1.0);
  ASSERT_EQ(lambda.size(), 1u);
  EXPECT_NEAR(lambda[0], 2.0 * (1.0 - 0.5), 1e-12);
}

TEST(IntervalIntensities, TelescopesToTotalMass) {
  const std::vector<double> values{11.0, 7.5, 3.1, 2.2};
  const double t = 1.7, x0 = 4.0, alpha = 1.5;
  const auto lambda = interval_intensities(values, t, x0, alpha);
  double sum = 0.0;
  for (double l : lambda) sum += l;
  const double lo = std::max(1.0, x0 / values.front());
  const double expect = t * (std::pow(lo, -alpha) - std::pow(x0, -alpha / 2.0));
  EXPECT_NEAR(sum, expect, 1e-12);
}

TEST(IntervalIntensities, RejectsBadInput) {
  EXPECT_THROW(interval_intensities({3.0}, 0.0, 4.0, 1.0), std::invalid_argument);
  EXPECT_THROW(interval_intensities({3.0}, 1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(interval_intensities({1.5}, 1.0, 4.0, 1.0), std::invalid_argument);  // <= sqrt(x0)
  EXPECT_THROW(interval_intensities({3.0, 3.5}, 1.0, 4.0, 1.0), std::invalid_argument);
  EXPECT_THROW(interval_intensities({3.0, 3.0}, 1.0, 4.0, 1.0), std::invalid_argument);
}

TEST(SampleGraphex, DeterministicInSeedAndWellFormed) {
  const auto g1 = sample_graphex(1.0, 4.0, 1.0, 42);
  const auto g2 = sample_graphex(1.0, 4.0, 1.0, 42);
  EXPECT_EQ(g1.clique_values, g2.clique_values);
  EXPECT_EQ(g1.follower_counts, g2.follower_counts);

  const double root = 2.0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto g = sample_graphex(2.0, 4.0, 1.0, seed);
    ASSERT_EQ(g.clique_times.size(), g.k0());
    ASSERT_EQ(g.follower_counts.size(), g.k0());
    ASSERT_EQ(g.follower_times.size(), g.k0());
    for (std::size_t i = 0; i < g.k0(); ++i) {
      ASSERT_GT(g.clique_values[i], root);
      if (i > 0) {
        ASSERT_LT(g.clique_values[i], g.clique_values[i - 1]);
      }
      ASSERT_GT(g.clique_times[i], 0.0);
      ASSERT_LE(g.clique_times[i], 2.0);
      ASSERT_EQ(g.follower_times[i].size(), g.follower_counts[i]);
      for (double s : g.follower_times[i]) {
        ASSERT_GT(s, 0.0);
        ASSERT_LE(s, 2.0);
      }
    }
  }
  EXPECT_THROW(sample_graphex(0.0, 4.0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(sample_graphex(1.0, 0.9, 1.0, 1), std::invalid_argument);
}

TEST(SampleGraphex, CliqueCountFollowsThePointProcessLaw) {
  const double t = 1.0, x0 = 4.0, alpha = 1.0;
  const double lambda = t * std::pow(x0, -alpha / 2.0);  // 0.5
  const std::size_t reps = 20000;
  std::vector<std::size_t> hist(8, 0);
  double mean = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto g = sample_graphex(t, x0, alpha, 1000 + r);
    mean += static_cast<double>(g.k0());
    if (g.k0() < hist.size()) ++hist[g.k0()];
  }
  mean /= static_cast<double>(reps);
  EXPECT_NEAR(mean, lambda, 3.0 * std::sqrt(lambda / reps));
  double pk = std::exp(-lambda);
  for (std::size_t k = 0; k <= 3; ++k) {
    const double emp = static_cast<double>(hist[k]) / reps;
    const double se = std::sqrt(pk * (1 - pk) / reps);
    EXPECT_NEAR(emp, pk, 3.0 * se) << "k=" << k;
    pk *= lambda / static_cast<double>(k + 1);
  }
}

TEST(SampleGraphex, FollowerCountsAreUnbiasedForTheirIntensities) {
  // conditional on the clique values, each group count has mean lambda_j
  const double t = 2.0, x0 = 4.0, alpha = 1.5;
  const std::size_t reps = 20000;
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto g = sample_graphex(t, x0, alpha, 5000 + r);
    if (g.k0() == 0) continue;
    const auto lambda = interval_intensities(g.clique_values, t, x0, alpha);
    double diff = 0.0;
    for (std::size_t j = 0; j < g.k0(); ++j)
      diff += static_cast<double>(g.follower_counts[j]) - lambda[j];
    ++n;
    const double d = diff - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (diff - mean);
  }
  ASSERT_GT(n, 1000u);
  const double se = std::sqrt(m2 / (static_cast<double>(n) - 1.0) / static_cast<double>(n));
  EXPECT_NEAR(mean, 0.0, 3.0 * se);
}

GraphexGraph hand_graph(std::vector<double> times) {
  GraphexGraph g;
  g.t = 1.0;
  g.x0 = 4.0;
  g.alpha = 1.0;
  g.clique_values = {4.0, 3.0};
  g.clique_times = std::move(times);
  g.follower_counts = {2, 1};
  g.follower_times = {{0.1, 0.9}, {0.5}};
  return g;
}

TEST(NestedSubgraph, HandWorkedRestriction) {
  // top clique point survives: its old group-2 follower re-indexes to group 1
  const auto a = nested_subgraph(hand_graph({0.2, 0.8}), 0.5);
  EXPECT_EQ(a.clique_values, (std::vector<double>{4.0}));
  EXPECT_EQ(a.follower_counts, (std::vector<std::uint64_t>{2}));
  EXPECT_EQ(a.follower_times[0], (std::vector<double>{0.1, 0.5}));

  // top clique point dies: the follower tied only to it drops out entirely
  const auto b = nested_subgraph(hand_graph({0.8, 0.2}), 0.5);
  EXPECT_EQ(b.clique_values, (std::vector<double>{3.0}));
  EXPECT_EQ(b.follower_counts, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(b.follower_times[0], (std::vector<double>{0.1}));
}

TEST(NestedSubgraph, FullHorizonIsIdentityAndBoundsHold) {
  const auto g = sample_graphex(2.0, 4.0, 1.0, 9);
  const auto same = nested_subgraph(g, 2.0);
  EXPECT_EQ(same.clique_values, g.clique_values);
  EXPECT_EQ(same.follower_counts, g.follower_counts);
  EXPECT_THROW(nested_subgraph(g, 2.5), std::out_of_range);
  EXPECT_THROW(nested_subgraph(g, -0.1), std::out_of_range);
}

TEST(NestedSubgraph, RestrictionKeepsThePointProcessLaw) {
  const double x0 = 4.0, alpha = 1.0;
  const double lambda_half = 0.5 * std::pow(x0, -alpha / 2.0);  // horizon 0.5
  const std::size_t reps = 20000;
  double mean = 0.0;
  std::uint64_t followers_before = 0, followers_after = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto g = sample_graphex(2.0, x0, alpha, 40000 + r);
    const auto h = nested_subgraph(g, 0.5);
    mean += static_cast<double>(h.k0());
    ASSERT_LE(h.k0(), g.k0());
    for (auto c : g.follower_counts) followers_before += c;
    for (auto c : h.follower_counts) followers_after += c;
  }
  mean /= static_cast<double>(reps);
  EXPECT_NEAR(mean, lambda_half, 3.0 * std::sqrt(lambda_half / reps));
  EXPECT_LE(followers_after, followers_before);
}

TEST(ToKVector, CarriesCountsOver) {
  const auto g = sample_graphex(3.0, 4.0, 1.0, 12345);
  const auto kv = to_kvector(g);
  EXPECT_EQ(kv.k0, g.k0());
  EXPECT_EQ(kv.followers, g.follower_counts);
  EXPECT_NO_THROW(edge_count(kv));
}

}  // namespace
