#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "emfrisk/clustering.hpp"
#include "support/oracles.hpp"

namespace emfrisk {
namespace {

using testing::brute_force_optimum;
using testing::random_values;

ClusterParams params_k(std::size_t k, std::size_t restarts = 50, std::uint64_t seed = 0) {
  ClusterParams p;
  p.k = k;
  p.restarts = restarts;
  p.seed = seed;
  return p;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::io_failure;
}

/// Checks every structural invariant of a finished clustering.
void expect_valid(const std::vector<double>& values, const Clustering& c) {
  const std::size_t k = c.k();
  ASSERT_EQ(c.assignments.size(), values.size());
  std::vector<std::vector<double>> members(k);
  for (std::size_t i = 0; i < values.size(); ++i) {
    ASSERT_LT(c.assignments[i], k);
    members[c.assignments[i]].push_back(values[i]);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    ASSERT_FALSE(members[j].empty()) << "cluster " << j << " empty";
    ASSERT_EQ(c.centroids[j], median(members[j]));
    for (double v : members[j]) total += std::fabs(v - c.centroids[j]);
  }
  EXPECT_NEAR(c.objective, total, 1e-12);
  EXPECT_TRUE(std::is_sorted(c.centroids.begin(), c.centroids.end()));

  // contiguity: labels are non-decreasing along sorted values
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    ASSERT_LE(c.assignments[order[i - 1]], c.assignments[order[i]]);
  }
}

// --- frozen oracle values -------------------------------------------------

TEST(Oracle, FrozenValuesMatchEnumeration) {
  EXPECT_EQ(brute_force_optimum({1, 2, 9, 10}, 2), 2.0);
  EXPECT_EQ(brute_force_optimum({0, 1, 10}, 2), 1.0);
  EXPECT_EQ(brute_force_optimum({1, 2, 3}, 1), 2.0);
  EXPECT_EQ(brute_force_optimum({5}, 1), 0.0);
}

// --- median / objective ---------------------------------------------------

TEST(Median, OddEvenAndUnsorted) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({1, 2, 9, 10}), 5.5);
  EXPECT_EQ(median({10, 9}), 9.5);
  EXPECT_EQ(median({4}), 4.0);
  EXPECT_THROW(median({}), Error);
}

TEST(Objective, Examples) {
  const std::vector<double> v{1, 3};
  const std::vector<std::size_t> a{0, 0};
  const std::vector<double> c{2};
  EXPECT_EQ(objective(v, a, c), 2.0);

  const std::vector<double> same{0.5, 0.7};
  const std::vector<std::size_t> sa{0, 1};
  EXPECT_EQ(objective(same, sa, same), 0.0);
}

TEST(Objective, DimensionMismatch) {
  const std::vector<double> v{1, 2, 3};
  const std::vector<std::size_t> a{0, 0};
  const std::vector<double> c{2};
  EXPECT_EQ(code_of([&] { objective(v, a, c); }), Errc::dimension_mismatch);
  const std::vector<std::size_t> bad{0, 1, 0};
  EXPECT_EQ(code_of([&] { objective(v, bad, c); }), Errc::dimension_mismatch);
}

// --- kmedians_run ---------------------------------------------------------

TEST(KMediansRun, TwoObviousGroups) {
  const std::vector<double> v{1, 2, 9, 10};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = kmedians_run(v, params_k(2), seed);
    expect_valid(v, c);
    EXPECT_TRUE(c.converged);
    EXPECT_EQ(c.objective, 2.0);
    EXPECT_EQ(c.centroids, (std::vector<double>{1.5, 9.5}));
    EXPECT_EQ(c.assignments, (std::vector<std::size_t>{0, 0, 1, 1}));
  }
}

TEST(KMediansRun, SingleCluster) {
  const std::vector<double> v{1, 2, 3};
  const auto c = kmedians_run(v, params_k(1), 0);
  EXPECT_EQ(c.centroids, std::vector<double>{2.0});
  EXPECT_EQ(c.objective, 2.0);
}

TEST(KMediansRun, KEqualsNGivesSingletons) {
  const std::vector<double> v{0.3, 0.1, 0.2};
  const auto c = kmedians_run(v, params_k(3), 5);
  expect_valid(v, c);
  EXPECT_EQ(c.objective, 0.0);
  EXPECT_EQ(c.assignments, (std::vector<std::size_t>{2, 0, 1}));
}

TEST(KMediansRun, Errors) {
  const std::vector<double> dup{1, 1, 1, 2};
  EXPECT_EQ(code_of([&] { kmedians_run(dup, params_k(3), 0); }), Errc::too_few_distinct_values);
  const std::vector<double> small{1, 2};
  EXPECT_EQ(code_of([&] { kmedians_run(small, params_k(3), 0); }), Errc::k_too_large);
  EXPECT_EQ(code_of([&] { kmedians_run(small, params_k(0), 0); }), Errc::invalid_argument);
  ClusterParams p = params_k(1);
  p.max_iterations = 0;
  EXPECT_EQ(code_of([&] { kmedians_run(small, p, 0); }), Errc::invalid_argument);
}

TEST(KMediansRun, DuplicatesStayTogether) {
  const std::vector<double> v{0.1, 0.1, 0.1, 0.5, 0.5, 0.9, 0.9, 0.9};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = kmedians_run(v, params_k(3), seed);
    expect_valid(v, c);
    EXPECT_EQ(c.objective, 0.0);
  }
}

TEST(KMediansRun, MaxIterationsCapsRun) {
  std::mt19937_64 rng(99);
  const auto v = random_values(rng, 200);
  ClusterParams p = params_k(8);
  p.max_iterations = 1;
  const auto c = kmedians_run(v, p, 1);
  EXPECT_EQ(c.iterations_used, 1u);
  EXPECT_EQ(c.objective_trace.size(), 1u);
  expect_valid(v, c);  // centroids are still the medians of the reported clusters
}

TEST(EmptyClusterRepair, MovesCentroidToFarthestValue) {
  // 0.5 loses every value to its neighbours; 10 is farthest from its centroid.
  const std::vector<double> v{0.0, 1.0, 10.0};
  std::vector<double> centroids{0.0, 0.5, 0.6};
  std::vector<std::size_t> labels(v.size());
  detail::assign_with_repair(v, centroids, labels);
  EXPECT_EQ(centroids, (std::vector<double>{0.0, 0.6, 10.0}));
  EXPECT_EQ(labels, (std::vector<std::size_t>{0, 1, 2}));
}

// --- best_of_restarts -----------------------------------------------------

TEST(BestOfRestarts, SingleRestartEqualsSingleRun) {
  std::mt19937_64 rng(5);
  const auto v = random_values(rng, 40);
  const ClusterParams p = params_k(4, 1, 1234);
  const auto best = best_of_restarts(v, p);
  const auto single = kmedians_run(v, p, derive_seed(1234, 0));
  EXPECT_EQ(best.assignments, single.assignments);
  EXPECT_EQ(best.centroids, single.centroids);
  EXPECT_EQ(best.objective, single.objective);
}

TEST(BestOfRestarts, FindsExactOptimumOnToyData) {
  const std::vector<double> v{1, 2, 9, 10};
  EXPECT_EQ(best_of_restarts(v, params_k(2)).objective, 2.0);
}

TEST(BestOfRestarts, PicksMinimumEarliestRun) {
  std::mt19937_64 rng(8);
  const auto v = random_values(rng, 30);
  const ClusterParams p = params_k(5, 20, 77);
  const auto best = best_of_restarts(v, p);
  double min_obj = 1e300;
  std::uint64_t first_seed = 0;
  for (std::size_t r = 0; r < p.restarts; ++r) {
    const auto run = kmedians_run(v, p, derive_seed(p.seed, r));
    if (run.objective < min_obj) {
      min_obj = run.objective;
      first_seed = run.run_seed;
    }
  }
  EXPECT_EQ(best.objective, min_obj);
  EXPECT_EQ(best.run_seed, first_seed);
}

TEST(BestOfRestarts, Deterministic) {
  std::mt19937_64 rng(21);
  const auto v = random_values(rng, 54);
  const auto a = best_of_restarts(v, params_k(5, 50, 3));
  const auto b = best_of_restarts(v, params_k(5, 50, 3));
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(DeriveSeed, DistinctAcrossRestarts) {
  std::set<std::uint64_t> seeds;
  for (std::size_t r = 0; r < 1000; ++r) seeds.insert(derive_seed(0, r));
  EXPECT_EQ(seeds.size(), 1000u);
}

// --- exact_dp -------------------------------------------------------------

TEST(ExactDp, Examples) {
  const std::vector<double> a{0, 1, 10};
  const auto s = exact_dp(a, 2);
  EXPECT_EQ(s.objective, 1.0);
  EXPECT_EQ(s.boundaries, std::vector<std::size_t>{1});

  const std::vector<double> one{5};
  EXPECT_EQ(exact_dp(one, 1).objective, 0.0);
  EXPECT_TRUE(exact_dp(one, 1).boundaries.empty());

  const std::vector<double> b{1, 2, 9, 10};
  EXPECT_EQ(exact_dp(b, 2).objective, 2.0);
}

TEST(ExactDp, Errors) {
  const std::vector<double> v{1, 2};
  EXPECT_EQ(code_of([&] { exact_dp(v, 3); }), Errc::k_too_large);
  EXPECT_EQ(code_of([&] { exact_dp(v, 0); }), Errc::invalid_argument);
  const std::vector<double> unsorted{2, 1};
  EXPECT_EQ(code_of([&] { exact_dp(unsorted, 1); }), Errc::invalid_argument);
}

TEST(ExactDp, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 9;
    const std::size_t k = 1 + rng() % std::min<std::size_t>(n, 4);
    auto v = random_values(rng, n);
    if (trial % 3 == 0) {
      for (auto& x : v) x = std::round(x * 5) / 5;  // force ties
    }
    const double expected = brute_force_optimum(v, k);
    std::sort(v.begin(), v.end());
    const auto s = exact_dp(v, k);
    ASSERT_NEAR(s.objective, expected, 1e-12) << "n=" << n << " k=" << k;
    ASSERT_EQ(s.boundaries.size(), k - 1);
  }
}

TEST(ExactDp, ObjectiveAgreesWithObjectiveFunction) {
  std::mt19937_64 rng(2);
  auto v = random_values(rng, 30);
  std::sort(v.begin(), v.end());
  const auto s = exact_dp(v, 4);
  std::vector<std::size_t> labels(v.size());
  std::vector<double> centroids;
  std::size_t c = 0;
  for (const auto& [first, last] : s.segments(v.size())) {
    centroids.push_back(median({v.begin() + first, v.begin() + last + 1}));
    for (std::size_t i = first; i <= last; ++i) labels[i] = c;
    ++c;
  }
  EXPECT_NEAR(objective(v, labels, centroids), s.objective, 1e-12);
}

// --- properties -----------------------------------------------------------

TEST(Properties, RunsAreValidMonotoneAndBoundedByOptimum) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 5 + rng() % 60;
    const std::size_t k = 1 + rng() % 6;
    auto v = random_values(rng, n);
    if (trial % 4 == 0) {
      for (auto& x : v) x = std::round(x * 20) / 20;
    }
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    if (std::set<double>(sorted.begin(), sorted.end()).size() < k) continue;

    const auto c = kmedians_run(v, params_k(k), rng());
    expect_valid(v, c);
    for (std::size_t i = 1; i < c.objective_trace.size(); ++i) {
      ASSERT_LE(c.objective_trace[i], c.objective_trace[i - 1] * (1 + 1e-12));
    }
    ASSERT_GE(c.objective, exact_dp(sorted, k).objective - 1e-12);
  }
}

TEST(Properties, PositiveScalingKeepsAssignments) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = random_values(rng, 40);
    const std::uint64_t seed = rng();
    const auto base = kmedians_run(v, params_k(4), seed);
    for (double scale : {2.0, 0.5, 1024.0, 3.7}) {
      std::vector<double> scaled(v);
      for (auto& x : scaled) x *= scale;
      const auto c = kmedians_run(scaled, params_k(4), seed);
      ASSERT_EQ(c.assignments, base.assignments) << "scale " << scale;
    }
  }
}

}  // namespace
}  // namespace emfrisk
