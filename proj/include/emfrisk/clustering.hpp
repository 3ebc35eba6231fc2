#pragma once

// K-Medians over scalar features, plus an exact dynamic program for the same
// objective that exploits the fact that optimal 1-D clusters are contiguous
// runs of the sorted values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "emfrisk/error.hpp"
#include "emfrisk/measurement.hpp"

namespace emfrisk {

struct ClusterParams {
  std::size_t k = 5;
  std::size_t restarts = 50;
  std::size_t max_iterations = 100;
  std::uint64_t seed = 0;

  void validate(std::size_t dataset_size) const {
    if (k < 1) throw Error(Errc::invalid_argument, "k must be at least 1");
    if (restarts < 1) throw Error(Errc::invalid_argument, "restarts must be at least 1");
    if (max_iterations < 1) throw Error(Errc::invalid_argument, "max_iterations must be at least 1");
    if (k > dataset_size) {
      throw Error(Errc::k_too_large, "k = " + std::to_string(k) + " exceeds dataset size " +
                                         std::to_string(dataset_size));
    }
  }
};

struct Clustering {
  std::vector<std::size_t> assignments;  ///< cluster index per feature, 0..k-1
  std::vector<double> centroids;         ///< cluster medians, ascending
  double objective = 0.0;                ///< sum of |value - centroid|
  std::size_t iterations_used = 0;
  bool converged = false;
  std::uint64_t run_seed = 0;
  /// Objective after each assignment + median step.
  std::vector<double> objective_trace;

  std::size_t k() const noexcept { return centroids.size(); }
};

/// Median of a sample; even-sized samples take the midpoint of the two middle values.
inline double median(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::invalid_argument, "median of an empty set");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

/// Total L1 cost of an assignment.
inline double objective(std::span<const double> values, std::span<const std::size_t> assignments,
                        std::span<const double> centroids) {
  if (values.size() != assignments.size()) {
    throw Error(Errc::dimension_mismatch, std::to_string(values.size()) + " values but " +
                                              std::to_string(assignments.size()) + " assignments");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (assignments[i] >= centroids.size()) {
      throw Error(Errc::dimension_mismatch, "assignment " + std::to_string(assignments[i]) +
                                                " has no centroid");
    }
    total += std::fabs(values[i] - centroids[assignments[i]]);
  }
  return total;
}

/// Seed for restart `restart` of a run seeded with `seed` (SplitMix64 finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::size_t restart) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(restart) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace detail {

/// Unbiased integer in [0, n). Implemented here rather than with
/// std::uniform_int_distribution, whose output differs between standard libraries.
inline std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return static_cast<std::size_t>(x % bound);
  }
}

inline std::vector<double> distinct_sorted(std::span<const double> values) {
  std::vector<double> u(values.begin(), values.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

/// Nearest centroid by L1 distance; ties go to the lower index.
inline std::size_t nearest(double v, std::span<const double> centroids) {
  std::size_t best = 0;
  double best_d = std::fabs(v - centroids[0]);
  for (std::size_t j = 1; j < centroids.size(); ++j) {
    const double d = std::fabs(v - centroids[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

/// Assigns every value to its nearest centroid. While some cluster is empty,
/// that centroid jumps to the value lying farthest from its own centroid and
/// the assignment is redone.
inline void assign_with_repair(std::span<const double> values, std::vector<double>& centroids,
                               std::vector<std::size_t>& labels) {
  const std::size_t k = centroids.size();
  for (std::size_t attempt = 0;; ++attempt) {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      labels[i] = nearest(values[i], centroids);
      ++counts[labels[i]];
    }
    const auto empty = std::find(counts.begin(), counts.end(), 0);
    if (empty == counts.end()) return;
    if (attempt > values.size() + k) {
      throw std::logic_error("empty-cluster repair did not terminate");
    }

    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = std::fabs(values[i] - centroids[labels[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    centroids[static_cast<std::size_t>(empty - counts.begin())] = values[far];
    std::sort(centroids.begin(), centroids.end());
  }
}

}  // namespace detail

/// One K-Medians run: seed centroids from k distinct data values, then
/// alternate nearest-centroid assignment and median re-computation until the
/// centroids stop moving or `max_iterations` is reached.
inline Clustering kmedians_run(std::span<const double> values, const ClusterParams& params,
                               std::uint64_t run_seed) {
  params.validate(values.size());
  const std::size_t k = params.k;

  const std::vector<double> distinct = detail::distinct_sorted(values);
  if (distinct.size() < k) {
    throw Error(Errc::too_few_distinct_values,
                std::to_string(distinct.size()) + " distinct values for k = " + std::to_string(k));
  }

  // Initial centroids: k distinct values drawn without replacement (partial
  // Fisher-Yates over the sorted distinct values).
  std::mt19937_64 rng(run_seed);
  std::vector<std::size_t> pool(distinct.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<double> centroids(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t pick = j + detail::uniform_below(rng, pool.size() - j);
    std::swap(pool[j], pool[pick]);
    centroids[j] = distinct[pool[j]];
  }
  std::sort(centroids.begin(), centroids.end());

  Clustering out;
  out.run_seed = run_seed;
  out.assignments.assign(values.size(), 0);

  std::vector<std::vector<double>> members(k);
  for (std::size_t it = 1; it <= params.max_iterations; ++it) {
    detail::assign_with_repair(values, centroids, out.assignments);

    for (auto& m : members) m.clear();
    for (std::size_t i = 0; i < values.size(); ++i) members[out.assignments[i]].push_back(values[i]);
    std::vector<double> updated(k);
    for (std::size_t j = 0; j < k; ++j) updated[j] = median(members[j]);

    out.iterations_used = it;
    out.objective_trace.push_back(objective(values, out.assignments, updated));
    const bool same = updated == centroids;
    centroids = std::move(updated);
    if (same) {
      out.converged = true;
      break;
    }
  }

  out.centroids = std::move(centroids);
  out.objective = out.objective_trace.back();
  return out;
}

inline Clustering kmedians_run(const FeatureDataset& dataset, const ClusterParams& params,
                               std::uint64_t run_seed) {
  const auto values = dataset.values();
  return kmedians_run(values, params, run_seed);
}

/// Runs `params.restarts` independent K-Medians runs and keeps the one with
/// the smallest objective (the earliest on ties).
inline Clustering best_of_restarts(std::span<const double> values, const ClusterParams& params) {
  params.validate(values.size());
  Clustering best;
  for (std::size_t r = 0; r < params.restarts; ++r) {
    Clustering run = kmedians_run(values, params, derive_seed(params.seed, r));
    if (r == 0 || run.objective < best.objective) best = std::move(run);
  }
  return best;
}

inline Clustering best_of_restarts(const FeatureDataset& dataset, const ClusterParams& params) {
  const auto values = dataset.values();
  return best_of_restarts(values, params);
}

// ---------------------------------------------------------------------------
// Exact 1-D optimum
// ---------------------------------------------------------------------------

struct DpSolution {
  double objective = 0.0;
  /// Inclusive end index of each of the first k-1 segments in the sorted input.
  std::vector<std::size_t> boundaries;

  /// Segments as [first, last] index pairs.
  std::vector<std::pair<std::size_t, std::size_t>> segments(std::size_t n) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t first = 0;
    for (std::size_t b : boundaries) {
      out.emplace_back(first, b);
      first = b + 1;
    }
    out.emplace_back(first, n - 1);
    return out;
  }
};

/// Globally optimal k-segmentation of sorted values under L1-to-median cost.
/// O(n^2 k) time with prefix sums for segment costs; the reported objective
/// is re-summed directly over the chosen segments.
inline DpSolution exact_dp(std::span<const double> sorted_values, std::size_t k) {
  const std::size_t n = sorted_values.size();
  if (k < 1) throw Error(Errc::invalid_argument, "k must be at least 1");
  if (k > n) {
    throw Error(Errc::k_too_large,
                "k = " + std::to_string(k) + " exceeds " + std::to_string(n) + " values");
  }
  if (!std::is_sorted(sorted_values.begin(), sorted_values.end())) {
    throw Error(Errc::invalid_argument, "exact_dp expects values sorted ascending");
  }

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted_values[i];
  const auto cost = [&](std::size_t first, std::size_t last) {
    const std::size_t m = first + (last - first) / 2;
    const double x = sorted_values[m];
    const double below = x * static_cast<double>(m - first + 1) - (prefix[m + 1] - prefix[first]);
    const double above = (prefix[last + 1] - prefix[m + 1]) - x * static_cast<double>(last - m);
    return below + above;
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  // best[c][j]: optimal cost of values[0..j] split into c+1 segments;
  // start[c][j]: first index of the last of those segments.
  std::vector<std::vector<double>> best(k, std::vector<double>(n, inf));
  std::vector<std::vector<std::size_t>> start(k, std::vector<std::size_t>(n, 0));
  for (std::size_t j = 0; j < n; ++j) best[0][j] = cost(0, j);
  for (std::size_t c = 1; c < k; ++c) {
    for (std::size_t j = c; j < n; ++j) {
      for (std::size_t i = c; i <= j; ++i) {
        const double candidate = best[c - 1][i - 1] + cost(i, j);
        if (candidate < best[c][j]) {
          best[c][j] = candidate;
          start[c][j] = i;
        }
      }
    }
  }

  DpSolution sol;
  std::size_t last = n - 1;
  for (std::size_t c = k - 1; c > 0; --c) {
    const std::size_t first = start[c][last];
    sol.boundaries.push_back(first - 1);
    last = first - 1;
  }
  std::reverse(sol.boundaries.begin(), sol.boundaries.end());

  for (const auto& [first, seg_last] : sol.segments(n)) {
    std::vector<double> seg(sorted_values.begin() + static_cast<std::ptrdiff_t>(first),
                            sorted_values.begin() + static_cast<std::ptrdiff_t>(seg_last) + 1);
    const double med = median(seg);
    for (double v : seg) sol.objective += std::fabs(v - med);
  }
  return sol;
}

}  // namespace emfrisk
