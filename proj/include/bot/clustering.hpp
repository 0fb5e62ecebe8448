#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bot/core.hpp"

namespace bot {

struct WeightedPointSet {
  std::vector<Point> points;
  std::vector<double> weights;

  void validate() const;
  std::size_t size() const { return points.size(); }
};

// Sum(p_i x_i) / Sum(p_i).
Point weighted_centroid(const WeightedPointSet& set);

// floor(sqrt(n)) + 1, clamped to n.
std::size_t choose_k(std::size_t n);

struct KMeansConfig {
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::size_t max_iter = 200;
};

struct KMeansResult {
  std::vector<Point> centroids;
  std::vector<std::size_t> labels;
  // Weighted within-cluster sum of squares after each Lloyd iteration.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;

  double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

double kmeans_objective(const WeightedPointSet& set, const std::vector<Point>& centroids,
                        const std::vector<std::size_t>& labels);

// Weighted Lloyd iteration seeded with weighted k-means++.
KMeansResult weighted_kmeans(const WeightedPointSet& set, std::size_t k, const KMeansConfig& cfg = {});

// Lloyd iteration from the given centroids.
KMeansResult weighted_kmeans(const WeightedPointSet& set, std::vector<Point> initial, const KMeansConfig& cfg = {});

// Weighted k-means++ seeding: each further center is drawn with probability
// proportional to p_i times the squared distance to the nearest chosen center.
std::vector<Point> kmeanspp_seed(const WeightedPointSet& set, std::size_t k, std::uint64_t seed);

}  // namespace bot
