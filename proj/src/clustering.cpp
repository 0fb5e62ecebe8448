#include "bot/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "bot/random.hpp"

namespace bot {

namespace {

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

std::size_t nearest(const Point& x, const std::vector<Point>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(x, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

void WeightedPointSet::validate() const {
  if (points.size() != weights.size()) throw ParameterError("point and weight counts differ");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("weights must be positive");
  }
  for (const Point& x : points) {
    if (x.dim() != points.front().dim()) throw ParameterError("mixed point dimensions");
  }
}

Point weighted_centroid(const WeightedPointSet& set) {
  set.validate();
  if (set.points.empty()) throw ParameterError("weighted centroid of an empty set");
  Point acc = Point::zero(set.points.front().dim());
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    acc += set.weights[i] * set.points[i];
    total += set.weights[i];
  }
  return acc / total;
}

std::size_t choose_k(std::size_t n) {
  if (n == 0) throw ParameterError("choose_k needs at least one point");
  auto root = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (root * root > n) --root;
  while ((root + 1) * (root + 1) <= n) ++root;
  return std::min(root + 1, n);
}

double kmeans_objective(const WeightedPointSet& set, const std::vector<Point>& centroids,
                        const std::vector<std::size_t>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    total += set.weights[i] * squared_distance(set.points[i], centroids[labels[i]]);
  }
  return total;
}

std::vector<Point> kmeanspp_seed(const WeightedPointSet& set, std::size_t k, std::uint64_t seed) {
  set.validate();
  if (k < 1 || k > set.size()) throw ParameterError("k must lie in [1, number of points]");
  Rng rng = Rng(seed).split("kmeans++");
  const std::size_t n = set.size();

  auto draw = [&](const std::vector<double>& mass) -> std::optional<std::size_t> {
    double total = 0.0;
    for (double m : mass) total += m;
    if (!(total > 0.0)) return std::nullopt;
    const double r = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mass[i] <= 0.0) continue;
      acc += mass[i];
      last = i;
      if (r < acc) return i;
    }
    return last;
  };

  std::vector<Point> centers;
  std::vector<char> chosen(n, 0);
  const std::size_t first = *draw(set.weights);
  centers.push_back(set.points[first]);
  chosen[first] = 1;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(set.points[i], centers[0]);

  std::vector<double> mass(n);
  while (centers.size() < k) {
    for (std::size_t i = 0; i < n; ++i) mass[i] = chosen[i] ? 0.0 : set.weights[i] * d2[i];
    std::optional<std::size_t> pick = draw(mass);
    if (!pick) {
      // All remaining points coincide with chosen centers; take the first
      // unchosen one so exactly k centers come back.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), 0) - chosen.begin());
    }
    centers.push_back(set.points[*pick]);
    chosen[*pick] = 1;
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(set.points[i], centers.back()));
  }
  return centers;
}

KMeansResult weighted_kmeans(const WeightedPointSet& set, std::vector<Point> initial, const KMeansConfig& cfg) {
  set.validate();
  const std::size_t n = set.size();
  const std::size_t k = initial.size();
  if (k < 1 || k > n) throw ParameterError("k must lie in [1, number of points]");
  if (!(cfg.tol > 0.0)) throw ParameterError("k-means tolerance must be positive");
  const int dim = set.points.front().dim();

  KMeansResult result;
  result.centroids = std::move(initial);
  result.labels.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) result.labels[i] = nearest(set.points[i], result.centroids);

  std::vector<double> cluster_weight(k);
  std::vector<Point> sums(k);
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    // Repair empty clusters: move the centroid onto the point contributing the
    // most to the objective. That point's own term drops to zero, so the
    // objective cannot rise.
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t l : result.labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t worst = n;
      double worst_cost = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[result.labels[i]] <= 1) continue;
        const double cost = set.weights[i] * squared_distance(set.points[i], result.centroids[result.labels[i]]);
        if (cost > worst_cost) {
          worst_cost = cost;
          worst = i;
        }
      }
      if (worst == n) break;
      --counts[result.labels[worst]];
      result.labels[worst] = c;
      result.centroids[c] = set.points[worst];
      counts[c] = 1;
    }

    std::fill(cluster_weight.begin(), cluster_weight.end(), 0.0);
    std::fill(sums.begin(), sums.end(), Point::zero(dim));
    for (std::size_t i = 0; i < n; ++i) {
      sums[result.labels[i]] += set.weights[i] * set.points[i];
      cluster_weight[result.labels[i]] += set.weights[i];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (cluster_weight[c] > 0.0) result.centroids[c] = sums[c] / cluster_weight[c];
    }
    result.objective_trace.push_back(kmeans_objective(set, result.centroids, result.labels));
    result.iterations = it + 1;
    const std::size_t t = result.objective_trace.size();
    if (t >= 2 && result.objective_trace[t - 2] - result.objective_trace[t - 1] < cfg.tol) break;

    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t l = nearest(set.points[i], result.centroids);
      // Keep the current label on ties so a converged state is a fixed point.
      if (l != result.labels[i] && squared_distance(set.points[i], result.centroids[l]) <
                                       squared_distance(set.points[i], result.centroids[result.labels[i]])) {
        result.labels[i] = l;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return result;
}

KMeansResult weighted_kmeans(const WeightedPointSet& set, std::size_t k, const KMeansConfig& cfg) {
  return weighted_kmeans(set, kmeanspp_seed(set, k, cfg.seed), cfg);
}

}  // namespace bot
