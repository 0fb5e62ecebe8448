#include "bot/harness.hpp"

#include "bot/random.hpp"

namespace bot {

namespace {

std::vector<Point> uniform_points(Rng rng, std::size_t n, int dim) {
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Point p = Point::zero(dim);
    for (int d = 0; d < dim; ++d) p[d] = rng.uniform(-1.0, 1.0);
    out.push_back(p);
  }
  return out;
}

std::vector<double> normalized_masses(Rng rng, std::size_t n) {
  std::vector<double> m(n);
  double total = 0.0;
  for (double& v : m) {
    v = rng.uniform_positive();
    total += v;
  }
  for (double& v : m) v /= total;
  return m;
}

}  // namespace

OneToManyProblem random_one_to_many(std::uint64_t seed, std::size_t n_targets, int dim) {
  const Rng rng(seed);
  OneToManyProblem problem;
  problem.source = Point::zero(dim);
  problem.targets = uniform_points(rng.split("positions"), n_targets, dim);
  problem.areas = normalized_masses(rng.split("areas"), n_targets);
  return problem;
}

TransportInstance random_instance(std::uint64_t seed, std::size_t n_sources, std::size_t n_targets, int dim) {
  const Rng rng(seed);
  return TransportInstance(uniform_points(rng.split("sources"), n_sources, dim),
                           uniform_points(rng.split("targets"), n_targets, dim),
                           normalized_masses(rng.split("source-masses"), n_sources),
                           normalized_masses(rng.split("target-masses"), n_targets));
}

SingleRun run_synthetic_single(std::uint64_t seed, std::size_t n_targets, const BotParams& params, int dim,
                               const BuildOptions& options) {
  SingleRun run{random_one_to_many(seed, n_targets, dim), {}};
  run.build = build_one_to_many(run.problem, params, options);
  return run;
}

MultiRun run_synthetic_multi(std::uint64_t seed, std::size_t n_sources, std::size_t n_targets, const BotParams& params,
                             const NetworkConfig& cfg) {
  MultiRun run{random_instance(seed, n_sources, n_targets, 2), {}};
  run.solution = solve_network(run.instance, params, cfg);
  return run;
}

}  // namespace bot
