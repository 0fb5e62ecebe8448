#pragma once

#include <cstddef>
#include <cstdint>

#include "bot/pipeline.hpp"

namespace bot {

// Source at the origin, targets uniform in [-1, 1]^dim, areas uniform in
// (0, 1] normalised to sum to one.
OneToManyProblem random_one_to_many(std::uint64_t seed, std::size_t n_targets, int dim);

// Sources and targets uniform in [-1, 1]^dim with random normalised masses.
TransportInstance random_instance(std::uint64_t seed, std::size_t n_sources, std::size_t n_targets, int dim = 2);

struct SingleRun {
  OneToManyProblem problem;
  BuildResult build;
};

SingleRun run_synthetic_single(std::uint64_t seed, std::size_t n_targets, const BotParams& params, int dim = 2,
                               const BuildOptions& options = {});

struct MultiRun {
  TransportInstance instance;
  NetworkSolution solution;
};

MultiRun run_synthetic_multi(std::uint64_t seed, std::size_t n_sources, std::size_t n_targets, const BotParams& params,
                             const NetworkConfig& cfg = {});

}  // namespace bot
