#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bot/branching.hpp"
#include "bot/clustering.hpp"
#include "bot/core.hpp"
#include "bot/geo.hpp"
#include "bot/ot.hpp"

namespace bot {

// Runs task(0) .. task(count - 1) on up to `workers` threads (0 picks the
// hardware concurrency). The first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task);

enum class OtMode { exact, sinkhorn };

std::string_view to_string(OtMode mode);
std::optional<OtMode> parse_ot_mode(std::string_view text);

struct NetworkConfig {
  OtMode ot_mode = OtMode::exact;
  SinkhornConfig sinkhorn;
  // Defaults to kExactThreshold or kSinkhornThreshold by mode.
  std::optional<double> threshold;
  unsigned workers = 0;
  bool nearest_only = false;
};

struct NetworkReport {
  // <gamma, c>, the mass-weighted OT objective.
  double plan_cost = 0.0;
  // Sum over sources of the direct (star) wiring cost at alpha.
  double star_cost = 0.0;
  // Sum over sources of the branched tree cost at alpha.
  double bot_cost = 0.0;
  std::size_t branch_nodes = 0;
  std::size_t insertions = 0;
  std::optional<SinkhornResult> sinkhorn;
};

struct NetworkSolution {
  TransportPlan plan;
  // One tree per source that received mass; source_index maps back.
  std::vector<FlowTree> trees;
  std::vector<std::size_t> source_index;
  // Target index (into the instance) of every tree's target nodes, in node order.
  std::vector<std::vector<std::size_t>> tree_targets;
  NetworkReport report;
};

// Solves the assignment, then builds one branched tree per source over its
// assigned targets with areas gamma_ij.
NetworkSolution solve_network(const TransportInstance& instance, const BotParams& params,
                              const NetworkConfig& cfg = {});

struct DualNetwork {
  FlowTree arteries;
  FlowTree veins;
  Point artery_shift;
  Point vein_shift;
  double artery_cost = 0.0;
  double vein_cost = 0.0;
};

// Two builds over the same targets with independently drawn, frozen shift
// vectors. With shift_norm == 0 both trees are identical.
DualNetwork dual_network(const OneToManyProblem& problem, const BotParams& params);

struct GeoCity {
  std::string name;
  std::string country;
  double lat = 0.0;
  double lon = 0.0;
  double population = 0.0;

  void validate() const;
};

struct RegionNetwork {
  Point center;
  double population = 0.0;
  // Indices into the city list, in target-node order of `tree`.
  std::vector<std::size_t> cities;
  FlowTree tree;
};

struct CountryNetwork {
  std::string country;
  Point center;
  double population = 0.0;
  std::size_t k = 0;
  // Center -> regional centers.
  FlowTree tree;
  std::vector<RegionNetwork> regions;
};

struct HierarchicalNetwork {
  LatLon pole;
  // Pole -> national centers, in `countries` order (sorted by name).
  FlowTree global_tree;
  std::vector<CountryNetwork> countries;
  double alpha = 0.0;
};

struct SantaConfig {
  LatLon pole{90.0, 0.0};
  BotParams params;
  KMeansConfig kmeans;
  unsigned workers = 0;
};

// National centers are population centroids, regional centers come from
// weighted k-means with K = choose_k(cities in country), and every level is a
// branched tree with population-share areas. All geometry lives on the unit
// sphere; branch points are projected back onto it.
HierarchicalNetwork santa_pipeline(const std::vector<GeoCity>& cities, const SantaConfig& cfg);

}  // namespace bot
