#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bot/core.hpp"

namespace bot {

using ordered_json = nlohmann::ordered_json;

// Network-JSON document:
//   {"nodes": [{"id", "kind", "coords"}...],
//    "edges": [{"from", "to", "area"}...],
//    "alpha": a, "cost": c}
// A forest is written as one document with globally unique node ids (each
// tree's ids offset by the node count of the trees before it). "cost" is the
// sum of bot_cost over the trees.
ordered_json network_to_json(std::span<const FlowTree> trees, double alpha);
inline ordered_json network_to_json(const FlowTree& tree, double alpha) {
  return network_to_json(std::span<const FlowTree>(&tree, 1), alpha);
}

// Pretty-printed document with a trailing newline. Byte-identical for
// identical inputs.
std::string dump_json(const ordered_json& doc);

struct ParsedNetwork {
  std::vector<FlowTree> trees;
  double alpha = 0.0;
  double cost = 0.0;
};

// Splits the document back into one tree per source. Source areas are
// reconstructed as their total outflow. Throws InputError on malformed
// documents and StructuralError when an edge set is not a forest.
ParsedNetwork network_from_json(const nlohmann::json& doc);

// Debug view of a plan: sources and targets as nodes, one edge per positive
// entry with area gamma_ij, alpha 1 and cost <gamma, c>.
ordered_json plan_to_json(const TransportInstance& instance, const TransportPlan& plan, double cost,
                          double threshold = 0.0);

// "iter,cost" header followed by one line per trace entry.
void write_cost_trace(std::ostream& out, std::span<const double> trace);

}  // namespace bot
