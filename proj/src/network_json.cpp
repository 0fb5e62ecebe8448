#include "bot/network_json.hpp"

#include <iomanip>
#include <map>
#include <ostream>

#include "bot/ot.hpp"

namespace bot {

namespace {

ordered_json coords_json(const Point& p) {
  ordered_json arr = ordered_json::array();
  for (double c : p.coords()) arr.push_back(c);
  return arr;
}

}  // namespace

ordered_json network_to_json(std::span<const FlowTree> trees, double alpha) {
  ordered_json doc;
  ordered_json nodes = ordered_json::array();
  ordered_json edges = ordered_json::array();
  double cost = 0.0;
  std::size_t offset = 0;
  for (const FlowTree& tree : trees) {
    cost += bot_cost(tree, alpha);
    for (std::size_t n = 0; n < tree.size(); ++n) {
      const FlowNode& node = tree[n];
      ordered_json jn;
      jn["id"] = offset + n;
      jn["kind"] = to_string(node.kind);
      jn["coords"] = coords_json(node.pos);
      nodes.push_back(std::move(jn));
    }
    for (std::size_t n = 0; n < tree.size(); ++n) {
      const FlowNode& node = tree[n];
      if (node.parent == kNoParent) continue;
      ordered_json je;
      je["from"] = offset + static_cast<std::size_t>(node.parent);
      je["to"] = offset + n;
      je["area"] = node.area;
      edges.push_back(std::move(je));
    }
    offset += tree.size();
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["alpha"] = alpha;
  doc["cost"] = cost;
  return doc;
}

std::string dump_json(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ParsedNetwork network_from_json(const nlohmann::json& doc) {
  ParsedNetwork out;
  try {
    const auto& jnodes = doc.at("nodes");
    const auto& jedges = doc.at("edges");
    out.alpha = doc.at("alpha").get<double>();
    out.cost = doc.at("cost").get<double>();

    std::map<long long, std::size_t> index;
    std::vector<FlowNode> nodes;
    for (const auto& jn : jnodes) {
      const long long id = jn.at("id").get<long long>();
      const auto kind = parse_node_kind(jn.at("kind").get<std::string>());
      if (!kind) throw InputError("unknown node kind for node " + std::to_string(id));
      const auto coords = jn.at("coords").get<std::vector<double>>();
      if (!index.emplace(id, nodes.size()).second) throw InputError("duplicate node id " + std::to_string(id));
      FlowNode node;
      node.pos = Point(std::span<const double>(coords));
      node.kind = *kind;
      nodes.push_back(std::move(node));
    }
    for (const auto& je : jedges) {
      const auto from = index.find(je.at("from").get<long long>());
      const auto to = index.find(je.at("to").get<long long>());
      if (from == index.end() || to == index.end()) throw InputError("edge refers to an unknown node");
      FlowNode& child = nodes[to->second];
      if (child.parent != kNoParent) throw StructuralError("node with two incoming edges; only trees are supported");
      child.parent = static_cast<int>(from->second);
      child.area = je.at("area").get<double>();
    }
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (nodes[n].parent != kNoParent && nodes[nodes[n].parent].kind == NodeKind::source) {
        nodes[nodes[n].parent].area += nodes[n].area;
      }
    }

    // Root of every node; guards against cycles by bounding the walk.
    std::vector<long> root(nodes.size(), -1);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      std::size_t cur = n;
      std::size_t steps = 0;
      while (nodes[cur].parent != kNoParent) {
        cur = static_cast<std::size_t>(nodes[cur].parent);
        if (++steps > nodes.size()) throw StructuralError("cycle in network edges");
      }
      if (nodes[cur].kind != NodeKind::source) throw StructuralError("node not connected to a source");
      root[n] = static_cast<long>(cur);
    }
    std::map<long, std::size_t> tree_of;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      auto [it, fresh] = tree_of.emplace(root[n], members.size());
      if (fresh) members.emplace_back();
      members[it->second].push_back(n);
    }
    for (const auto& list : members) {
      std::map<std::size_t, int> local;
      for (std::size_t n : list) local.emplace(n, static_cast<int>(local.size()));
      std::vector<FlowNode> tree_nodes;
      for (std::size_t n : list) {
        FlowNode node = nodes[n];
        if (node.parent != kNoParent) node.parent = local.at(static_cast<std::size_t>(node.parent));
        tree_nodes.push_back(std::move(node));
      }
      out.trees.emplace_back(std::move(tree_nodes));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed network JSON: ") + e.what());
  }
  return out;
}

ordered_json plan_to_json(const TransportInstance& instance, const TransportPlan& plan, double cost,
                          double threshold) {
  ordered_json doc;
  ordered_json nodes = ordered_json::array();
  ordered_json edges = ordered_json::array();
  const std::size_t m = instance.num_sources();
  for (std::size_t i = 0; i < m; ++i) {
    ordered_json jn;
    jn["id"] = i;
    jn["kind"] = "source";
    jn["coords"] = coords_json(instance.sources()[i]);
    nodes.push_back(std::move(jn));
  }
  for (std::size_t j = 0; j < instance.num_targets(); ++j) {
    ordered_json jn;
    jn["id"] = m + j;
    jn["kind"] = "target";
    jn["coords"] = coords_json(instance.targets()[j]);
    nodes.push_back(std::move(jn));
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < instance.num_targets(); ++j) {
      if (!(plan.gamma(i, j) > threshold)) continue;
      ordered_json je;
      je["from"] = i;
      je["to"] = m + j;
      je["area"] = plan.gamma(i, j);
      edges.push_back(std::move(je));
    }
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["alpha"] = 1.0;
  doc["cost"] = cost;
  return doc;
}

void write_cost_trace(std::ostream& out, std::span<const double> trace) {
  out << "iter,cost\n";
  const auto old = out.precision(17);
  for (std::size_t k = 0; k < trace.size(); ++k) out << k << ',' << trace[k] << '\n';
  out.precision(old);
}

}  // namespace bot
