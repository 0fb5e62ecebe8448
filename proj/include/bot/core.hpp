#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bot/error.hpp"
#include "bot/point.hpp"

namespace bot {

// Relative tolerance for mass balance checks (sum of masses, conservation).
inline constexpr double kBalanceTol = 1e-9;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix transposed() const;
  double max() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Discrete sources and targets with probability masses. Construction
// validates: positive masses summing to one, consistent dimensions, and no
// source sitting exactly on a target.
class TransportInstance {
 public:
  TransportInstance(std::vector<Point> sources, std::vector<Point> targets, std::vector<double> p,
                    std::vector<double> q);

  const std::vector<Point>& sources() const { return sources_; }
  const std::vector<Point>& targets() const { return targets_; }
  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& q() const { return q_; }
  std::size_t num_sources() const { return sources_.size(); }
  std::size_t num_targets() const { return targets_.size(); }
  int dim() const { return sources_.front().dim(); }

 private:
  std::vector<Point> sources_;
  std::vector<Point> targets_;
  std::vector<double> p_;
  std::vector<double> q_;
};

// Coupling matrix gamma together with the marginals it was solved for.
struct TransportPlan {
  Matrix gamma;
  std::vector<double> row_marginal;
  std::vector<double> col_marginal;

  // L1 distance between gamma's row sums and row_marginal (resp. columns).
  double row_error() const;
  double col_error() const;
  std::size_t support_size(double threshold = 0.0) const;
};

enum class NodeKind { source, target, branch };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);

inline constexpr int kNoParent = -1;

struct FlowNode {
  Point pos;
  NodeKind kind = NodeKind::target;
  int parent = kNoParent;
  // Sectional area on the edge (parent, node). For the source: total outflow.
  double area = 0.0;
};

// Rooted tree of one source, its targets and the branch nodes inserted
// between them. Node ids are indices into nodes().
class FlowTree {
 public:
  FlowTree() = default;
  explicit FlowTree(std::vector<FlowNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<FlowNode>& nodes() const { return nodes_; }
  std::vector<FlowNode>& nodes() { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  const FlowNode& operator[](std::size_t id) const { return nodes_[id]; }

  int add_node(FlowNode node);

  std::optional<int> source_id() const;
  std::size_t count(NodeKind kind) const;
  std::vector<std::vector<int>> children() const;
  // Number of parent edges (every non-source node contributes one).
  std::size_t edge_count() const;

 private:
  std::vector<FlowNode> nodes_;
};

enum class ViolationKind {
  no_source,
  multiple_sources,
  source_has_parent,
  orphan,
  cycle,
  bad_area,
  dimension_mismatch,
  conservation,
  target_outflow,
  source_balance,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int node = kNoParent;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

// Checks the tree structure and the node balance equations: supply at the
// source, demand at targets (leaves), conservation at branch nodes.
ValidationReport validate_tree(const FlowTree& tree);

// Sum over edges of area^alpha times edge length. Throws StructuralError on an
// invalid tree and ParameterError for alpha outside [0, 1].
double bot_cost(const FlowTree& tree, double alpha);

// Cost of the tree without validation; used inside builders that maintain the
// invariants themselves.
double bot_cost_unchecked(const FlowTree& tree, double alpha);

// m1^alpha + m2^alpha - (m1 + m2)^alpha, the saving from merging two flows.
double subadditivity_gain(double m1, double m2, double alpha);

enum class BranchFormula { interp, power };

std::string_view to_string(BranchFormula formula);
std::optional<BranchFormula> parse_branch_formula(std::string_view text);

struct BotParams {
  double alpha = 0.5;
  BranchFormula formula = BranchFormula::interp;
  // Norm of the frozen shift vector added to branch points (0 disables).
  double shift_norm = 0.0;
  double shift_delta = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

void check_alpha(double alpha);

}  // namespace bot
