#include "bot/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "bot/random.hpp"

namespace bot {

// ---------------------------------------------------------------------------
// Point

Point::Point(std::initializer_list<double> coords) : Point(std::span<const double>(coords.begin(), coords.size())) {}

Point::Point(std::span<const double> coords) {
  if (coords.size() < 2 || coords.size() > kMaxDim) {
    throw ParameterError("point dimension must be 2 or 3, got " + std::to_string(coords.size()));
  }
  dim_ = static_cast<int>(coords.size());
  for (int k = 0; k < dim_; ++k) {
    if (!std::isfinite(coords[k])) throw ParameterError("point coordinate is not finite");
    c_[k] = coords[k];
  }
}

Point Point::zero(int dim) {
  if (dim < 2 || dim > kMaxDim) throw ParameterError("point dimension must be 2 or 3");
  Point p;
  p.dim_ = dim;
  return p;
}

static void require_same_dim(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw ParameterError("point dimension mismatch");
}

Point& Point::operator+=(const Point& o) {
  require_same_dim(*this, o);
  for (int k = 0; k < dim_; ++k) c_[k] += o.c_[k];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  require_same_dim(*this, o);
  for (int k = 0; k < dim_; ++k) c_[k] -= o.c_[k];
  return *this;
}

Point& Point::operator*=(double s) {
  for (int k = 0; k < dim_; ++k) c_[k] *= s;
  return *this;
}

Point& Point::operator/=(double s) {
  for (int k = 0; k < dim_; ++k) c_[k] /= s;
  return *this;
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim_ != b.dim_) return false;
  for (int k = 0; k < a.dim_; ++k) {
    if (a.c_[k] != b.c_[k]) return false;
  }
  return true;
}

std::string Point::to_string() const {
  std::ostringstream out;
  out << '(';
  for (int k = 0; k < dim_; ++k) out << (k ? ", " : "") << c_[k];
  out << ')';
  return out.str();
}

double dot(const Point& a, const Point& b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) s += a[k] * b[k];
  return s;
}

double norm(const Point& a) {
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) s += a[k] * a[k];
  return std::sqrt(s);
}

double distance(const Point& a, const Point& b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Rng

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::string_view purpose) const {
  // FNV-1a over the purpose label, mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : purpose) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return Rng(splitmix64(seed_ ^ splitmix64(h)));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() { return normal_(engine_); }

std::size_t Rng::below(std::size_t n) {
  if (n == 0) return 0;
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

// ---------------------------------------------------------------------------
// Matrix

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

double Matrix::max() const {
  if (data_.empty()) return 0.0;
  return *std::max_element(data_.begin(), data_.end());
}

// ---------------------------------------------------------------------------
// TransportInstance

namespace {

void check_masses(const std::vector<double>& m, const char* name) {
  if (m.empty()) throw ParameterError(std::string(name) + " masses are empty");
  double total = 0.0;
  for (double v : m) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ParameterError(std::string(name) + " masses must be positive and finite");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kBalanceTol) {
    std::ostringstream msg;
    msg << name << " masses sum to " << total << ", expected 1";
    throw ParameterError(msg.str());
  }
}

}  // namespace

TransportInstance::TransportInstance(std::vector<Point> sources, std::vector<Point> targets,
                                     std::vector<double> p, std::vector<double> q)
    : sources_(std::move(sources)), targets_(std::move(targets)), p_(std::move(p)), q_(std::move(q)) {
  if (sources_.empty() || targets_.empty()) throw ParameterError("instance needs sources and targets");
  if (sources_.size() != p_.size()) throw ParameterError("source count and mass count differ");
  if (targets_.size() != q_.size()) throw ParameterError("target count and mass count differ");
  check_masses(p_, "source");
  check_masses(q_, "target");
  const int d = sources_.front().dim();
  std::set<std::array<double, Point::kMaxDim>> source_coords;
  for (const Point& x : sources_) {
    if (x.dim() != d) throw ParameterError("mixed point dimensions in instance");
    source_coords.insert({x[0], x[1], d == 3 ? x[2] : 0.0});
  }
  for (std::size_t j = 0; j < targets_.size(); ++j) {
    const Point& y = targets_[j];
    if (y.dim() != d) throw ParameterError("mixed point dimensions in instance");
    if (source_coords.count({y[0], y[1], d == 3 ? y[2] : 0.0})) {
      throw ParameterError("target " + std::to_string(j) + " coincides with a source at " + y.to_string());
    }
  }
}

// ---------------------------------------------------------------------------
// TransportPlan

double TransportPlan::row_error() const {
  double err = 0.0;
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    const auto r = gamma.row(i);
    err += std::abs(std::accumulate(r.begin(), r.end(), 0.0) - row_marginal[i]);
  }
  return err;
}

double TransportPlan::col_error() const {
  std::vector<double> sums(gamma.cols(), 0.0);
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    for (std::size_t j = 0; j < gamma.cols(); ++j) sums[j] += gamma(i, j);
  }
  double err = 0.0;
  for (std::size_t j = 0; j < gamma.cols(); ++j) err += std::abs(sums[j] - col_marginal[j]);
  return err;
}

std::size_t TransportPlan::support_size(double threshold) const {
  const auto d = gamma.data();
  return static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [&](double v) { return v > threshold; }));
}

// ---------------------------------------------------------------------------
// FlowTree

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::source: return "source";
    case NodeKind::target: return "target";
    case NodeKind::branch: return "branch";
  }
  return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  if (text == "source") return NodeKind::source;
  if (text == "target") return NodeKind::target;
  if (text == "branch") return NodeKind::branch;
  return std::nullopt;
}

int FlowTree::add_node(FlowNode node) {
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

std::optional<int> FlowTree::source_id() const {
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    if (nodes_[n].kind == NodeKind::source) return static_cast<int>(n);
  }
  return std::nullopt;
}

std::size_t FlowTree::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [kind](const FlowNode& n) { return n.kind == kind; }));
}

std::vector<std::vector<int>> FlowTree::children() const {
  std::vector<std::vector<int>> out(nodes_.size());
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    const int p = nodes_[n].parent;
    if (p >= 0 && static_cast<std::size_t>(p) < nodes_.size()) out[p].push_back(static_cast<int>(n));
  }
  return out;
}

std::size_t FlowTree::edge_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const FlowNode& n) { return n.parent != kNoParent; }));
}

// ---------------------------------------------------------------------------
// Validation

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::no_source: return "no-source";
    case ViolationKind::multiple_sources: return "multiple-sources";
    case ViolationKind::source_has_parent: return "source-has-parent";
    case ViolationKind::orphan: return "orphan";
    case ViolationKind::cycle: return "cycle";
    case ViolationKind::bad_area: return "bad-area";
    case ViolationKind::dimension_mismatch: return "dimension-mismatch";
    case ViolationKind::conservation: return "conservation";
    case ViolationKind::target_outflow: return "target-outflow";
    case ViolationKind::source_balance: return "source-balance";
  }
  return "?";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    const Violation& v = violations[k];
    if (k) out << "; ";
    out << to_string(v.kind);
    if (v.node != kNoParent) out << " at node " << v.node;
    if (v.residual != 0.0) out << " (residual " << v.residual << ")";
  }
  return out.str();
}

namespace {

bool balanced(double expected, double actual) {
  return std::abs(expected - actual) <= kBalanceTol * std::max(1.0, std::abs(expected));
}

}  // namespace

ValidationReport validate_tree(const FlowTree& tree) {
  ValidationReport report;
  auto flag = [&](ViolationKind kind, int node, double residual = 0.0) {
    report.violations.push_back({kind, node, residual});
  };

  const auto& nodes = tree.nodes();
  const int n = static_cast<int>(nodes.size());
  int source = kNoParent;
  for (int id = 0; id < n; ++id) {
    if (nodes[id].kind != NodeKind::source) continue;
    if (source == kNoParent) {
      source = id;
    } else {
      flag(ViolationKind::multiple_sources, id);
    }
  }
  if (source == kNoParent) flag(ViolationKind::no_source, kNoParent);

  bool structure_ok = true;
  for (int id = 0; id < n; ++id) {
    const FlowNode& node = nodes[id];
    if (!(node.area > 0.0) || !std::isfinite(node.area)) flag(ViolationKind::bad_area, id, node.area);
    if (n > 0 && node.pos.dim() != nodes[0].pos.dim()) flag(ViolationKind::dimension_mismatch, id);
    if (node.kind == NodeKind::source) {
      if (node.parent != kNoParent) {
        flag(ViolationKind::source_has_parent, id);
        structure_ok = false;
      }
    } else if (node.parent < 0 || node.parent >= n || node.parent == id) {
      flag(ViolationKind::orphan, id);
      structure_ok = false;
    }
  }
  if (!structure_ok) return report;

  // Every node must reach the source by following parents. Walks are
  // memoised: 0 unvisited, 1 on the current path, 2 reaches the source.
  std::vector<char> state(n, 0);
  for (int start = 0; start < n; ++start) {
    std::vector<int> path;
    int cur = start;
    while (cur != kNoParent && state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = nodes[cur].parent;
    }
    const bool looped = cur != kNoParent && state[cur] == 1;
    if (looped) {
      flag(ViolationKind::cycle, cur);
      structure_ok = false;
    }
    for (int id : path) state[id] = looped ? 3 : 2;
    if (cur != kNoParent && state[cur] == 3) {
      for (int id : path) state[id] = 3;
    }
  }
  if (!structure_ok) return report;

  const auto kids = tree.children();
  double target_total = 0.0;
  for (int id = 0; id < n; ++id) {
    const FlowNode& node = nodes[id];
    double outflow = 0.0;
    for (int c : kids[id]) outflow += nodes[c].area;
    switch (node.kind) {
      case NodeKind::target:
        target_total += node.area;
        if (!kids[id].empty()) flag(ViolationKind::target_outflow, id, outflow);
        break;
      case NodeKind::branch:
        if (!balanced(node.area, outflow)) flag(ViolationKind::conservation, id, node.area - outflow);
        break;
      case NodeKind::source:
        if (!balanced(node.area, outflow)) flag(ViolationKind::source_balance, id, node.area - outflow);
        break;
    }
  }
  if (source != kNoParent && !balanced(nodes[source].area, target_total)) {
    flag(ViolationKind::source_balance, source, nodes[source].area - target_total);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Cost functional

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

double bot_cost_unchecked(const FlowTree& tree, double alpha) {
  double cost = 0.0;
  const auto& nodes = tree.nodes();
  for (const FlowNode& node : nodes) {
    if (node.parent == kNoParent) continue;
    cost += std::pow(node.area, alpha) * distance(nodes[node.parent].pos, node.pos);
  }
  return cost;
}

double bot_cost(const FlowTree& tree, double alpha) {
  check_alpha(alpha);
  const ValidationReport report = validate_tree(tree);
  if (!report.ok()) throw StructuralError("invalid flow tree: " + report.summary());
  return bot_cost_unchecked(tree, alpha);
}

double subadditivity_gain(double m1, double m2, double alpha) {
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw ParameterError("masses must be positive");
  check_alpha(alpha);
  return std::pow(m1, alpha) + std::pow(m2, alpha) - std::pow(m1 + m2, alpha);
}

// ---------------------------------------------------------------------------
// BotParams

std::string_view to_string(BranchFormula formula) {
  return formula == BranchFormula::interp ? "interp" : "power";
}

std::optional<BranchFormula> parse_branch_formula(std::string_view text) {
  if (text == "interp") return BranchFormula::interp;
  if (text == "power") return BranchFormula::power;
  return std::nullopt;
}

void BotParams::validate() const {
  check_alpha(alpha);
  if (!(shift_norm >= 0.0) || !std::isfinite(shift_norm)) throw ParameterError("shift norm must be nonnegative");
  if (shift_norm > 0.0 && !(shift_delta > 0.0)) throw ParameterError("shift delta must be positive");
}

}  // namespace bot
