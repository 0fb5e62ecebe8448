#include "bot/branching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bot/random.hpp"

namespace bot {

namespace {

void check_areas(double si, double sj) {
  if (!(si > 0.0) || !(sj > 0.0)) throw ParameterError("branch areas must be positive");
}

Point project_to_sphere(const Point& z) {
  const double r = norm(z);
  // The origin has no radial direction; leave it for the caller to reject.
  return r > 0.0 ? z / r : z;
}

}  // namespace

void OneToManyProblem::validate() const {
  if (targets.empty()) throw ParameterError("one-to-many problem has no targets");
  if (targets.size() != areas.size()) throw ParameterError("target and area counts differ");
  for (const Point& t : targets) {
    if (t.dim() != source.dim()) throw ParameterError("target dimension differs from source");
  }
  for (double s : areas) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError("target areas must be positive");
  }
}

Point branch_point_power(const Point& parent, const Point& vi, const Point& vj, double si, double sj, double alpha) {
  check_areas(si, sj);
  check_alpha(alpha);
  const double wi = std::pow(si, alpha);
  const double wj = std::pow(sj, alpha);
  const double wk = std::pow(si + sj, alpha);
  return (wi * vi + wj * vj + wk * parent) / (wi + wj + wk);
}

Point branch_point_interp(const Point& parent, const Point& vi, const Point& vj, double si, double sj, double alpha) {
  check_areas(si, sj);
  check_alpha(alpha);
  const Point mid = (si * vi + sj * vj) / (si + sj);
  return (1.0 - alpha) * mid + alpha * parent;
}

Point branch_point_shifted(const Point& parent, const Point& vi, const Point& vj, double si, double sj, double alpha,
                           const Point& eps, double delta) {
  if (!(delta > 0.0)) throw ParameterError("shift delta must be positive");
  return branch_point_interp(parent, vi, vj, si, sj, alpha) + eps / (si + sj + delta);
}

double local_improvement(const Point& parent, const Point& vi, const Point& vj, const Point& z, double si, double sj,
                         double alpha) {
  const double wi = std::pow(si, alpha);
  const double wj = std::pow(sj, alpha);
  const double direct = wi * distance(parent, vi) + wj * distance(parent, vj);
  const double branched = std::pow(si + sj, alpha) * distance(parent, z) + wi * distance(z, vi) + wj * distance(z, vj);
  return direct - branched;
}

Point draw_shift(int dim, double norm_value, std::uint64_t seed) {
  Rng rng = Rng(seed).split("shift");
  Point eps = Point::zero(dim);
  double len = 0.0;
  while (len == 0.0) {
    for (int k = 0; k < dim; ++k) eps[k] = rng.normal();
    len = norm(eps);
  }
  return eps * (norm_value / len);
}

double star_cost(const OneToManyProblem& problem, double alpha) {
  check_alpha(alpha);
  double cost = 0.0;
  for (std::size_t n = 0; n < problem.targets.size(); ++n) {
    cost += std::pow(problem.areas[n], alpha) * distance(problem.source, problem.targets[n]);
  }
  return cost;
}

BuildResult build_one_to_many(const OneToManyProblem& problem, const BotParams& params, const BuildOptions& options) {
  problem.validate();
  params.validate();
  const double alpha = params.alpha;
  const int dim = problem.source.dim();

  BuildResult result;
  if (params.shift_norm > 0.0) {
    result.shift = options.shift ? *options.shift : draw_shift(dim, params.shift_norm, params.seed);
    if (result.shift->dim() != dim) throw ParameterError("shift vector dimension differs from problem");
  }

  const std::size_t n_targets = problem.targets.size();
  std::vector<Point> pos;
  std::vector<double> area;
  std::vector<char> selectable;
  std::vector<int> connection;
  pos.reserve(2 * n_targets);
  area.reserve(2 * n_targets);
  pos.push_back(problem.source);
  area.push_back(std::accumulate(problem.areas.begin(), problem.areas.end(), 0.0));
  selectable.push_back(0);
  connection.push_back(kNoParent);
  for (std::size_t n = 0; n < n_targets; ++n) {
    pos.push_back(problem.targets[n]);
    area.push_back(problem.areas[n]);
    selectable.push_back(1);
    connection.push_back(0);
  }

  const Point& source = problem.source;
  auto branch_point = [&](int i, int j) {
    Point z = params.formula == BranchFormula::interp
                  ? branch_point_interp(source, pos[i], pos[j], area[i], area[j], alpha)
                  : branch_point_power(source, pos[i], pos[j], area[i], area[j], alpha);
    if (result.shift) z += *result.shift / (area[i] + area[j] + params.shift_delta);
    if (options.on_sphere) z = project_to_sphere(z);
    return z;
  };

  double cost = star_cost(problem, alpha);
  result.cost_trace.push_back(cost);

  std::vector<int> live;
  std::vector<std::pair<double, int>> candidates;
  for (;;) {
    live.clear();
    for (std::size_t n = 1; n < pos.size(); ++n) {
      if (selectable[n]) live.push_back(static_cast<int>(n));
    }
    if (live.empty()) break;
    ++result.iterations;

    int far = kNoParent;
    double far_dist = -1.0;
    for (int n : live) {
      ++result.node_touches;
      if (connection[n] != 0) throw std::logic_error("selectable node is not wired to the source");
      const double d = distance(source, pos[n]);
      if (d > far_dist) {
        far_dist = d;
        far = n;
      }
    }

    candidates.clear();
    for (int n : live) {
      if (n == far) continue;
      ++result.node_touches;
      candidates.emplace_back(distance(pos[far], pos[n]), n);
    }
    std::sort(candidates.begin(), candidates.end());
    if (options.nearest_only && candidates.size() > 1) candidates.resize(1);

    int partner = kNoParent;
    Point z;
    double gain = 0.0;
    for (const auto& [d, j] : candidates) {
      ++result.node_touches;
      Point trial = branch_point(far, j);
      const double delta = local_improvement(source, pos[far], pos[j], trial, area[far], area[j], alpha);
      if (delta > kAcceptTol) {
        partner = j;
        z = trial;
        gain = delta;
        break;
      }
    }

    if (partner != kNoParent) {
      const int b = static_cast<int>(pos.size());
      pos.push_back(z);
      area.push_back(area[far] + area[partner]);
      selectable.push_back(1);
      connection.push_back(0);
      selectable[far] = 0;
      selectable[partner] = 0;
      connection[far] = b;
      connection[partner] = b;
      cost -= gain;
      result.cost_trace.push_back(cost);
      ++result.insertions;
    } else {
      selectable[far] = 0;
    }

    if (options.observer) {
      BuilderState state;
      state.iteration = result.iterations;
      state.positions = &pos;
      state.selectable = &selectable;
      state.connection = &connection;
      state.areas = &area;
      state.picked = far;
      state.partner = partner;
      options.observer(state);
    }
  }

  std::vector<FlowNode> nodes(pos.size());
  for (std::size_t n = 0; n < pos.size(); ++n) {
    nodes[n].pos = pos[n];
    nodes[n].area = area[n];
    nodes[n].parent = connection[n];
    nodes[n].kind = n == 0 ? NodeKind::source : (n <= n_targets ? NodeKind::target : NodeKind::branch);
  }
  result.tree = FlowTree(std::move(nodes));
  // Exact cost of the final tree; the running value only differs by rounding.
  result.cost_trace.back() = bot_cost_unchecked(result.tree, alpha);
  return result;
}

}  // namespace bot
