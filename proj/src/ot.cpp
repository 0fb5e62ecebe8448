#include "bot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace bot {

Matrix cost_matrix(const TransportInstance& instance) {
  const auto& xs = instance.sources();
  const auto& ys = instance.targets();
  Matrix c(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) c(i, j) = distance(xs[i], ys[j]);
  }
  return c;
}

double plan_cost(const TransportPlan& plan, const Matrix& cost) {
  if (plan.gamma.rows() != cost.rows() || plan.gamma.cols() != cost.cols()) {
    throw ParameterError("plan and cost matrix shapes differ");
  }
  const auto g = plan.gamma.data();
  const auto c = cost.data();
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) total += g[k] * c[k];
  return total;
}

namespace {

void check_problem(const std::vector<double>& p, const std::vector<double>& q, const Matrix& cost) {
  if (p.empty() || q.empty()) throw ParameterError("empty marginals");
  if (cost.rows() != p.size() || cost.cols() != q.size()) {
    throw ParameterError("cost matrix shape does not match marginals");
  }
  for (double v : cost.data()) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("cost entries must be finite and nonnegative");
  }
  for (double v : p) {
    if (!(v >= 0.0)) throw ParameterError("negative source mass");
  }
  for (double v : q) {
    if (!(v >= 0.0)) throw ParameterError("negative target mass");
  }
  const double sp = std::accumulate(p.begin(), p.end(), 0.0);
  const double sq = std::accumulate(q.begin(), q.end(), 0.0);
  if (std::abs(sp - sq) > kBalanceTol * std::max(1.0, sp)) {
    std::ostringstream msg;
    msg << "infeasible marginals: supply " << sp << " vs demand " << sq;
    throw ParameterError(msg.str());
  }
}

// Spanning-tree basis of the transportation problem. Graph nodes 0..m-1 are
// rows, m..m+n-1 are columns; each basic cell is an edge.
class TransportSimplex {
 public:
  TransportSimplex(const std::vector<double>& p, const std::vector<double>& q, const Matrix& cost)
      : m_(p.size()), n_(q.size()), cost_(cost), adj_(m_ + n_), u_(m_), v_(n_) {
    cell_slot_.assign(m_ * n_, -1);
    initial_basis(p, q);
    const double cmax = std::max(cost.max(), std::numeric_limits<double>::min());
    eps_ = 1e-11 * std::max(1.0, cmax);
  }

  void solve(ExactStats& stats) {
    std::size_t degenerate_run = 0;
    for (;;) {
      compute_potentials();
      const long entering = find_entering(stats.bland_mode);
      if (entering < 0) break;
      const bool degenerate = pivot(static_cast<std::size_t>(entering));
      ++stats.pivots;
      if (degenerate) {
        ++stats.degenerate_pivots;
        if (++degenerate_run > m_ + n_) stats.bland_mode = true;
      } else {
        degenerate_run = 0;
      }
    }
  }

  Matrix plan() const {
    Matrix g(m_, n_);
    for (const Cell& c : cells_) {
      if (c.alive) g(c.i, c.j) = std::max(0.0, c.x);
    }
    return g;
  }

 private:
  struct Cell {
    std::size_t i;
    std::size_t j;
    double x;
    bool alive;
  };

  std::size_t col_node(std::size_t j) const { return m_ + j; }
  std::size_t index(const Cell& c) const { return c.i * n_ + c.j; }

  void add_cell(std::size_t i, std::size_t j, double x) {
    int slot;
    if (!free_.empty()) {
      slot = free_.back();
      free_.pop_back();
      cells_[slot] = {i, j, x, true};
    } else {
      slot = static_cast<int>(cells_.size());
      cells_.push_back({i, j, x, true});
    }
    adj_[i].push_back(slot);
    adj_[col_node(j)].push_back(slot);
    cell_slot_[i * n_ + j] = slot;
  }

  void remove_cell(int slot) {
    Cell& c = cells_[slot];
    auto drop = [slot](std::vector<int>& list) {
      list.erase(std::find(list.begin(), list.end(), slot));
    };
    drop(adj_[c.i]);
    drop(adj_[col_node(c.j)]);
    cell_slot_[index(c)] = -1;
    c.alive = false;
    free_.push_back(slot);
  }

  // Least-cost rule. Every allocation retires exactly one line (row or
  // column), the last one retires both, so the m + n - 1 allocated cells form
  // a spanning tree even when some carry zero flow.
  void initial_basis(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<std::size_t> order(m_ * n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto data = cost_.data();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return data[a] < data[b]; });

    std::vector<double> supply = p;
    std::vector<double> demand = q;
    std::vector<char> row_alive(m_, 1);
    std::vector<char> col_alive(n_, 1);
    std::size_t rows_left = m_;
    std::size_t cols_left = n_;
    for (std::size_t k : order) {
      const std::size_t i = k / n_;
      const std::size_t j = k % n_;
      if (!row_alive[i] || !col_alive[j]) continue;
      const double a = std::min(supply[i], demand[j]);
      add_cell(i, j, a);
      supply[i] -= a;
      demand[j] -= a;
      if (rows_left == 1 && cols_left == 1) break;
      bool retire_row;
      if (rows_left == 1) {
        retire_row = false;
      } else if (cols_left == 1) {
        retire_row = true;
      } else {
        retire_row = supply[i] <= demand[j];
      }
      if (retire_row) {
        row_alive[i] = 0;
        --rows_left;
      } else {
        col_alive[j] = 0;
        --cols_left;
      }
    }
  }

  void compute_potentials() {
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> queue;
    queue.reserve(m_ + n_);
    queue.push_back(0);
    seen[0] = 1;
    u_[0] = 0.0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      for (int slot : adj_[node]) {
        const Cell& c = cells_[slot];
        const std::size_t other = node < m_ ? col_node(c.j) : c.i;
        if (seen[other]) continue;
        seen[other] = 1;
        if (node < m_) {
          v_[c.j] = cost_(c.i, c.j) - u_[c.i];
        } else {
          u_[c.i] = cost_(c.i, c.j) - v_[c.j];
        }
        queue.push_back(other);
      }
    }
  }

  long find_entering(bool bland) const {
    long best = -1;
    double best_r = -eps_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto crow = cost_.row(i);
      for (std::size_t j = 0; j < n_; ++j) {
        const double r = crow[j] - u_[i] - v_[j];
        if (r < best_r) {
          if (cell_slot_[i * n_ + j] >= 0) continue;
          best = static_cast<long>(i * n_ + j);
          if (bland) return best;
          best_r = r;
        }
      }
    }
    return best;
  }

  // Path of basic cells from row i to column j through the tree.
  std::vector<int> tree_path(std::size_t i, std::size_t j) const {
    const std::size_t target = col_node(j);
    std::vector<int> via(m_ + n_, -2);
    std::vector<std::size_t> queue;
    queue.reserve(m_ + n_);
    queue.push_back(i);
    via[i] = -1;
    for (std::size_t head = 0; head < queue.size() && via[target] == -2; ++head) {
      const std::size_t node = queue[head];
      for (int slot : adj_[node]) {
        const Cell& c = cells_[slot];
        const std::size_t other = node < m_ ? col_node(c.j) : c.i;
        if (via[other] != -2) continue;
        via[other] = slot;
        queue.push_back(other);
      }
    }
    std::vector<int> path;
    std::size_t node = target;
    while (node != i) {
      const int slot = via[node];
      path.push_back(slot);
      const Cell& c = cells_[slot];
      node = node < m_ ? col_node(c.j) : c.i;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  // Returns true for a degenerate (zero step) pivot.
  bool pivot(std::size_t entering) {
    const std::size_t ei = entering / n_;
    const std::size_t ej = entering % n_;
    const std::vector<int> path = tree_path(ei, ej);
    // Along the path from row ei, signs alternate starting with minus.
    int leaving = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& c = cells_[path[k]];
      if (c.x < theta || (c.x == theta && index(c) < index(cells_[leaving]))) {
        theta = c.x;
        leaving = path[k];
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      Cell& c = cells_[path[k]];
      c.x += (k % 2 == 0) ? -theta : theta;
    }
    cells_[leaving].x = 0.0;
    remove_cell(leaving);
    add_cell(ei, ej, theta);
    return theta == 0.0;
  }

  std::size_t m_;
  std::size_t n_;
  const Matrix& cost_;
  std::vector<Cell> cells_;
  std::vector<int> free_;
  std::vector<int> cell_slot_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> u_;
  std::vector<double> v_;
  double eps_ = 0.0;
};

}  // namespace

TransportPlan solve_exact(const std::vector<double>& p, const std::vector<double>& q, const Matrix& cost,
                          ExactStats* stats) {
  check_problem(p, q, cost);
  ExactStats local;
  TransportSimplex simplex(p, q, cost);
  simplex.solve(local);
  if (stats) *stats = local;
  return TransportPlan{simplex.plan(), p, q};
}

TransportPlan solve_exact(const TransportInstance& instance, const Matrix& cost, ExactStats* stats) {
  return solve_exact(instance.p(), instance.q(), cost, stats);
}

void SinkhornConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("sinkhorn lambda must be positive");
  if (!(tol > 0.0)) throw ParameterError("sinkhorn tolerance must be positive");
  if (max_iter < 1) throw ParameterError("sinkhorn max_iter must be at least 1");
}

SinkhornResult solve_sinkhorn(const std::vector<double>& p, const std::vector<double>& q, const Matrix& cost,
                              const SinkhornConfig& cfg) {
  check_problem(p, q, cost);
  cfg.validate();
  const std::size_t m = p.size();
  const std::size_t n = q.size();

  const double cmax = cost.max();
  const double scale = cmax > 0.0 ? cmax : 1.0;
  const double lambda = cfg.lambda / scale;
  Matrix kernel(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) kernel(i, j) = std::exp(-(cost(i, j) / scale) / lambda);
  }
  auto underflow = [&](const char* what, std::size_t k) {
    std::ostringstream msg;
    msg << "sinkhorn kernel " << what << ' ' << k << " underflowed to zero at lambda " << cfg.lambda
        << "; use a larger lambda";
    return ConvergenceError(msg.str());
  };
  std::vector<double> col_sum(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row_sum += kernel(i, j);
      col_sum[j] += kernel(i, j);
    }
    if (!(row_sum > 0.0)) throw underflow("row", i);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!(col_sum[j] > 0.0)) throw underflow("column", j);
  }

  std::vector<double> u(m, 1.0);
  std::vector<double> v(n, 1.0);
  std::vector<double> ktu(n);
  SinkhornResult result;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    std::fill(ktu.begin(), ktu.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto krow = kernel.row(i);
      for (std::size_t j = 0; j < n; ++j) ktu[j] += krow[j] * u[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!(ktu[j] > 0.0) || !std::isfinite(ktu[j])) throw underflow("column scaling", j);
      v[j] = q[j] / ktu[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      const auto krow = kernel.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += krow[j] * v[j];
      if (!(s > 0.0) || !std::isfinite(s)) throw underflow("row scaling", i);
      u[i] = p[i] / s;
    }
    // Rows now match exactly; measure the column residual.
    std::fill(ktu.begin(), ktu.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto krow = kernel.row(i);
      for (std::size_t j = 0; j < n; ++j) ktu[j] += krow[j] * u[i];
    }
    double col_err = 0.0;
    for (std::size_t j = 0; j < n; ++j) col_err += std::abs(v[j] * ktu[j] - q[j]);
    result.iterations = it;
    result.col_error = col_err;
    if (col_err < cfg.tol) {
      result.converged = true;
      break;
    }
  }

  Matrix gamma(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) gamma(i, j) = u[i] * kernel(i, j) * v[j];
  }
  result.plan = TransportPlan{std::move(gamma), p, q};
  result.row_error = result.plan.row_error();
  result.col_error = result.plan.col_error();
  return result;
}

SinkhornResult solve_sinkhorn(const TransportInstance& instance, const Matrix& cost, const SinkhornConfig& cfg) {
  return solve_sinkhorn(instance.p(), instance.q(), cost, cfg);
}

std::vector<std::vector<Assignment>> plan_to_assignments(const TransportPlan& plan, double threshold) {
  if (!(threshold >= 0.0)) throw ParameterError("assignment threshold must be nonnegative");
  std::vector<std::vector<Assignment>> out(plan.gamma.rows());
  for (std::size_t i = 0; i < plan.gamma.rows(); ++i) {
    const auto row = plan.gamma.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] > threshold) out[i].push_back({j, row[j]});
    }
  }
  return out;
}

}  // namespace bot
