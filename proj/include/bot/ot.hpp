#pragma once

#include <cstddef>
#include <vector>

#include "bot/core.hpp"

namespace bot {

// Pairwise Euclidean distances c(i, j) = |x_i - y_j|.
Matrix cost_matrix(const TransportInstance& instance);

// Frobenius product <gamma, c>.
double plan_cost(const TransportPlan& plan, const Matrix& cost);

struct ExactStats {
  std::size_t pivots = 0;
  std::size_t degenerate_pivots = 0;
  bool bland_mode = false;
};

// Exact minimum-cost plan via the transportation simplex (MODI potentials on a
// spanning-tree basis). The result is a basic solution: at most
// N_x + N_y - 1 positive entries. Deterministic: entering cells are chosen by
// most negative reduced cost with the lowest row-major index on ties, falling
// back to Bland's rule after a long run of degenerate pivots.
TransportPlan solve_exact(const TransportInstance& instance, const Matrix& cost, ExactStats* stats = nullptr);

// Marginal-only overload used by tests and oracles.
TransportPlan solve_exact(const std::vector<double>& p, const std::vector<double>& q, const Matrix& cost,
                          ExactStats* stats = nullptr);

struct SinkhornConfig {
  double lambda = 0.01;
  double tol = 1e-9;
  std::size_t max_iter = 100000;

  void validate() const;
};

struct SinkhornResult {
  TransportPlan plan;
  std::size_t iterations = 0;
  // L1 marginal errors after the last iteration. Rows are exact up to rounding
  // because the final half-step rescales rows.
  double row_error = 0.0;
  double col_error = 0.0;
  bool converged = false;
};

// Entropic-regularised plan gamma = diag(u) K diag(v), K = exp(-c / lambda),
// with entropy H(gamma) = -sum gamma (log gamma - 1). The cost is divided by
// its maximum and lambda rescaled by the same factor before exponentiating.
// Throws ConvergenceError when a row or column of K underflows to zero.
SinkhornResult solve_sinkhorn(const TransportInstance& instance, const Matrix& cost, const SinkhornConfig& cfg);

SinkhornResult solve_sinkhorn(const std::vector<double>& p, const std::vector<double>& q, const Matrix& cost,
                              const SinkhornConfig& cfg);

struct Assignment {
  std::size_t target = 0;
  double area = 0.0;
};

inline constexpr double kExactThreshold = 0.0;
inline constexpr double kSinkhornThreshold = 1e-8;

// For every source, the targets it ships more than `threshold` to, with the
// shipped mass as the demand area.
std::vector<std::vector<Assignment>> plan_to_assignments(const TransportPlan& plan, double threshold);

}  // namespace bot
