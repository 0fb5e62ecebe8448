#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "bot/core.hpp"

namespace bot {

// One source wired to N targets with demand areas s_{0n}.
struct OneToManyProblem {
  Point source;
  std::vector<Point> targets;
  std::vector<double> areas;

  void validate() const;
};

// Minimiser of the area^alpha weighted quadratic functional:
//   (s_i^a v_i + s_j^a v_j + (s_i + s_j)^a v_k) / (s_i^a + s_j^a + (s_i + s_j)^a)
Point branch_point_power(const Point& parent, const Point& vi, const Point& vj, double si, double sj, double alpha);

// Y branch interpolating between the T shape (alpha = 0, area-weighted midpoint
// of the children) and the V shape (alpha = 1, the parent itself).
Point branch_point_interp(const Point& parent, const Point& vi, const Point& vj, double si, double sj, double alpha);

// branch_point_interp plus eps / (s_i + s_j + delta). Thin vessels bend more.
Point branch_point_shifted(const Point& parent, const Point& vi, const Point& vj, double si, double sj, double alpha,
                           const Point& eps, double delta);

// Cost saved by routing i and j through z instead of wiring both to the
// parent directly. Positive means the branch lowers the network cost.
double local_improvement(const Point& parent, const Point& vi, const Point& vj, const Point& z, double si, double sj,
                         double alpha);

// Snapshot of the greedy/tabu loop, handed to BuildOptions::observer after
// every iteration. Index 0 is the source, 1..N the targets, then branch nodes.
struct BuilderState {
  std::size_t iteration = 0;
  const std::vector<Point>* positions = nullptr;
  const std::vector<char>* selectable = nullptr;
  const std::vector<int>* connection = nullptr;
  const std::vector<double>* areas = nullptr;
  // Pair examined this iteration; partner is kNoParent when i was retired
  // without a branch.
  int picked = kNoParent;
  int partner = kNoParent;
};

struct BuildOptions {
  // Only try the nearest selectable neighbour of the farthest node instead of
  // scanning outward until an improving partner is found.
  bool nearest_only = false;
  // Radially project every branch point onto the unit sphere (geographic
  // trees on unit-sphere embeddings).
  bool on_sphere = false;
  // Frozen shift vector; drawn from params.seed when unset and shift_norm > 0.
  std::optional<Point> shift;
  std::function<void(const BuilderState&)> observer;
};

struct BuildResult {
  FlowTree tree;
  // Network cost before any insertion, then after each accepted insertion.
  std::vector<double> cost_trace;
  std::size_t insertions = 0;
  std::size_t iterations = 0;
  // Node visits made by the selection and candidate scans.
  std::size_t node_touches = 0;
  std::optional<Point> shift;
};

inline constexpr double kAcceptTol = 1e-12;

// Uniformly random direction of length `norm`, drawn from `seed`.
Point draw_shift(int dim, double norm, std::uint64_t seed);

// Greedy/tabu construction of a branched tree for one source. Each iteration
// takes the selectable node farthest from the source, scans the other
// selectable nodes by increasing distance from it, and merges it with the
// first partner whose branch point strictly lowers the cost. Merged nodes are
// retired for good; the new branch node becomes selectable. A node with no
// improving partner is retired and stays wired to the source.
BuildResult build_one_to_many(const OneToManyProblem& problem, const BotParams& params,
                              const BuildOptions& options = {});

// Cost of wiring every target straight to the source.
double star_cost(const OneToManyProblem& problem, double alpha);

}  // namespace bot
