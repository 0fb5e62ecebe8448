#include "doctest.h"

#include <cmath>
#include <numeric>

#include "bot/branching.hpp"
#include "bot/harness.hpp"
#include "bot/random.hpp"

using namespace bot;

namespace {

void check_point(const Point& got, const Point& want, double tol) {
  REQUIRE(got.dim() == want.dim());
  for (int k = 0; k < got.dim(); ++k) CHECK(std::abs(got[k] - want[k]) <= tol);
}

Point random_point(Rng& rng, int dim) {
  Point p = Point::zero(dim);
  for (int k = 0; k < dim; ++k) p[k] = rng.uniform(-1.0, 1.0);
  return p;
}

// Rotation by theta about the z axis (identity on z), then translation.
Point rigid(const Point& p, double theta, const Point& shift) {
  Point out = p;
  out[0] = std::cos(theta) * p[0] - std::sin(theta) * p[1];
  out[1] = std::sin(theta) * p[0] + std::cos(theta) * p[1];
  return out + shift;
}

OneToManyProblem y_problem() {
  return {Point{0.0, 0.0}, {Point{1.0, 0.2}, Point{1.0, -0.2}}, {0.5, 0.5}};
}

}  // namespace

TEST_SUITE_BEGIN("branching");

TEST_CASE("branch_point_power examples") {
  const Point k{0.0, 0.0};
  const Point i{1.0, 0.0};
  const Point j{0.0, 2.0};
  check_point(branch_point_power(k, i, j, 0.3, 0.9, 0.0), (i + j + k) / 3.0, 1e-15);
  check_point(branch_point_power(k, i, j, 1.0, 1.0, 1.0), (i + j + 2.0 * k) / 4.0, 1e-15);
  // Mirror-symmetric children with equal areas stay on the axis.
  const Point z = branch_point_power(Point{0.0, 0.0}, Point{2.0, 1.0}, Point{2.0, -1.0}, 0.4, 0.4, 0.37);
  CHECK(std::abs(z[1]) < 1e-15);
  CHECK_THROWS_AS(branch_point_power(k, i, j, 0.0, 1.0, 0.5), ParameterError);
}

TEST_CASE("branch_point_interp examples") {
  check_point(branch_point_interp(Point{0.3, -0.7}, Point{1.0, 0.0}, Point{0.0, 1.0}, 0.2, 0.5, 1.0),
              Point{0.3, -0.7}, 0.0);
  check_point(branch_point_interp(Point{0.0, 5.0}, Point{1.0, 0.0}, Point{-1.0, 0.0}, 0.5, 0.5, 0.0),
              Point{0.0, 0.0}, 0.0);
  // 0.5 * (1*(1,0) + 3*(0,1)) / 4
  check_point(branch_point_interp(Point{0.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 1.0}, 1.0, 3.0, 0.5),
              Point{0.125, 0.375}, 1e-15);
  CHECK_THROWS_AS(branch_point_interp(Point{0.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 1.0}, -1.0, 3.0, 0.5),
                  ParameterError);
}

TEST_CASE("branch_point_shifted examples") {
  const Point k{0.0, 0.0};
  const Point i{1.0, 0.3};
  const Point j{0.8, -0.4};
  const Point base = branch_point_interp(k, i, j, 0.49, 0.5, 0.5);
  check_point(branch_point_shifted(k, i, j, 0.49, 0.5, 0.5, Point{0.0, 0.0}, 0.01), base, 0.0);
  // divisor 0.99 + 0.01 = 1
  check_point(branch_point_shifted(k, i, j, 0.49, 0.5, 0.5, Point{0.01, 0.0}, 0.01), base + Point{0.01, 0.0}, 1e-15);
  // Doubling the area roughly halves the shift.
  const Point eps{0.01, 0.0};
  const double s1 = norm(branch_point_shifted(k, i, j, 1.0, 1.0, 0.5, eps, 0.01) - branch_point_interp(k, i, j, 1.0, 1.0, 0.5));
  const double s2 = norm(branch_point_shifted(k, i, j, 2.0, 2.0, 0.5, eps, 0.01) - branch_point_interp(k, i, j, 2.0, 2.0, 0.5));
  CHECK(s2 < s1);
  CHECK(s2 / s1 == doctest::Approx(0.5).epsilon(0.01));
  CHECK_THROWS_AS(branch_point_shifted(k, i, j, 0.5, 0.5, 0.5, eps, 0.0), ParameterError);
}

TEST_CASE("local_improvement examples") {
  const Point k{0.0, 0.0};
  CHECK(local_improvement(k, Point{1.0, 0.2}, Point{0.3, -0.9}, k, 0.2, 0.7, 0.4) == 0.0);

  // direct 2 * sqrt(0.5) * sqrt(1.04), branched 0.5 + 2 * sqrt(0.5) * sqrt(0.29)
  const double narrow = local_improvement(k, Point{1.0, 0.2}, Point{1.0, -0.2}, Point{0.5, 0.0}, 0.5, 0.5, 0.5);
  CHECK(narrow == doctest::Approx(2.0 * std::sqrt(0.5) * (std::sqrt(1.04) - std::sqrt(0.29)) - 0.5).epsilon(1e-14));
  CHECK(narrow == doctest::Approx(0.180644).epsilon(1e-5));

  // direct 2 * sqrt(0.5) * sqrt(2) = 2, branched 0.5 + 2 * sqrt(0.5) * sqrt(1.25)
  const double wide = local_improvement(k, Point{1.0, 1.0}, Point{1.0, -1.0}, Point{0.5, 0.0}, 0.5, 0.5, 0.5);
  CHECK(wide == doctest::Approx(2.0 - 0.5 - 2.0 * std::sqrt(0.5) * std::sqrt(1.25)).epsilon(1e-14));
  CHECK(wide == doctest::Approx(2.0 - 2.081139).epsilon(1e-5));
  CHECK(wide < 0.0);
}

TEST_CASE("build_one_to_many examples") {
  BotParams params;
  params.alpha = 0.5;

  SUBCASE("single target") {
    const BuildResult r = build_one_to_many({Point{0.0, 0.0}, {Point{1.0, 1.0}}, {1.0}}, params);
    CHECK(r.tree.size() == 2);
    CHECK(r.tree.count(NodeKind::branch) == 0);
    CHECK(r.insertions == 0);
    REQUIRE(r.cost_trace.size() == 1);
    CHECK(r.cost_trace[0] == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("narrow pair gets a Y") {
    const BuildResult r = build_one_to_many(y_problem(), params);
    REQUIRE(r.tree.count(NodeKind::branch) == 1);
    check_point(r.tree[3].pos, Point{0.5, 0.0}, 1e-15);
    CHECK(r.tree[3].area == 1.0);
    CHECK(r.tree[1].parent == 3);
    CHECK(r.tree[2].parent == 3);
    CHECK(r.tree[3].parent == 0);
    REQUIRE(r.cost_trace.size() == 2);
    CHECK(r.cost_trace[0] == doctest::Approx(2.0 * std::sqrt(0.5) * std::sqrt(1.04)).epsilon(1e-14));
    CHECK(r.cost_trace[1] == doctest::Approx(0.5 + 2.0 * std::sqrt(0.5) * std::sqrt(0.29)).epsilon(1e-14));
    CHECK(bot_cost(r.tree, 0.5) == doctest::Approx(1.261577).epsilon(1e-6));
  }
  SUBCASE("wide pair stays a V") {
    const BuildResult r = build_one_to_many({Point{0.0, 0.0}, {Point{1.0, 1.0}, Point{1.0, -1.0}}, {0.5, 0.5}}, params);
    CHECK(r.tree.count(NodeKind::branch) == 0);
  }
  SUBCASE("alpha 1 never branches") {
    params.alpha = 1.0;
    const SingleRun run = run_synthetic_single(4, 60, params);
    CHECK(run.build.tree.count(NodeKind::branch) == 0);
    CHECK(run.build.cost_trace.back() == star_cost(run.problem, 1.0));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_one_to_many({Point{0.0, 0.0}, {}, {}}, params), ParameterError);
    CHECK_THROWS_AS(build_one_to_many({Point{0.0, 0.0}, {Point{1.0, 0.0}}, {0.0}}, params), ParameterError);
    params.alpha = 2.0;
    CHECK_THROWS_AS(build_one_to_many(y_problem(), params), ParameterError);
  }
}

TEST_CASE("property: builder invariants on random problems") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const int dim = seed % 3 == 0 ? 3 : 2;
    const std::size_t n = 1 + rng.below(120);
    BotParams params;
    params.alpha = rng.uniform(0.0, 1.0);
    params.formula = seed % 2 ? BranchFormula::power : BranchFormula::interp;
    const OneToManyProblem problem = random_one_to_many(seed, n, dim);
    const double total = std::accumulate(problem.areas.begin(), problem.areas.end(), 0.0);

    std::vector<char> retired(n + 1 + n, 0);
    bool tabu_ok = true;
    bool conservation_ok = true;
    bool wiring_ok = true;
    BuildOptions options;
    options.observer = [&](const BuilderState& s) {
      const auto& sel = *s.selectable;
      for (std::size_t id = 1; id < sel.size(); ++id) {
        if (retired[id] && sel[id]) tabu_ok = false;
        if (!sel[id]) retired[id] = 1;
        if (sel[id] && (*s.connection)[id] != 0) wiring_ok = false;
      }
      double wired = 0.0;
      for (std::size_t id = 1; id < sel.size(); ++id) {
        if ((*s.connection)[id] == 0) wired += (*s.areas)[id];
      }
      if (std::abs(wired - total) > 1e-12) conservation_ok = false;
    };
    const BuildResult r = build_one_to_many(problem, params, options);

    CHECK(tabu_ok);
    CHECK(conservation_ok);
    CHECK(wiring_ok);
    CHECK(validate_tree(r.tree).ok());
    CHECK(r.insertions + 1 <= std::max<std::size_t>(n, 1));
    CHECK(r.iterations <= 2 * n);
    CHECK(r.insertions == r.tree.count(NodeKind::branch));
    for (std::size_t k = 1; k < r.cost_trace.size(); ++k) CHECK(r.cost_trace[k] < r.cost_trace[k - 1]);
    CHECK(r.cost_trace.front() == doctest::Approx(star_cost(problem, params.alpha)));
    CHECK(r.cost_trace.back() == doctest::Approx(bot_cost(r.tree, params.alpha)).epsilon(1e-12));
    // Each branch node carries exactly its two children.
    const auto kids = r.tree.children();
    for (std::size_t id = 0; id < r.tree.size(); ++id) {
      if (r.tree[id].kind != NodeKind::branch) continue;
      REQUIRE(kids[id].size() == 2);
      CHECK(r.tree[id].area == r.tree[kids[id][0]].area + r.tree[kids[id][1]].area);
    }
    // Operation count is O(N^2): each of at most 2N iterations scans the
    // live set twice plus at most N candidate evaluations.
    CHECK(r.node_touches <= 6 * n * n + 6);
  }
}

TEST_CASE("property: interp formula is affine in alpha") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Point k = random_point(rng, 2);
    const Point i = random_point(rng, 2);
    const Point j = random_point(rng, 2);
    const double si = rng.uniform_positive();
    const double sj = rng.uniform_positive();
    const Point z0 = branch_point_interp(k, i, j, si, sj, 0.0);
    const Point z1 = branch_point_interp(k, i, j, si, sj, 1.0);
    for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      check_point(branch_point_interp(k, i, j, si, sj, a), (1.0 - a) * z0 + a * z1, 1e-14);
    }
  }
}

TEST_CASE("property: branch formulas commute with rigid motions") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = trial % 2 ? 3 : 2;
    const Point k = random_point(rng, dim);
    const Point i = random_point(rng, dim);
    const Point j = random_point(rng, dim);
    const double si = rng.uniform_positive();
    const double sj = rng.uniform_positive();
    const double alpha = rng.uniform();
    const double theta = rng.uniform(0.0, 6.283185307179586);
    const Point t = random_point(rng, dim);
    check_point(branch_point_interp(rigid(k, theta, t), rigid(i, theta, t), rigid(j, theta, t), si, sj, alpha),
                rigid(branch_point_interp(k, i, j, si, sj, alpha), theta, t), 1e-9);
    check_point(branch_point_power(rigid(k, theta, t), rigid(i, theta, t), rigid(j, theta, t), si, sj, alpha),
                rigid(branch_point_power(k, i, j, si, sj, alpha), theta, t), 1e-9);
  }
}

TEST_CASE("nearest-only scanning never beats full scanning on insertions") {
  BotParams params;
  params.alpha = 0.5;
  BuildOptions nearest;
  nearest.nearest_only = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const OneToManyProblem problem = random_one_to_many(seed, 80, 2);
    const BuildResult full = build_one_to_many(problem, params);
    const BuildResult strict = build_one_to_many(problem, params, nearest);
    CHECK(validate_tree(strict.tree).ok());
    CHECK(strict.cost_trace.back() <= strict.cost_trace.front());
    CHECK(full.insertions >= 1);
  }
}

TEST_CASE("shift vector is drawn once and frozen") {
  BotParams params;
  params.alpha = 0.5;
  params.shift_norm = 0.01;
  params.shift_delta = 0.01;
  params.seed = 99;
  const OneToManyProblem problem = random_one_to_many(1, 50, 2);
  const BuildResult a = build_one_to_many(problem, params);
  const BuildResult b = build_one_to_many(problem, params);
  REQUIRE(a.shift);
  CHECK(norm(*a.shift) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(*a.shift == *b.shift);
  CHECK(*a.shift == draw_shift(2, 0.01, 99));
  for (std::size_t id = 0; id < a.tree.size(); ++id) CHECK(a.tree[id].pos == b.tree[id].pos);
  CHECK(validate_tree(a.tree).ok());

  // Every branch sits at its interp point plus eps / (s_i + s_j + delta).
  const auto kids = a.tree.children();
  for (std::size_t id = 0; id < a.tree.size(); ++id) {
    if (a.tree[id].kind != NodeKind::branch) continue;
    const FlowNode& ci = a.tree[kids[id][0]];
    const FlowNode& cj = a.tree[kids[id][1]];
    const Point expected = branch_point_shifted(a.tree[0].pos, ci.pos, cj.pos, ci.area, cj.area, 0.5, *a.shift, 0.01);
    check_point(a.tree[id].pos, expected, 1e-15);
  }
}

TEST_CASE("sphere projection keeps branch points on the unit sphere") {
  Rng rng(8);
  OneToManyProblem problem;
  problem.source = Point{0.0, 0.0, 1.0};
  for (int k = 0; k < 40; ++k) {
    Point p{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 1.0};
    problem.targets.push_back(p / norm(p));
    problem.areas.push_back(1.0 / 40.0);
  }
  BotParams params;
  params.alpha = 0.3;
  BuildOptions options;
  options.on_sphere = true;
  const BuildResult r = build_one_to_many(problem, params, options);
  REQUIRE(r.insertions > 0);
  for (const FlowNode& node : r.tree.nodes()) CHECK(norm(node.pos) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t k = 1; k < r.cost_trace.size(); ++k) CHECK(r.cost_trace[k] < r.cost_trace[k - 1]);
}

TEST_SUITE_END();
