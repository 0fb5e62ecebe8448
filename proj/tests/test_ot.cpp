#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bot/harness.hpp"
#include "bot/ot.hpp"
#include "bot/random.hpp"
#include "oracles.hpp"

using namespace bot;

namespace {

Matrix make(std::size_t rows, std::size_t cols, std::initializer_list<double> values) {
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.data().begin());
  return m;
}

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i].assign(m.row(i).begin(), m.row(i).end());
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("ot");

TEST_CASE("cost_matrix") {
  const TransportInstance inst({Point{0.0, 0.0}}, {Point{3.0, 4.0}}, {1.0}, {1.0});
  CHECK(cost_matrix(inst)(0, 0) == 5.0);

  SUBCASE("swapping roles transposes") {
    const TransportInstance a({Point{0.0, 0.0}, Point{1.0, 2.0}}, {Point{3.0, 4.0}, Point{-1.0, 0.5}, Point{2.0, 2.0}},
                              {0.5, 0.5}, {0.2, 0.3, 0.5});
    const TransportInstance b(a.targets(), a.sources(), a.q(), a.p());
    const Matrix ca = cost_matrix(a);
    const Matrix cbt = cost_matrix(b).transposed();
    for (std::size_t i = 0; i < ca.rows(); ++i) {
      for (std::size_t j = 0; j < ca.cols(); ++j) CHECK(ca(i, j) == cbt(i, j));
    }
  }
  SUBCASE("collinear unit spacing") {
    const TransportInstance line({Point{0.0, 0.0}, Point{2.0, 0.0}}, {Point{1.0, 0.0}, Point{3.0, 0.0}}, {0.5, 0.5},
                                 {0.5, 0.5});
    const Matrix c = cost_matrix(line);
    CHECK(c(0, 0) == 1.0);
    CHECK(c(0, 1) == 3.0);
    CHECK(c(1, 0) == 1.0);
    CHECK(c(1, 1) == 1.0);
  }
}

TEST_CASE("plan_cost") {
  TransportPlan plan{make(2, 2, {0.3, 0.0, 0.3, 0.4}), {0.3, 0.7}, {0.6, 0.4}};
  CHECK(plan_cost(plan, make(2, 2, {1, 2, 3, 1})) == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(plan_cost(plan, Matrix(2, 2)) == 0.0);
  TransportPlan diag{make(2, 2, {0.5, 0.0, 0.0, 0.5}), {0.5, 0.5}, {0.5, 0.5}};
  CHECK(plan_cost(diag, make(2, 2, {0, 1, 1, 0})) == 0.0);
  CHECK_THROWS_AS(plan_cost(plan, Matrix(3, 2)), ParameterError);
}

TEST_CASE("solve_exact examples") {
  SUBCASE("zero-cost matching") {
    const TransportPlan plan = solve_exact({0.5, 0.5}, {0.5, 0.5}, make(2, 2, {0, 1, 1, 0}));
    CHECK(plan.gamma(0, 0) == 0.5);
    CHECK(plan.gamma(1, 1) == 0.5);
    CHECK(plan.gamma(0, 1) == 0.0);
    CHECK(plan.gamma(1, 0) == 0.0);
  }
  SUBCASE("one-parameter 2x2") {
    // gamma11 = t in [0, 0.3], cost 2.5 - 3t, optimum t = 0.3.
    const Matrix c = make(2, 2, {1, 2, 3, 1});
    const TransportPlan plan = solve_exact({0.3, 0.7}, {0.6, 0.4}, c);
    CHECK(plan.gamma(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(plan.gamma(0, 1) == doctest::Approx(0.0));
    CHECK(plan.gamma(1, 0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(plan.gamma(1, 1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(plan_cost(plan, c) == doctest::Approx(1.6).epsilon(1e-14));
  }
  SUBCASE("single source takes the column marginal") {
    const std::vector<double> q{0.1, 0.2, 0.3, 0.4};
    const TransportPlan plan = solve_exact({1.0}, q, make(1, 4, {4, 3, 2, 1}));
    for (std::size_t j = 0; j < q.size(); ++j) CHECK(plan.gamma(0, j) == doctest::Approx(q[j]).epsilon(1e-15));
  }
  SUBCASE("infeasible marginals") {
    CHECK_THROWS_AS(solve_exact({0.5, 0.5}, {0.5, 0.6}, make(2, 2, {0, 1, 1, 0})), ParameterError);
  }
}

TEST_CASE("property: exact solver matches basic-solution enumeration") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed);
    const std::size_t m = 1 + rng.below(4);
    const std::size_t n = 1 + rng.below(4);
    const TransportInstance inst = random_instance(seed, m, n);
    const Matrix c = cost_matrix(inst);
    const TransportPlan plan = solve_exact(inst, c);
    CHECK(plan_cost(plan, c) == doctest::Approx(oracle::brute_force_transport(inst.p(), inst.q(), to_rows(c))).epsilon(1e-12));
    CHECK(plan.row_error() < 1e-9);
    CHECK(plan.col_error() < 1e-9);
    CHECK(plan.support_size() <= m + n - 1);
  }
}

TEST_CASE("exact solver on degenerate marginals") {
  // Equal masses on a grid make the least-cost start and many pivots
  // degenerate.
  const std::size_t m = 6;
  const std::size_t n = 6;
  Matrix c(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c(i, j) = static_cast<double>((i * 7 + j * 3) % 5);
  }
  const std::vector<double> p(m, 1.0 / m);
  const std::vector<double> q(n, 1.0 / n);
  ExactStats stats;
  const TransportPlan plan = solve_exact(p, q, c, &stats);
  CHECK(plan.row_error() < 1e-12);
  CHECK(plan.col_error() < 1e-12);
  CHECK(plan.support_size() <= m + n - 1);
  // With uniform masses the optimum is a scaled permutation matrix
  // (Birkhoff), so the cheapest of the 720 permutations is the reference.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < m; ++i) cost += c(i, perm[i]) / static_cast<double>(m);
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(plan_cost(plan, c) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("property: exact solver on uniform-mass degenerate instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::size_t k = 2 + rng.below(3);
    Matrix c(k, k);
    for (double& v : c.data()) v = static_cast<double>(rng.below(3));
    const std::vector<double> p(k, 1.0 / static_cast<double>(k));
    const TransportPlan plan = solve_exact(p, p, c);
    CHECK(plan_cost(plan, c) == doctest::Approx(oracle::brute_force_transport(p, p, to_rows(c))).epsilon(1e-12));
  }
}

TEST_CASE("exact solver is equivariant under source permutation") {
  const TransportInstance inst = random_instance(5, 6, 9);
  const Matrix c = cost_matrix(inst);
  const TransportPlan plan = solve_exact(inst, c);

  std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  std::vector<Point> xs;
  std::vector<double> p;
  for (std::size_t k : perm) {
    xs.push_back(inst.sources()[k]);
    p.push_back(inst.p()[k]);
  }
  const TransportInstance permuted(xs, inst.targets(), p, inst.q());
  const TransportPlan plan2 = solve_exact(permuted, cost_matrix(permuted));
  for (std::size_t r = 0; r < perm.size(); ++r) {
    for (std::size_t j = 0; j < inst.num_targets(); ++j) {
      CHECK(plan2.gamma(r, j) == doctest::Approx(plan.gamma(perm[r], j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("solve_sinkhorn examples") {
  const Matrix c = make(2, 2, {0, 1, 1, 0});
  SUBCASE("small lambda approaches the exact plan") {
    SinkhornConfig cfg;
    cfg.lambda = 0.01;
    const SinkhornResult r = solve_sinkhorn({0.5, 0.5}, {0.5, 0.5}, c, cfg);
    CHECK(r.converged);
    const TransportPlan exact = solve_exact({0.5, 0.5}, {0.5, 0.5}, c);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(r.plan.gamma.data()[k] - exact.gamma.data()[k]) < 1e-3);
  }
  SUBCASE("large lambda approaches the product coupling") {
    SinkhornConfig cfg;
    // Symmetric 2x2 closed form: diagonal 0.5 / (1 + exp(-1 / lambda)).
    for (double lambda : {1.0, 100.0, 1000.0}) {
      cfg.lambda = lambda;
      const SinkhornResult r = solve_sinkhorn({0.5, 0.5}, {0.5, 0.5}, c, cfg);
      const double diag = 0.5 / (1.0 + std::exp(-1.0 / lambda));
      CHECK(r.plan.gamma(0, 0) == doctest::Approx(diag).epsilon(1e-9));
      CHECK(r.plan.gamma(0, 1) == doctest::Approx(0.5 - diag).epsilon(1e-9));
    }
    cfg.lambda = 1000.0;
    const SinkhornResult r = solve_sinkhorn({0.5, 0.5}, {0.5, 0.5}, c, cfg);
    for (double v : r.plan.gamma.data()) CHECK(std::abs(v - 0.25) < 1e-3);
  }
  SUBCASE("rows match after the final scaling") {
    const TransportInstance inst = random_instance(3, 7, 5);
    SinkhornConfig cfg;
    cfg.lambda = 0.1;
    cfg.tol = 1e-8;
    const SinkhornResult r = solve_sinkhorn(inst, cost_matrix(inst), cfg);
    CHECK(r.row_error < cfg.tol);
    CHECK(r.col_error < cfg.tol);
  }
  SUBCASE("kernel underflow") {
    // exp(-1 / 1e-3) underflows once costs are normalised.
    SinkhornConfig cfg;
    cfg.lambda = 1e-3;
    CHECK_THROWS_AS(solve_sinkhorn({1.0}, {1.0}, make(1, 1, {1.0}), cfg), ConvergenceError);
  }
  SUBCASE("iteration budget exhausted") {
    const TransportInstance inst = random_instance(9, 10, 10);
    SinkhornConfig cfg;
    cfg.lambda = 0.01;
    cfg.tol = 1e-14;
    cfg.max_iter = 3;
    const SinkhornResult r = solve_sinkhorn(inst, cost_matrix(inst), cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
  }
  SUBCASE("config validation") {
    SinkhornConfig cfg;
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(solve_sinkhorn({1.0}, {1.0}, make(1, 1, {1.0}), cfg), ParameterError);
  }
}

TEST_CASE("property: sinkhorn cost decreases toward the exact cost") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TransportInstance inst = random_instance(100 + seed, 10, 10);
    Matrix c = cost_matrix(inst);
    const double cmax = c.max();
    for (double& v : c.data()) v /= cmax;
    const double exact = plan_cost(solve_exact(inst, c), c);
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {1.0, 0.1, 0.01}) {
      SinkhornConfig cfg;
      cfg.lambda = lambda;
      const double cost = plan_cost(solve_sinkhorn(inst, c, cfg).plan, c);
      CHECK(cost < previous);
      CHECK(cost >= exact - 1e-9);
      previous = cost;
    }
    CHECK((previous - exact) / exact < 0.01);
  }
}

TEST_CASE("plan_to_assignments") {
  SUBCASE("diagonal") {
    const TransportPlan plan{make(2, 2, {0.5, 0.0, 0.0, 0.5}), {0.5, 0.5}, {0.5, 0.5}};
    const auto a = plan_to_assignments(plan, 0.0);
    REQUIRE(a.size() == 2);
    REQUIRE(a[0].size() == 1);
    CHECK(a[0][0].target == 0);
    CHECK(a[0][0].area == 0.5);
    REQUIRE(a[1].size() == 1);
    CHECK(a[1][0].target == 1);
  }
  SUBCASE("split target") {
    const TransportPlan plan = solve_exact({0.3, 0.7}, {0.6, 0.4}, make(2, 2, {1, 2, 3, 1}));
    const auto a = plan_to_assignments(plan, 0.0);
    REQUIRE(a[0].size() == 1);
    CHECK(a[0][0].target == 0);
    CHECK(a[0][0].area == doctest::Approx(0.3));
    REQUIRE(a[1].size() == 2);
    CHECK(a[1][0].target == 0);
    CHECK(a[1][0].area == doctest::Approx(0.3));
    CHECK(a[1][1].target == 1);
    CHECK(a[1][1].area == doctest::Approx(0.4));
  }
  SUBCASE("exact plans are sparse; dropped mass is bounded") {
    const TransportInstance inst = random_instance(21, 8, 30);
    const Matrix c = cost_matrix(inst);
    const TransportPlan exact = solve_exact(inst, c);
    std::size_t total = 0;
    for (const auto& list : plan_to_assignments(exact, kExactThreshold)) total += list.size();
    CHECK(total <= 8 + 30 - 1);

    SinkhornConfig cfg;
    cfg.lambda = 0.05;
    const TransportPlan dense = solve_sinkhorn(inst, c, cfg).plan;
    double kept = 0.0;
    for (const auto& list : plan_to_assignments(dense, kSinkhornThreshold)) {
      for (const Assignment& a : list) kept += a.area;
    }
    const double all = std::accumulate(dense.gamma.data().begin(), dense.gamma.data().end(), 0.0);
    CHECK(all - kept <= 8 * 30 * kSinkhornThreshold);
  }
}


TEST_CASE("separated clusters give a diagonal plan") {
  Rng rng(44);
  const double centers[4][2] = {{-10.0, -10.0}, {-10.0, 10.0}, {10.0, -10.0}, {10.0, 10.0}};
  std::vector<Point> xs;
  std::vector<Point> ys;
  std::vector<double> mass;
  for (const auto& c : centers) {
    xs.push_back(Point{c[0] + rng.uniform(-1.0, 1.0), c[1] + rng.uniform(-1.0, 1.0)});
    ys.push_back(Point{c[0] + rng.uniform(-1.0, 1.0), c[1] + rng.uniform(-1.0, 1.0)});
    mass.push_back(rng.uniform(0.5, 1.0));
  }
  double total = 0.0;
  for (double m : mass) total += m;
  for (double& m : mass) m /= total;
  const TransportInstance inst(xs, ys, mass, mass);
  const Matrix c = cost_matrix(inst);
  const TransportPlan plan = solve_exact(inst, c);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(plan.gamma(i, j) == doctest::Approx(i == j ? mass[i] : 0.0).epsilon(1e-12));
  }
  std::vector<std::vector<double>> cv(4, std::vector<double>(4));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) cv[i][j] = c(i, j);
  }
  CHECK(plan_cost(plan, c) == doctest::Approx(oracle::brute_force_transport(mass, mass, cv)).epsilon(1e-12));
}

TEST_SUITE_END();
