#include <doctest.h>

#include <random>

#include "medlda/error.hpp"
#include "medlda/svm.hpp"
#include "oracles.hpp"

using namespace medlda;
using namespace medlda::svm;

namespace {

SvrInstance svr(std::initializer_list<std::pair<double, double>> pts, double c, double eps) {
  SvrInstance inst;
  inst.x.resize(static_cast<Eigen::Index>(pts.size()), 1);
  inst.y.resize(static_cast<Eigen::Index>(pts.size()));
  Eigen::Index i = 0;
  for (const auto& [x, y] : pts) {
    inst.x(i, 0) = x;
    inst.y(i++) = y;
  }
  inst.c = c;
  inst.epsilon = eps;
  return inst;
}

SvrInstance random_svr(int d, int k, double c, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SvrInstance inst;
  inst.x.resize(d, k);
  inst.y.resize(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < k; ++j) inst.x(i, j) = g(rng);
    inst.y(i) = g(rng);
  }
  inst.c = c;
  inst.epsilon = eps;
  return inst;
}

McSvmInstance random_mc(int d, int k, int m, double c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  McSvmInstance inst;
  inst.features = RowMatrix(oracle::random_simplex_rows(d, k, rng));
  inst.classes = m;
  inst.c = c;
  for (int i = 0; i < d; ++i) inst.labels.push_back(i % m);
  return inst;
}

}  // namespace

TEST_CASE("solve_svr one-dimensional fixtures") {
  const auto a = solve_svr(svr({{0, 0}, {1, 1}}, 1.0, 0.1));
  CHECK(a.converged);
  CHECK(a.weights(0) == doctest::Approx(0.9).epsilon(1e-6));
  const auto b = solve_svr(svr({{1, 1}, {1, -1}}, 1.0, 0.0));
  CHECK(std::abs(b.weights(0)) < 1e-9);
}

TEST_CASE("solve_svr returns zero when every response is inside the tube") {
  const auto inst = random_svr(8, 3, 2.0, 10.0, 1);
  const auto sol = solve_svr(inst);
  CHECK(sol.weights.norm() == 0.0);
  CHECK(sol.mu.norm() == 0.0);
  CHECK(sol.mu_star.norm() == 0.0);
  const auto rep = kkt_report(sol, inst);
  CHECK(rep.max_primal_violation == 0.0);
  CHECK(rep.max_complementarity_violation == 0.0);
  CHECK(rep.duality_gap == 0.0);
}

TEST_CASE("solve_svr reaches the grid optimum of the dual") {
  const auto inst = random_svr(3, 2, 1.0, 0.1, 4);
  const auto sol = solve_svr(inst);
  const double grid = oracle::svr_grid_max(inst.x, inst.y, inst.c, inst.epsilon);
  const double got = oracle::svr_signed_dual(inst.x, inst.y, inst.epsilon, sol.coefficients());
  CHECK(got >= grid - 1e-9);
  CHECK(got - grid < 1e-3);
}

TEST_CASE("solve_svr meets KKT and zero duality gap on random instances") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto inst = random_svr(40, 4, 3.0, 0.2, seed);
    const auto sol = solve_svr(inst);
    CHECK(sol.converged);
    const auto rep = kkt_report(sol, inst);
    CHECK(rep.duality_gap < 1e-5);
    CHECK(rep.max_primal_violation < 1e-8);
    CHECK((sol.mu.array() * sol.mu_star.array()).abs().maxCoeff() < 1e-12);
    CHECK(sol.mu.minCoeff() >= 0.0);
    CHECK(sol.mu_star.maxCoeff() <= inst.c);
  }
}

TEST_CASE("solve_svr scales with responses, tube and cost") {
  const auto inst = random_svr(30, 3, 1.0, 0.1, 9);
  auto scaled = inst;
  const double s = 2.5;
  scaled.y *= s;
  scaled.epsilon *= s;
  scaled.c *= s;
  const auto a = solve_svr(inst);
  const auto b = solve_svr(scaled);
  CHECK((b.weights - s * a.weights).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("solve_svr warm start reaches the same optimum") {
  const auto inst = random_svr(25, 3, 2.0, 0.1, 12);
  const auto cold = solve_svr(inst);
  const Vector warm = cold.coefficients() * 0.5;
  const auto hot = solve_svr(inst, {}, warm);
  CHECK(hot.primal_objective == doctest::Approx(cold.primal_objective).epsilon(1e-6));
}

TEST_CASE("svr instance validation") {
  auto inst = svr({{1, 1}}, -1.0, 0.0);
  CHECK_THROWS_AS(inst.validate(), ValidationError);
  inst.c = 1.0;
  inst.epsilon = -0.1;
  CHECK_THROWS_AS(inst.validate(), ValidationError);
}

TEST_CASE("kkt_report flags a perturbed solution") {
  const auto inst = svr({{0, 0}, {1, 1}}, 1.0, 0.1);
  SvrSolution exact;
  exact.weights = Vector::Constant(1, 0.9);
  exact.mu = Vector::Zero(2);
  exact.mu_star = Vector::Zero(2);
  exact.mu(1) = 0.9;
  const auto good = kkt_report(exact, inst);
  CHECK(good.max_primal_violation <= 1e-10);
  CHECK(good.max_complementarity_violation <= 1e-10);
  CHECK(std::abs(good.duality_gap) <= 1e-10);
  auto bad = exact;
  bad.weights(0) += 0.1;
  CHECK(kkt_report(bad, inst).max_primal_violation > 0.0);
  CHECK_FALSE(good.to_text().empty());
}

TEST_CASE("feature_vector places the block") {
  Vector z(2);
  z << 0.3, 0.7;
  Vector a(4), b(4);
  a << 0.3, 0.7, 0, 0;
  b << 0, 0, 0.3, 0.7;
  CHECK(feature_vector(0, z, 2) == a);
  CHECK(feature_vector(1, z, 2) == b);
  Vector diff(4);
  diff << 0.3, 0.7, -0.3, -0.7;
  CHECK(feature_vector(0, z, 2) - feature_vector(1, z, 2) == diff);
}

TEST_CASE("solve_multiclass_svm single-document fixtures") {
  McSvmInstance inst;
  inst.features = RowMatrix::Ones(1, 1);
  inst.labels = {0};
  inst.classes = 2;
  inst.c = 1.0;
  auto sol = solve_multiclass_svm(inst);
  CHECK(sol.mu(0, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.lambda(0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.lambda(1) == doctest::Approx(-0.5).epsilon(1e-6));
  const auto rep = kkt_report(sol, inst);
  CHECK(rep.max_primal_violation < 1e-8);
  CHECK(std::abs(rep.duality_gap) < 1e-8);

  inst.c = 0.25;
  sol = solve_multiclass_svm(inst);
  CHECK(sol.mu(0, 1) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(sol.lambda(0) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(sol.lambda(1) == doctest::Approx(-0.25).epsilon(1e-9));
}

TEST_CASE("solve_multiclass_svm with no documents gives zero weights") {
  McSvmInstance inst;
  inst.features = RowMatrix(0, 3);
  inst.classes = 3;
  const auto sol = solve_multiclass_svm(inst);
  CHECK(sol.lambda.size() == 9);
  CHECK(sol.lambda.norm() == 0.0);
}

TEST_CASE("solve_multiclass_svm dual trace is monotone and gap closes") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto inst = random_mc(60, 4, 3, 2.0, seed);
    const auto sol = solve_multiclass_svm(inst);
    CHECK(sol.converged);
    for (std::size_t i = 1; i < sol.dual_trace.size(); ++i)
      CHECK(sol.dual_trace[i] >= sol.dual_trace[i - 1] - 1e-12);
    const auto rep = kkt_report(sol, inst);
    CHECK(rep.duality_gap < 1e-5);
    CHECK((sol.lambda - mc_lambda_from_duals(inst, sol.mu)).norm() < 1e-10);
    for (int d = 0; d < inst.size(); ++d) {
      CHECK(sol.mu(d, inst.labels[static_cast<std::size_t>(d)]) == 0.0);
      CHECK(sol.mu.row(d).sum() <= inst.c + 1e-9);
      CHECK(sol.mu.row(d).minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("multiclass objectives agree with a direct hinge evaluation") {
  const auto inst = random_mc(10, 3, 3, 1.5, 21);
  Vector lambda = Vector::LinSpaced(9, -1.0, 1.0);
  double hinge = 0.0;
  for (int d = 0; d < inst.size(); ++d) {
    const Vector z = inst.features.row(d).transpose();
    const int yd = inst.labels[static_cast<std::size_t>(d)];
    double worst = 0.0;
    for (int y = 0; y < 3; ++y) {
      if (y == yd) continue;
      const double margin = lambda.segment(3 * yd, 3).dot(z) - lambda.segment(3 * y, 3).dot(z);
      worst = std::max(worst, 1.0 - margin);
    }
    hinge += worst;
  }
  CHECK(mc_primal_objective(inst, lambda) == doctest::Approx(0.5 * lambda.squaredNorm() + inst.c * hinge));
}
