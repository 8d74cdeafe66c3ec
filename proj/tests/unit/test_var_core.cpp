#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/SpecialFunctions>

#include "medlda/error.hpp"
#include "medlda/var_core.hpp"
#include "oracles.hpp"

using namespace medlda;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

RowMatrix rows(int n, int k, std::initializer_list<double> v) {
  RowMatrix m(n, k);
  auto it = v.begin();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = *it++;
  return m;
}

Matrix uniform_beta(int k, int v) { return Matrix::Constant(k, v, 1.0 / v); }

}  // namespace

TEST_CASE("dirichlet_expectation matches the digamma recurrence") {
  const Vector a = dirichlet_expectation(vec({1, 1}));
  CHECK(a(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(a(1) == doctest::Approx(-1.0).epsilon(1e-12));
  const Vector b = dirichlet_expectation(vec({2, 2}));
  CHECK(b(0) == doctest::Approx(-5.0 / 6.0).epsilon(1e-12));
  const Vector c = dirichlet_expectation(vec({1, 3}));
  CHECK(c(0) == doctest::Approx(-11.0 / 6.0).epsilon(1e-12));
  CHECK(c(1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(dirichlet_expectation(vec({1, 0})), ValidationError);
}

TEST_CASE("dirichlet_expectation agrees with an independent digamma") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 40.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vector g(5);
    for (int k = 0; k < 5; ++k) g(k) = u(rng);
    const Vector got = dirichlet_expectation(g);
    const Eigen::ArrayXd ref = g.array().digamma() - Eigen::numext::digamma(g.sum());
    CHECK((got.array() - ref).abs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("update_gamma sums phi columns onto alpha") {
  const Vector g = update_gamma(vec({0.5, 0.5}), rows(2, 2, {0.3, 0.7, 0.6, 0.4}));
  CHECK(g(0) == doctest::Approx(1.4));
  CHECK(g(1) == doctest::Approx(1.6));
  const Vector h = update_gamma(vec({1, 1}), rows(1, 2, {1, 0}));
  CHECK(h == vec({2, 1}));
  const Vector u = update_gamma(Vector::Constant(4, 0.25), RowMatrix::Constant(8, 4, 0.25));
  CHECK((u.array() - 2.25).abs().maxCoeff() < 1e-15);
}

TEST_CASE("zbar_moments on small fixtures") {
  const auto one = zbar_moments(rows(1, 2, {0.5, 0.5}));
  CHECK(one.mean.isApprox(vec({0.5, 0.5})));
  CHECK((one.outer - Matrix(vec({0.5, 0.5}).asDiagonal())).norm() < 1e-15);

  const auto two = zbar_moments(rows(2, 2, {0.5, 0.5, 0.5, 0.5}));
  Matrix expect(2, 2);
  expect << 0.375, 0.125, 0.125, 0.375;
  CHECK((two.outer - expect).norm() < 1e-15);

  const auto fixed = zbar_moments(rows(2, 2, {1, 0, 0, 1}));
  CHECK((fixed.outer - Matrix::Constant(2, 2, 0.25)).norm() < 1e-15);
  CHECK(fixed.mean.isApprox(vec({0.5, 0.5})));
}

TEST_CASE("zbar_moments agrees with enumeration and the term-by-term form") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 5;
    const int k = 2 + trial % 3;
    const oracle::Mat phi = oracle::random_simplex_rows(n, k, rng);
    oracle::Vec mean;
    oracle::Mat outer;
    oracle::enumerate_moments(phi, mean, outer);
    const auto got = zbar_moments(RowMatrix(phi));
    CHECK((got.mean - mean).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((got.outer - outer).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((got.outer - oracle::outer_closed_form(phi)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(got.outer.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((got.outer - got.outer.transpose()).norm() < 1e-15);
  }
}

TEST_CASE("lda_bound with one topic is the token log-loss") {
  Matrix beta(1, 4);
  beta << 0.1, 0.2, 0.3, 0.4;
  const TopicModelParams params(vec({1.0}), beta);
  const std::vector<int> tokens = {0, 3, 3, 2};
  const DocVariational var = infer_document(tokens, params);
  const double expect = -(std::log(0.1) + 2 * std::log(0.4) + std::log(0.3));
  CHECK(lda_bound(tokens, var, params) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("lda_bound never increases under coordinate ascent") {
  const auto params = TopicModelParams::random(4, 30, 5);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> word(0, 29);
  std::vector<int> tokens(40);
  for (int& t : tokens) t = word(rng);
  DocVariational var = init_variational(40, params.alpha());
  double previous = lda_bound(tokens, var, params);
  for (int sweep = 0; sweep < 30; ++sweep) {
    lda_e_step(tokens, params, var, InnerSchedule{1, 0.0});
    const double now = lda_bound(tokens, var, params);
    CHECK(now <= previous + 1e-9);
    previous = now;
  }
}

TEST_CASE("lda_bound upper-bounds the exact single-token marginal") {
  const int vocab = 6;
  const TopicModelParams params(vec({1, 1}), uniform_beta(2, vocab));
  const std::vector<int> tokens = {3};
  const DocVariational var = infer_document(tokens, params);
  const double exact = std::log(static_cast<double>(vocab));
  const double bound = lda_bound(tokens, var, params);
  CHECK(bound >= exact - 1e-12);
  CHECK(bound - exact < 1.0);
}

TEST_CASE("update_beta floors and normalizes a single count") {
  const std::vector<std::vector<int>> tokens = {{2}};
  std::vector<DocVariational> vars(1);
  vars[0].phi = rows(1, 2, {1, 0});
  vars[0].gamma = vec({2, 1});
  const Matrix beta = update_beta(tokens, vars, 2, 3);
  const double z = 1.0 + 3 * kBetaFloor;
  CHECK(beta(0, 0) == doctest::Approx(kBetaFloor / z));
  CHECK(beta(0, 2) == doctest::Approx((1.0 + kBetaFloor) / z));
  for (int w = 0; w < 3; ++w) CHECK(beta(1, w) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("update_beta is invariant to duplicating documents and matches a tally") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> word(0, 9);
  const int k = 3;
  std::vector<std::vector<int>> tokens;
  std::vector<DocVariational> vars;
  for (int d = 0; d < 5; ++d) {
    std::vector<int> doc(7);
    for (int& t : doc) t = word(rng);
    DocVariational v;
    v.phi = RowMatrix(oracle::random_simplex_rows(7, k, rng));
    v.gamma = Vector::Ones(k);
    tokens.push_back(doc);
    vars.push_back(v);
  }
  const Matrix beta = update_beta(tokens, vars, k, 10);

  Matrix tally = Matrix::Zero(k, 10);
  for (std::size_t d = 0; d < tokens.size(); ++d)
    for (std::size_t n = 0; n < tokens[d].size(); ++n)
      for (int j = 0; j < k; ++j) tally(j, tokens[d][n]) += vars[d].phi(static_cast<Eigen::Index>(n), j);
  tally.array() += kBetaFloor;
  for (int j = 0; j < k; ++j) tally.row(j) /= tally.row(j).sum();
  CHECK((beta - tally).cwiseAbs().maxCoeff() < 1e-12);

  auto tokens2 = tokens;
  auto vars2 = vars;
  tokens2.insert(tokens2.end(), tokens.begin(), tokens.end());
  vars2.insert(vars2.end(), vars.begin(), vars.end());
  const Matrix beta2 = update_beta(tokens2, vars2, k, 10);
  CHECK((beta - beta2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gaussian_kl_to_standard closed form") {
  CHECK(gaussian_kl_to_standard(vec({0, 0}), Matrix::Identity(2, 2)) == doctest::Approx(0.0));
  Matrix s(1, 1);
  s << 0.5;
  CHECK(gaussian_kl_to_standard(vec({1}), s) == doctest::Approx(0.5 * (0.5 + 1 - 1 - std::log(0.5))));
}

TEST_CASE("TopicModelParams rejects invalid beta") {
  Matrix bad(1, 2);
  bad << 0.0, 1.0;
  CHECK_THROWS_AS(TopicModelParams(vec({1}), bad), ValidationError);
  Matrix unnorm(1, 2);
  unnorm << 0.5, 0.6;
  CHECK_THROWS_AS(TopicModelParams(vec({1}), unnorm), ValidationError);
  CHECK_THROWS_AS(TopicModelParams(vec({0}), uniform_beta(1, 2)), ValidationError);
}

TEST_CASE("parallel inference matches serial") {
  const auto params = TopicModelParams::random(3, 8, 4);
  std::vector<Document> clean;
  for (int d = 0; d < 9; ++d) {
    const int a = d % 4;
    clean.emplace_back(std::vector<TermCount>{{a, 2}, {a + 4, 1}});
  }
  const Corpus corpus(std::move(clean), 8);
  const auto serial = infer_topic_proportions(corpus, params, {}, 1);
  const auto threaded = infer_topic_proportions(corpus, params, {}, 3);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t d = 0; d < serial.size(); ++d) CHECK(serial[d] == threaded[d]);
}
