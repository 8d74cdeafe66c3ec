#include <doctest.h>

#include <cmath>
#include <random>

#include "medlda/baselines.hpp"
#include "medlda/error.hpp"
#include "medlda/eval.hpp"
#include "medlda/synth.hpp"
#include "oracles.hpp"

using namespace medlda;

namespace {

Corpus tiny_corpus() {
  std::vector<Document> docs;
  docs.emplace_back(std::vector<TermCount>{{0, 3}, {2, 1}});
  docs.emplace_back(std::vector<TermCount>{{1, 2}, {2, 2}, {4, 1}});
  docs.emplace_back(std::vector<TermCount>{{0, 1}, {3, 4}});
  return Corpus(std::move(docs), 5);
}

Corpus doubled(const Corpus& c) {
  std::vector<Document> docs;
  for (int r = 0; r < 2; ++r)
    for (int d = 0; d < c.size(); ++d) docs.push_back(c[d]);
  return Corpus(std::move(docs), c.vocab_size());
}

TrainConfig config(int topics, double c = 1.0) {
  TrainConfig cfg;
  cfg.topics = topics;
  cfg.c = c;
  cfg.em_max_iter = 10;
  cfg.seed = 2;
  return cfg;
}

TopicModelParams two_word_topics() {
  Matrix beta(2, 2);
  beta << 0.99, 0.01, 0.01, 0.99;
  return TopicModelParams::symmetric(beta);
}

}  // namespace

TEST_CASE("train_lda with one topic gives term frequencies") {
  const Corpus corpus = tiny_corpus();
  const auto model = train_lda(corpus, config(1));
  Vector freq = Vector::Zero(5);
  for (int d = 0; d < corpus.size(); ++d)
    for (const auto& tc : corpus[d].terms()) freq(tc.term) += tc.count;
  freq.array() += kBetaFloor;
  freq /= freq.sum();
  CHECK((model.params.beta().row(0).transpose() - freq).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("train_lda is deterministic, monotone and scale free") {
  const Corpus corpus = tiny_corpus();
  const auto a = train_lda(corpus, config(2));
  const auto b = train_lda(corpus, config(2));
  CHECK(a.params.beta() == b.params.beta());
  CHECK(a.gammas.size() == 3);
  for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i] <= a.trace[i - 1] + 1e-9);
  const auto twice = train_lda(doubled(corpus), config(2));
  CHECK((twice.params.beta() - a.params.beta()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("sLDA with one topic regresses on the mean") {
  const Corpus corpus = tiny_corpus();
  const auto y = ResponseVector::continuous({1.0, 2.5, -0.5});
  const auto model = train_slda_regression(corpus, y, config(1));
  CHECK(model.head.eta(0) == doctest::Approx(1.0).epsilon(1e-10));
  const auto pred = predict_slda(model, corpus);
  for (double p : pred) CHECK(p == doctest::Approx(1.0).epsilon(1e-10));

  const auto zero = train_slda_regression(corpus, ResponseVector::continuous({0, 0, 0}), config(2));
  CHECK(zero.head.eta.norm() < 1e-12);
  CHECK(zero.head.delta2 == doctest::Approx(1e-6));
}

TEST_CASE("slda_normal_equations agree with gradient descent") {
  std::mt19937_64 rng(4);
  const int d = 15;
  const int k = 3;
  const oracle::Mat z = oracle::random_simplex_rows(d, k, rng);
  std::vector<Vector> means;
  Matrix outer = Matrix::Zero(k, k);
  Vector y(d);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < d; ++i) {
    means.push_back(z.row(i).transpose());
    outer += z.row(i).transpose() * z.row(i) + 0.02 * Matrix::Identity(k, k);
    y(i) = g(rng);
  }
  const auto head = slda_normal_equations(means, outer, y);
  Vector b = z.transpose() * y;
  const double step = 1.0 / outer.operatorNorm();
  Vector eta = Vector::Zero(k);
  for (int it = 0; it < 200000; ++it) eta -= step * (outer * eta - b);
  CHECK((head.eta - eta).cwiseAbs().maxCoeff() < 1e-8);
  CHECK_FALSE(head.regularized);
}

TEST_CASE("two-stage classifier separates distinct features") {
  std::vector<Document> docs;
  std::vector<int> labels;
  for (int d = 0; d < 8; ++d) {
    docs.emplace_back(std::vector<TermCount>{{d % 2, 5}});
    labels.push_back(d % 2);
  }
  const Corpus corpus(std::move(docs), 2);
  const auto y = ResponseVector::categorical(labels, 2);
  const auto model = train_two_stage_svm(two_word_topics(), corpus, y, 100.0);
  CHECK(accuracy(y.labels(), predict_two_stage(model, corpus)) == 1.0);
}

TEST_CASE("two-stage classifier on identical features picks the majority") {
  std::vector<Document> docs;
  for (int d = 0; d < 5; ++d) docs.emplace_back(std::vector<TermCount>{{0, 2}, {1, 3}});
  const Corpus corpus(std::move(docs), 2);
  const auto y = ResponseVector::categorical({0, 1, 0, 1, 0}, 2);
  const auto model = train_two_stage_svm(two_word_topics(), corpus, y, 1.0);
  CHECK(accuracy(y.labels(), predict_two_stage(model, corpus)) == doctest::Approx(0.6));
}

TEST_CASE("two-stage regressor predicts the weight dot product") {
  SynthConfig sc;
  sc.docs = 40;
  sc.topics = 3;
  sc.vocab = 45;
  sc.doc_length = 30;
  sc.seed = 6;
  const auto data = generate_synthetic(sc);
  const auto lda = train_lda(data.corpus, config(3));
  const auto model = train_two_stage_svr(lda.params, data.corpus, data.responses, 4.0, 0.1);
  const auto pred = predict_two_stage(model, data.corpus);
  for (int d = 0; d < data.corpus.size(); ++d) {
    const auto tokens = data.corpus[d].tokens();
    const Vector z = zbar_mean(infer_document(tokens, lda.params).phi);
    CHECK(pred[static_cast<std::size_t>(d)] == doctest::Approx(model.weights.dot(z)).epsilon(1e-12));
  }
}

TEST_CASE("word-frequency SVR uses normalized counts") {
  const Corpus corpus = tiny_corpus();
  const RowMatrix f = word_frequencies(corpus, 5);
  CHECK(f(0, 0) == doctest::Approx(0.75));
  CHECK(f(1, 4) == doctest::Approx(0.2));
  for (int d = 0; d < 3; ++d) CHECK(f.row(d).sum() == doctest::Approx(1.0));
  const auto y = ResponseVector::continuous({1.0, -1.0, 0.5});
  const auto model = train_word_frequency_svr(corpus, y, 10.0, 0.0);
  const auto pred = predict_word_frequency_svr(model, corpus);
  for (int d = 0; d < 3; ++d) CHECK(pred[static_cast<std::size_t>(d)] == doctest::Approx(f.row(d).dot(model.weights)));
}

TEST_CASE("sLDA threshold classifier returns valid labels") {
  SynthConfig sc;
  sc.docs = 40;
  sc.topics = 2;
  sc.vocab = 40;
  sc.doc_length = 30;
  sc.response = SynthResponse::kClassification;
  sc.seed = 3;
  const auto data = generate_synthetic(sc);
  const auto model = train_slda_threshold(data.corpus, data.responses, config(2));
  const auto pred = predict_slda_threshold(model, data.corpus);
  CHECK(pred.size() == 40);
  for (int p : pred) CHECK((p == 0 || p == 1));
  const auto three = ResponseVector::categorical(std::vector<int>(40, 2), 3);
  CHECK_THROWS_AS(train_slda_threshold(data.corpus, three, config(2)), ValidationError);
}
