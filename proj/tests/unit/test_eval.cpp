#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "medlda/error.hpp"
#include "medlda/eval.hpp"

using namespace medlda;

TEST_CASE("predictive_r2 examples") {
  const std::vector<double> y = {1.0, 3.0, 2.0, 6.0};
  CHECK(predictive_r2(y, y) == 1.0);
  const std::vector<double> mean(4, 3.0);
  CHECK(predictive_r2(y, mean) == doctest::Approx(0.0));
  const std::vector<double> a = {0.0, 2.0};
  const std::vector<double> b = {1.0, 1.0};
  CHECK(predictive_r2(a, b) == doctest::Approx(0.0));
  const std::vector<double> flat = {2.0, 2.0};
  CHECK_THROWS_AS(predictive_r2(flat, b), ValidationError);
  CHECK_THROWS_AS(predictive_r2(y, b), ValidationError);
}

TEST_CASE("accuracy and relative_improvement examples") {
  const std::vector<int> labels = {0, 1, 1, 0, 2};
  CHECK(accuracy(labels, labels) == 1.0);
  const std::vector<int> half = {0, 0, 1, 1, 2};
  CHECK(accuracy(labels, half) == doctest::Approx(0.6));
  CHECK(relative_improvement(1.0, 0.8) == doctest::Approx(0.25));
  CHECK(relative_improvement(0.7, 0.7) == 0.0);
  CHECK(relative_improvement(0.4, 0.5) == doctest::Approx(-0.2));
  CHECK_THROWS_AS(relative_improvement(0.4, 0.0), ValidationError);
}

TEST_CASE("per_word_bound with one topic is the average log-probability") {
  Matrix beta(1, 3);
  beta << 0.2, 0.5, 0.3;
  const auto params = TopicModelParams::symmetric(beta);
  std::vector<Document> docs;
  docs.emplace_back(std::vector<TermCount>{{0, 2}, {1, 1}});
  docs.emplace_back(std::vector<TermCount>{{2, 3}});
  const Corpus corpus(std::move(docs), 3);
  const double expect = (2 * std::log(0.2) + std::log(0.5) + 3 * std::log(0.3)) / 6.0;
  CHECK(per_word_bound(params, corpus) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(per_word_bound(params, corpus, {}, 2) == per_word_bound(params, corpus));
}

TEST_CASE("export_embedding shape") {
  Vector a(2), b(2);
  a << 0.25, 0.75;
  b << 1.0, 0.0;
  const std::vector<Vector> rows = {a, b};
  const std::vector<std::string> labels = {"1", "2"};
  const std::string text = export_embedding(rows, labels);
  std::istringstream in(text);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    ++count;
    CHECK(std::count(line.begin(), line.end(), '\t') == 2);
  }
  CHECK(count == 2);
  CHECK(text.rfind("1\t0.25\t0.75\n", 0) == 0);
  const std::vector<std::string> short_labels = {"1"};
  CHECK_THROWS_AS(export_embedding(rows, short_labels), ValidationError);
}

TEST_CASE("MetricsReport renders both formats") {
  MetricsReport r;
  r.add("accuracy", 0.5);
  r.add("documents", 3);
  CHECK(r.to_key_value() == "accuracy=0.5\ndocuments=3\n");
  CHECK(r.to_tsv() == "accuracy\tdocuments\n0.5\t3\n");
  CHECK(format_double(0.1) == "0.10000000000000001");
}
