#include <doctest.h>

#include "medlda/corpus.hpp"
#include "medlda/error.hpp"
#include "medlda/eval.hpp"
#include "medlda/synth.hpp"

using namespace medlda;

TEST_CASE("synthetic corpus round trips through the text formats") {
  SynthConfig cfg;
  cfg.seed = 1;
  const auto data = generate_synthetic(cfg);
  CHECK(data.corpus.size() == 200);
  CHECK(data.corpus.vocab_size() == 400);
  for (int d = 0; d < data.corpus.size(); ++d) CHECK(data.corpus[d].token_count() == 60);
  const Corpus back = parse_ldac(serialize_ldac(data.corpus), 400);
  CHECK(back == data.corpus);
  const auto y = load_responses(serialize_responses(data.responses), ResponseKind::kContinuous);
  REQUIRE(y.size() == 200);
  for (int d = 0; d < 200; ++d) CHECK(y.values()[static_cast<std::size_t>(d)] == data.responses.values()[static_cast<std::size_t>(d)]);
}

TEST_CASE("noise-free regression responses are the planted linear map") {
  SynthConfig cfg;
  cfg.seed = 2;
  const auto data = generate_synthetic(cfg);
  std::vector<double> planted;
  for (const auto& z : data.zbar) planted.push_back(data.eta.dot(z));
  CHECK(predictive_r2(data.responses.values(), planted) == doctest::Approx(1.0).epsilon(1e-12));
  for (int k = 0; k < cfg.topics; ++k) CHECK(data.beta.row(k).sum() == doctest::Approx(1.0));
}

TEST_CASE("classification responses follow the planted blocks") {
  SynthConfig cfg;
  cfg.response = SynthResponse::kClassification;
  cfg.classes = 3;
  cfg.topics = 6;
  cfg.seed = 3;
  const auto data = generate_synthetic(cfg);
  CHECK(data.responses.class_count() == 3);
  for (std::size_t d = 0; d < data.zbar.size(); ++d) {
    int best = 0;
    double top = -1e300;
    for (int y = 0; y < 3; ++y) {
      const double s = data.eta.segment(6 * y, 6).dot(data.zbar[d]);
      if (s > top) {
        top = s;
        best = y;
      }
    }
    CHECK(data.responses.labels()[d] == best);
  }
}

TEST_CASE("synthetic generation is deterministic per seed") {
  SynthConfig cfg;
  cfg.docs = 30;
  cfg.seed = 9;
  cfg.noise = 0.2;
  const auto a = generate_synthetic(cfg);
  const auto b = generate_synthetic(cfg);
  CHECK(serialize_ldac(a.corpus) == serialize_ldac(b.corpus));
  CHECK(serialize_responses(a.responses) == serialize_responses(b.responses));
  cfg.seed = 10;
  CHECK(serialize_ldac(generate_synthetic(cfg).corpus) != serialize_ldac(a.corpus));
}

TEST_CASE("synthetic config validation") {
  SynthConfig cfg;
  cfg.vocab = 2;
  CHECK_THROWS_AS(generate_synthetic(cfg), ValidationError);
  cfg = SynthConfig{};
  cfg.leak = 1.5;
  CHECK_THROWS_AS(generate_synthetic(cfg), ValidationError);
  cfg = SynthConfig{};
  cfg.response = SynthResponse::kClassification;
  cfg.classes = 1;
  CHECK_THROWS_AS(generate_synthetic(cfg), ValidationError);
}
