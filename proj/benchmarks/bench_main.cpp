#include <benchmark/benchmark.h>

#include "medlda/regression.hpp"
#include "medlda/svm.hpp"
#include "medlda/synth.hpp"

namespace {

medlda::SynthData corpus(int docs) {
  medlda::SynthConfig cfg;
  cfg.docs = docs;
  cfg.noise = 0.1;
  cfg.seed = 3;
  return medlda::generate_synthetic(cfg);
}

void BM_LdaEStep(benchmark::State& state) {
  const auto data = corpus(50);
  const auto params = medlda::TopicModelParams::random(4, data.corpus.vocab_size(), 1);
  const auto tokens = medlda::expand_tokens(data.corpus);
  for (auto _ : state) {
    for (const auto& t : tokens) {
      auto var = medlda::infer_document(t, params);
      benchmark::DoNotOptimize(var.gamma.data());
    }
  }
}
BENCHMARK(BM_LdaEStep);

void BM_FullEStep(benchmark::State& state) {
  const auto data = corpus(50);
  const auto params = medlda::TopicModelParams::random(4, data.corpus.vocab_size(), 1);
  const auto tokens = medlda::expand_tokens(data.corpus);
  medlda::RegressionHead head;
  head.lambda = medlda::Vector::LinSpaced(4, -1.0, 1.0);
  head.sigma = 0.1 * medlda::Matrix::Identity(4, 4);
  head.delta2 = 0.1;
  const auto y = data.responses.values();
  for (auto _ : state) {
    for (std::size_t d = 0; d < tokens.size(); ++d) {
      auto var = medlda::init_variational(static_cast<int>(tokens[d].size()), params.alpha());
      medlda::e_step_full(tokens[d], params, head, y[d], 0.0, 16.0, 0.1,
                          medlda::DualCoupling::kExactCoordinate, var, {});
      benchmark::DoNotOptimize(var.gamma.data());
    }
  }
}
BENCHMARK(BM_FullEStep);

void BM_SolveSvr(benchmark::State& state) {
  const auto data = corpus(static_cast<int>(state.range(0)));
  medlda::svm::SvrInstance inst;
  inst.x.resize(data.corpus.size(), 4);
  for (int d = 0; d < data.corpus.size(); ++d) inst.x.row(d) = data.zbar[static_cast<std::size_t>(d)].transpose();
  inst.y = Eigen::Map<const medlda::Vector>(data.responses.values().data(), data.corpus.size());
  inst.c = 16.0;
  inst.epsilon = 0.1;
  for (auto _ : state) {
    auto sol = medlda::svm::solve_svr(inst);
    benchmark::DoNotOptimize(sol.weights.data());
  }
}
BENCHMARK(BM_SolveSvr)->Arg(100)->Arg(400);

void BM_SolveMulticlass(benchmark::State& state) {
  medlda::SynthConfig cfg;
  cfg.docs = static_cast<int>(state.range(0));
  cfg.response = medlda::SynthResponse::kClassification;
  cfg.seed = 5;
  const auto data = medlda::generate_synthetic(cfg);
  medlda::svm::McSvmInstance inst;
  inst.features.resize(cfg.docs, 4);
  for (int d = 0; d < cfg.docs; ++d) inst.features.row(d) = data.zbar[static_cast<std::size_t>(d)].transpose();
  inst.labels.assign(data.responses.labels().begin(), data.responses.labels().end());
  inst.classes = 2;
  inst.c = 16.0;
  for (auto _ : state) {
    auto sol = medlda::svm::solve_multiclass_svm(inst);
    benchmark::DoNotOptimize(sol.lambda.data());
  }
}
BENCHMARK(BM_SolveMulticlass)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
