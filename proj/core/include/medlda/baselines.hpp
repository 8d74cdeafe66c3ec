#pragma once

#include <vector>

#include "medlda/corpus.hpp"
#include "medlda/svm.hpp"
#include "medlda/train_config.hpp"
#include "medlda/var_core.hpp"

namespace medlda {

// Unsupervised LDA by variational EM. Uses TrainConfig's topics, em_max_iter,
// em_rel_tol, inner, seed and threads.
struct LdaModel {
  TopicModelParams params;
  std::vector<Vector> gammas;
  std::vector<double> trace;  // sum_d L^u_d after each iteration
};

LdaModel train_lda(const Corpus& corpus, const TrainConfig& config);

// Supervised LDA for regression with a point estimate of eta.
struct SldaHead {
  Vector eta;
  double delta2 = 1.0;
  bool regularized = false;  // set when the normal equations needed a ridge
};

struct SldaModel {
  TopicModelParams params;
  SldaHead head;
  std::vector<double> trace;  // L^s after each iteration
};

// Per-token sLDA phi update:
//   phi ∝ exp(E[log theta] + log beta_w + y/(N d2) eta - (2 eta eta^T others + eta∘eta) / (2 N^2 d2))
Vector phi_update_slda(int term, const Vector& gamma, const TopicModelParams& params,
                       const SldaHead& head, const Vector& phi_others, double y, int token_count);

// Solves E[A^T A] eta = E[A]^T y; adds 1e-8 I when the system is singular.
SldaHead slda_normal_equations(std::span<const Vector> zbar_means, const Matrix& zbar_outer_sum,
                               const Vector& y);

SldaModel train_slda_regression(const Corpus& corpus, const ResponseVector& responses,
                                const TrainConfig& config);
std::vector<double> predict_slda(const SldaModel& model, const Corpus& corpus,
                                 const InnerSchedule& schedule = {}, int threads = 1);

// Two-stage pipelines: unsupervised E[zbar] under trained topics feed a
// linear SVR or multi-class SVM.
struct TwoStageRegressor {
  TopicModelParams params;
  Vector weights;
};

struct TwoStageClassifier {
  TopicModelParams params;
  int classes = 2;
  Vector lambda;  // M blocks of K
};

TwoStageRegressor train_two_stage_svr(const TopicModelParams& params, const Corpus& corpus,
                                      const ResponseVector& responses, double c, double epsilon,
                                      const InnerSchedule& schedule = {}, int threads = 1);
std::vector<double> predict_two_stage(const TwoStageRegressor& model, const Corpus& corpus,
                                      const InnerSchedule& schedule = {}, int threads = 1);

TwoStageClassifier train_two_stage_svm(const TopicModelParams& params, const Corpus& corpus,
                                       const ResponseVector& labels, double c,
                                       const InnerSchedule& schedule = {}, int threads = 1);
// Zero-based labels, ties to the lowest index.
std::vector<int> predict_two_stage(const TwoStageClassifier& model, const Corpus& corpus,
                                   const InnerSchedule& schedule = {}, int threads = 1);

// Linear SVR on empirical word frequencies count / N.
RowMatrix word_frequencies(const Corpus& corpus, int vocab_size);
struct WordFrequencySvr {
  Vector weights;  // length V
};
WordFrequencySvr train_word_frequency_svr(const Corpus& corpus, const ResponseVector& responses,
                                          double c, double epsilon);
std::vector<double> predict_word_frequency_svr(const WordFrequencySvr& model, const Corpus& corpus);

// Binary classification through sLDA regression on 0/1 targets (class 1 -> 0,
// class 2 -> 1) and a 0.5 threshold.
struct SldaThresholdClassifier {
  SldaModel regression;
};
SldaThresholdClassifier train_slda_threshold(const Corpus& corpus, const ResponseVector& labels,
                                             const TrainConfig& config);
std::vector<int> predict_slda_threshold(const SldaThresholdClassifier& model, const Corpus& corpus,
                                        const InnerSchedule& schedule = {}, int threads = 1);

}  // namespace medlda
