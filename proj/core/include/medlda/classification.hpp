#pragma once

#include <span>
#include <vector>

#include "medlda/corpus.hpp"
#include "medlda/svm.hpp"
#include "medlda/train_config.hpp"
#include "medlda/var_core.hpp"

namespace medlda {

// Mean of q(eta) = N(lambda, I); lambda holds M class blocks of length K.
struct ClassificationHead {
  int classes = 2;
  Vector lambda;

  int topics() const { return static_cast<int>(lambda.size()) / classes; }
  auto block(int label) const { return lambda.segment(static_cast<Eigen::Index>(label) * topics(), topics()); }
};

// D x M multipliers; entry (d, y_d) is unused and kept at zero.
struct ClassDuals {
  RowMatrix mu;
};

// Per-token phi update:
//   phi ∝ exp(E[log theta] + log beta_w + (1/N) sum_{y != y_d} mu_d(y) (lambda_{y_d} - lambda_y))
// Labels are zero-based. With every mu_d(y) = 0 this is the unsupervised update.
Vector phi_update_class(int term, const Vector& gamma, const TopicModelParams& params,
                        const ClassificationHead& head, const Vector& mu_row, int label,
                        int token_count);

// lambda = sum_d sum_{y != y_d} mu_d(y) (f(y_d, E[zbar_d]) - f(y, E[zbar_d])).
ClassificationHead posterior_eta_class(std::span<const Vector> zbar_means, std::span<const int> labels,
                                       const ClassDuals& duals, int classes);

// E-step for one document, in place. `mu_row` is only read under
// DualCoupling::kPreviousDuals.
int e_step_class(std::span<const int> tokens, const TopicModelParams& params,
                 const ClassificationHead& head, int label, const Vector& mu_row, double c,
                 DualCoupling coupling, DocVariational& var, const InnerSchedule& schedule);

// P3: sum_d L^u_d + 1/2 |lambda|^2 + C sum_d max(0, max_{y != y_d} 1 - lambda.df_d(y)).
double objective_p3(const std::vector<std::vector<int>>& tokens, std::span<const DocVariational> vars,
                    const TopicModelParams& params, const ClassificationHead& head,
                    std::span<const int> labels, double c);

struct ClassificationModel {
  TopicModelParams params;
  ClassificationHead head;
  ClassDuals duals;
  std::vector<double> trace;
  std::vector<Vector> train_zbar;  // E[zbar] of the training documents at the end
  double c = 0.0;
};

ClassificationModel train_classification(const Corpus& corpus, const ResponseVector& labels,
                                         const TrainConfig& config);

// argmax_y lambda_y . E[zbar] with ties to the lowest index. Zero-based.
int argmax_class(const ClassificationHead& head, const Vector& zbar);
int predict_class(const ClassificationModel& model, const Document& doc,
                  const InnerSchedule& schedule = {});
std::vector<int> predict_class(const ClassificationModel& model, const Corpus& corpus,
                               const InnerSchedule& schedule = {}, int threads = 1);

// Average E[zbar] per class, one row per class (M x K).
Matrix class_average_topics(std::span<const Vector> zbar_means, std::span<const int> labels,
                            int classes);

}  // namespace medlda
