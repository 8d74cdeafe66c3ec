#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medlda/baselines.hpp"
#include "medlda/classification.hpp"
#include "medlda/regression.hpp"

namespace medlda {

enum class Task { kRegFull, kRegPartial, kClass, kLda, kSlda };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);
bool is_regression(Task task);  // reg-full, reg-partial, slda

// Every trainer's output in one persisted shape. Text format, version 1:
//   medlda-model 1
//   task <name>
//   topics K / vocab V / classes M / c / epsilon / delta2
//   alpha <K values>
//   beta, then K lines of V values
//   lambda <count> <values>       (M blocks of K for classification, eta for slda)
//   sigma identity | sigma, then K lines of K values
//   trace <count> <values>
// Numbers use 17 significant digits.
struct ModelFile {
  ModelFile(Task t, TopicModelParams p) : task(t), params(std::move(p)) {}

  Task task = Task::kLda;
  TopicModelParams params;
  int classes = 0;
  double c = 0.0;
  double epsilon = 0.0;
  double delta2 = 0.0;
  Vector lambda;
  std::optional<Matrix> sigma;  // absent means identity
  std::vector<double> trace;
};

ModelFile to_model_file(const RegressionModel& model);
ModelFile to_model_file(const ClassificationModel& model);
ModelFile to_model_file(const LdaModel& model);
ModelFile to_model_file(const SldaModel& model);

void write_model(std::ostream& out, const ModelFile& model);
std::string serialize_model(const ModelFile& model);
ModelFile read_model(std::istream& in);
ModelFile parse_model(const std::string& text);

// Predictions in corpus order: responses for regression tasks, one-based
// class labels for classification. LDA models have no predictor.
std::vector<double> predict(const ModelFile& model, const Corpus& corpus,
                            const InnerSchedule& schedule = {}, int threads = 1);

}  // namespace medlda
