#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "medlda/corpus.hpp"
#include "medlda/var_core.hpp"

namespace medlda {

// 1 - sum (y - yhat)^2 / sum (y - mean y)^2.
double predictive_r2(std::span<const double> y, std::span<const double> yhat);

double accuracy(std::span<const int> labels, std::span<const int> predicted);

// (model - baseline) / baseline.
double relative_improvement(double model, double baseline);

// Per-word log-likelihood lower bound: -sum_d L^u_d / total tokens, with an
// unsupervised E-step on each document.
double per_word_bound(const TopicModelParams& params, const Corpus& corpus,
                      const InnerSchedule& schedule = {}, int threads = 1);

// One row per document: label, then the K coordinates, tab separated.
std::string export_embedding(std::span<const Vector> rows, std::span<const std::string> labels);

// Ordered metric list rendered as key=value lines or a two-row TSV table.
class MetricsReport {
 public:
  void add(std::string key, double value);
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }
  std::string to_key_value() const;
  std::string to_tsv() const;

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Formats with 17 significant digits.
std::string format_double(double v);

}  // namespace medlda
