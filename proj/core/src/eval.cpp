#include "medlda/eval.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "medlda/error.hpp"
#include "parallel.hpp"

namespace medlda {

double predictive_r2(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw ValidationError("pR2: length mismatch");
  if (y.size() < 2) throw ValidationError("pR2: at least two responses required");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double sse = 0.0;
  double sst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  if (sst == 0.0) throw ValidationError("pR2: responses are constant");
  return 1.0 - sse / sst;
}

double accuracy(std::span<const int> labels, std::span<const int> predicted) {
  if (labels.size() != predicted.size()) throw ValidationError("accuracy: length mismatch");
  if (labels.empty()) throw ValidationError("accuracy: no documents");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += labels[i] == predicted[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double relative_improvement(double model, double baseline) {
  if (baseline == 0.0) throw ValidationError("relative improvement: zero baseline");
  return (model - baseline) / baseline;
}

double per_word_bound(const TopicModelParams& params, const Corpus& corpus,
                      const InnerSchedule& schedule, int threads) {
  std::vector<double> bounds(static_cast<std::size_t>(corpus.size()));
  detail::parallel_for(corpus.size(), threads, [&](int d) {
    const auto tokens = corpus[d].tokens();
    const auto var = infer_document(tokens, params, schedule);
    bounds[static_cast<std::size_t>(d)] = lda_bound(tokens, var, params);
  });
  double total = 0.0;
  for (double b : bounds) total += b;
  return -total / static_cast<double>(corpus.total_tokens());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string export_embedding(std::span<const Vector> rows, std::span<const std::string> labels) {
  if (rows.size() != labels.size()) throw ValidationError("embedding: one label per row required");
  std::string out;
  for (std::size_t d = 0; d < rows.size(); ++d) {
    out += labels[d];
    for (Eigen::Index k = 0; k < rows[d].size(); ++k) {
      out += '\t';
      out += format_double(rows[d](k));
    }
    out += '\n';
  }
  return out;
}

void MetricsReport::add(std::string key, double value) { entries_.emplace_back(std::move(key), value); }

std::string MetricsReport::to_key_value() const {
  std::string out;
  for (const auto& [key, value] : entries_) out += key + "=" + format_double(value) + "\n";
  return out;
}

std::string MetricsReport::to_tsv() const {
  std::string head;
  std::string row;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0) {
      head += '\t';
      row += '\t';
    }
    head += entries_[i].first;
    row += format_double(entries_[i].second);
  }
  return head + "\n" + row + "\n";
}

}  // namespace medlda
