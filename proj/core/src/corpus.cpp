#include "medlda/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "medlda/error.hpp"

namespace medlda {
namespace {

std::string line_prefix(int line_no) { return "line " + std::to_string(line_no) + ": "; }

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Reads all lines; a single trailing newline does not produce an extra line.
std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

Document::Document(std::vector<TermCount> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ValidationError("document has no terms");
  long long total = 0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].term < 0) throw ValidationError("negative term id");
    if (terms_[i].count < 1) throw ValidationError("term count must be >= 1");
    if (i > 0 && terms_[i].term <= terms_[i - 1].term) {
      throw ValidationError("term ids must be strictly increasing");
    }
    total += terms_[i].count;
  }
  if (total > std::numeric_limits<int>::max()) throw ValidationError("document too long");
  token_count_ = static_cast<int>(total);
}

std::vector<int> Document::tokens() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(token_count_));
  for (const auto& tc : terms_) out.insert(out.end(), static_cast<std::size_t>(tc.count), tc.term);
  return out;
}

Corpus::Corpus(std::vector<Document> documents, int vocab_size)
    : documents_(std::move(documents)), vocab_size_(vocab_size) {
  if (vocab_size_ < 1) throw ValidationError("vocabulary size must be >= 1");
  if (documents_.empty()) throw ValidationError("corpus has zero documents");
  for (std::size_t d = 0; d < documents_.size(); ++d) {
    if (documents_[d].terms().back().term >= vocab_size_) {
      throw ValidationError("document " + std::to_string(d) + ": term id " +
                            std::to_string(documents_[d].terms().back().term) +
                            " out of range for vocabulary size " + std::to_string(vocab_size_));
    }
  }
}

long long Corpus::total_tokens() const {
  long long n = 0;
  for (const auto& doc : documents_) n += doc.token_count();
  return n;
}

Corpus Corpus::subset(std::span<const int> indices) const {
  std::vector<Document> docs;
  docs.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= size()) throw ValidationError("subset index out of range");
    docs.push_back(documents_[static_cast<std::size_t>(i)]);
  }
  return Corpus(std::move(docs), vocab_size_);
}

ResponseVector ResponseVector::continuous(std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("response is not finite");
  }
  ResponseVector r;
  r.kind_ = ResponseKind::kContinuous;
  r.values_ = std::move(values);
  return r;
}

ResponseVector ResponseVector::categorical(std::vector<int> labels, int class_count) {
  if (class_count < 2) throw ValidationError("categorical responses need at least 2 classes");
  for (int y : labels) {
    if (y < 0 || y >= class_count) {
      throw ValidationError("class " + std::to_string(y + 1) + " out of range 1.." +
                            std::to_string(class_count));
    }
  }
  ResponseVector r;
  r.kind_ = ResponseKind::kCategorical;
  r.labels_ = std::move(labels);
  r.class_count_ = class_count;
  return r;
}

int ResponseVector::size() const {
  return static_cast<int>(is_categorical() ? labels_.size() : values_.size());
}

ResponseVector ResponseVector::subset(std::span<const int> indices) const {
  if (is_categorical()) {
    std::vector<int> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(labels_.at(static_cast<std::size_t>(i)));
    return categorical(std::move(out), class_count_);
  }
  std::vector<double> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(values_.at(static_cast<std::size_t>(i)));
  return continuous(std::move(out));
}

Corpus parse_ldac(std::istream& in, int vocab_size) {
  if (vocab_size < 1) throw ValidationError("vocabulary size must be >= 1");
  std::vector<Document> docs;
  const auto lines = read_lines(in);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const auto fields = split_ws(lines[li]);
    if (fields.empty()) throw ValidationError(line_prefix(line_no) + "blank line");
    int declared = 0;
    if (!parse_number(fields[0], declared) || declared < 1) {
      throw ValidationError(line_prefix(line_no) + "bad unique-term count '" +
                            std::string(fields[0]) + "'");
    }
    const int found = static_cast<int>(fields.size()) - 1;
    if (found != declared) {
      throw ValidationError(line_prefix(line_no) + "unique-count mismatch: declared " +
                            std::to_string(declared) + ", found " + std::to_string(found));
    }
    std::vector<TermCount> terms;
    terms.reserve(static_cast<std::size_t>(found));
    for (int f = 1; f <= found; ++f) {
      const std::string_view pair = fields[static_cast<std::size_t>(f)];
      const auto colon = pair.find(':');
      TermCount tc;
      if (colon == std::string_view::npos || !parse_number(pair.substr(0, colon), tc.term) ||
          !parse_number(pair.substr(colon + 1), tc.count)) {
        throw ValidationError(line_prefix(line_no) + "malformed pair '" + std::string(pair) + "'");
      }
      if (tc.term < 0 || tc.term >= vocab_size) {
        throw ValidationError(line_prefix(line_no) + "term id " + std::to_string(tc.term) +
                              " out of range for vocabulary size " + std::to_string(vocab_size));
      }
      if (tc.count < 1) {
        throw ValidationError(line_prefix(line_no) + "count must be >= 1 in '" +
                              std::string(pair) + "'");
      }
      terms.push_back(tc);
    }
    std::sort(terms.begin(), terms.end(),
              [](const TermCount& a, const TermCount& b) { return a.term < b.term; });
    for (std::size_t i = 1; i < terms.size(); ++i) {
      if (terms[i].term == terms[i - 1].term) {
        throw ValidationError(line_prefix(line_no) + "duplicate term id " +
                              std::to_string(terms[i].term));
      }
    }
    docs.emplace_back(std::move(terms));
  }
  if (docs.empty()) throw ValidationError("corpus has zero documents");
  return Corpus(std::move(docs), vocab_size);
}

Corpus parse_ldac(const std::string& text, int vocab_size) {
  std::istringstream in(text);
  return parse_ldac(in, vocab_size);
}

std::string serialize_ldac(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents()) {
    out += std::to_string(doc.unique_terms());
    for (const auto& tc : doc.terms()) {
      out += ' ';
      out += std::to_string(tc.term);
      out += ':';
      out += std::to_string(tc.count);
    }
    out += '\n';
  }
  return out;
}

ResponseVector load_responses(std::istream& in, ResponseKind kind, std::optional<int> class_count) {
  const auto lines = read_lines(in);
  if (kind == ResponseKind::kContinuous) {
    std::vector<double> values;
    values.reserve(lines.size());
    for (std::size_t li = 0; li < lines.size(); ++li) {
      const auto fields = split_ws(lines[li]);
      double v = 0.0;
      if (fields.size() != 1 || !parse_number(fields[0], v) || !std::isfinite(v)) {
        throw ValidationError(line_prefix(static_cast<int>(li) + 1) + "non-numeric response '" +
                              lines[li] + "'");
      }
      values.push_back(v);
    }
    return ResponseVector::continuous(std::move(values));
  }

  std::vector<int> labels;
  labels.reserve(lines.size());
  int max_label = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto fields = split_ws(lines[li]);
    int y = 0;
    if (fields.size() != 1 || !parse_number(fields[0], y)) {
      throw ValidationError(line_prefix(static_cast<int>(li) + 1) + "non-integer class label '" +
                            lines[li] + "'");
    }
    if (y < 1 || (class_count && y > *class_count)) {
      throw ValidationError(line_prefix(static_cast<int>(li) + 1) + "class " + std::to_string(y) +
                            " out of range 1.." +
                            (class_count ? std::to_string(*class_count) : std::string("M")));
    }
    max_label = std::max(max_label, y);
    labels.push_back(y - 1);
  }
  return ResponseVector::categorical(std::move(labels), class_count.value_or(max_label));
}

ResponseVector load_responses(const std::string& text, ResponseKind kind,
                              std::optional<int> class_count) {
  std::istringstream in(text);
  return load_responses(in, kind, class_count);
}

std::string serialize_responses(const ResponseVector& responses) {
  std::string out;
  char buf[64];
  if (responses.is_categorical()) {
    for (int y : responses.labels()) out += std::to_string(y + 1) + '\n';
  } else {
    for (double v : responses.values()) {
      std::snprintf(buf, sizeof buf, "%.17g\n", v);
      out += buf;
    }
  }
  return out;
}

void check_aligned(const Corpus& corpus, const ResponseVector& responses) {
  if (corpus.size() != responses.size()) {
    throw ValidationError("corpus has " + std::to_string(corpus.size()) +
                          " documents but response file has " + std::to_string(responses.size()) +
                          " lines");
  }
}

std::pair<DataSplit, DataSplit> split_corpus(const Corpus& corpus, const ResponseVector& responses,
                                             double test_fraction, std::uint64_t seed) {
  check_aligned(corpus, responses);
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test fraction must lie in (0, 1)");
  }
  const int n = corpus.size();
  std::mt19937_64 rng(seed);
  std::vector<int> test;

  if (responses.is_categorical()) {
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(responses.class_count()));
    for (int d = 0; d < n; ++d) by_class[static_cast<std::size_t>(responses.labels()[d])].push_back(d);
    for (auto& members : by_class) {
      std::shuffle(members.begin(), members.end(), rng);
      const int sz = static_cast<int>(members.size());
      int take = static_cast<int>(std::lround(test_fraction * sz));
      take = std::min(take, sz - 1);  // keep one training instance per class
      for (int i = 0; i < std::max(take, 0); ++i) test.push_back(members[static_cast<std::size_t>(i)]);
    }
  } else {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int take = static_cast<int>(std::lround(test_fraction * n));
    test.assign(order.begin(), order.begin() + std::clamp(take, 0, n));
  }

  if (test.empty() || static_cast<int>(test.size()) >= n) {
    throw ValidationError("test fraction " + std::to_string(test_fraction) + " on " +
                          std::to_string(n) + " documents yields an empty split");
  }
  std::sort(test.begin(), test.end());
  std::vector<int> train;
  train.reserve(static_cast<std::size_t>(n) - test.size());
  std::size_t t = 0;
  for (int d = 0; d < n; ++d) {
    if (t < test.size() && test[t] == d) {
      ++t;
    } else {
      train.push_back(d);
    }
  }
  DataSplit tr{train, corpus.subset(train), responses.subset(train)};
  DataSplit te{test, corpus.subset(test), responses.subset(test)};
  return {std::move(tr), std::move(te)};
}

std::vector<int> assign_folds(int doc_count, int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("fold count must be >= 2");
  if (folds > doc_count) {
    throw ValidationError("fold count " + std::to_string(folds) + " exceeds document count " +
                          std::to_string(doc_count));
  }
  std::vector<int> order(static_cast<std::size_t>(doc_count));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(static_cast<std::size_t>(doc_count));
  for (int i = 0; i < doc_count; ++i) fold[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i % folds;
  return fold;
}

}  // namespace medlda
