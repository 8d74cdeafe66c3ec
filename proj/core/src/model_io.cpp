#include "medlda/model_io.hpp"

#include <array>
#include <sstream>
#include <utility>

#include "medlda/error.hpp"
#include "medlda/eval.hpp"

namespace medlda {
namespace {

constexpr std::array<std::pair<Task, std::string_view>, 5> kTaskNames{{
    {Task::kRegFull, "reg-full"},
    {Task::kRegPartial, "reg-partial"},
    {Task::kClass, "class"},
    {Task::kLda, "lda"},
    {Task::kSlda, "slda"},
}};

void write_values(std::ostream& out, const double* v, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) out << ' ';
    out << format_double(v[i]);
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::istringstream line(std::string_view key) {
    std::string text;
    ++line_no_;
    if (!std::getline(in_, text)) fail("expected '" + std::string(key) + "', found end of file");
    std::istringstream ss(text);
    std::string word;
    ss >> word;
    if (word != key) fail("expected '" + std::string(key) + "', found '" + word + "'");
    return ss;
  }

  std::istringstream raw() {
    std::string text;
    ++line_no_;
    if (!std::getline(in_, text)) fail("unexpected end of file");
    return std::istringstream(text);
  }

  template <typename T>
  T scalar(std::string_view key) {
    auto ss = line(key);
    T v{};
    if (!(ss >> v)) fail("bad value for '" + std::string(key) + "'");
    finish(ss);
    return v;
  }

  std::vector<double> values(std::istringstream& ss, std::size_t count) {
    std::vector<double> out(count);
    for (auto& v : out) {
      std::string tok;
      if (!(ss >> tok)) fail("too few values");
      v = number(tok);
    }
    finish(ss);
    return out;
  }

  double number(const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail("bad number '" + tok + "'");
    }
    if (used != tok.size()) fail("bad number '" + tok + "'");
    return v;
  }

  void finish(std::istringstream& ss) {
    std::string extra;
    if (ss >> extra) fail("unexpected trailing value '" + extra + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

std::string_view task_name(Task task) {
  for (const auto& [t, name] : kTaskNames) {
    if (t == task) return name;
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (const auto& [t, n] : kTaskNames) {
    if (n == name) return t;
  }
  throw ValidationError("unknown task '" + std::string(name) +
                        "' (expected reg-full, reg-partial, class, lda or slda)");
}

bool is_regression(Task task) {
  return task == Task::kRegFull || task == Task::kRegPartial || task == Task::kSlda;
}

ModelFile to_model_file(const RegressionModel& model) {
  const bool full = model.head.variant == RegressionVariant::kFull;
  ModelFile f{full ? Task::kRegFull : Task::kRegPartial, model.params};
  f.c = model.c;
  f.epsilon = model.epsilon;
  f.delta2 = full ? model.head.delta2 : 0.0;
  f.lambda = model.head.lambda;
  if (full) f.sigma = model.head.sigma;
  f.trace = model.trace;
  return f;
}

ModelFile to_model_file(const ClassificationModel& model) {
  ModelFile f{Task::kClass, model.params};
  f.classes = model.head.classes;
  f.c = model.c;
  f.lambda = model.head.lambda;
  f.trace = model.trace;
  return f;
}

ModelFile to_model_file(const LdaModel& model) {
  ModelFile f{Task::kLda, model.params};
  f.lambda = Vector(0);
  f.trace = model.trace;
  return f;
}

ModelFile to_model_file(const SldaModel& model) {
  ModelFile f{Task::kSlda, model.params};
  f.delta2 = model.head.delta2;
  f.lambda = model.head.eta;
  f.trace = model.trace;
  return f;
}

void write_model(std::ostream& out, const ModelFile& m) {
  const int k = m.params.topics();
  const int v = m.params.vocab_size();
  out << "medlda-model 1\n";
  out << "task " << task_name(m.task) << '\n';
  out << "topics " << k << '\n';
  out << "vocab " << v << '\n';
  out << "classes " << m.classes << '\n';
  out << "c " << format_double(m.c) << '\n';
  out << "epsilon " << format_double(m.epsilon) << '\n';
  out << "delta2 " << format_double(m.delta2) << '\n';
  out << "alpha ";
  write_values(out, m.params.alpha().data(), k);
  out << "\nbeta\n";
  for (int row = 0; row < k; ++row) {
    const Vector r = m.params.beta().row(row).transpose();
    write_values(out, r.data(), v);
    out << '\n';
  }
  out << "lambda " << m.lambda.size();
  if (m.lambda.size() > 0) out << ' ';
  write_values(out, m.lambda.data(), m.lambda.size());
  out << '\n';
  if (m.sigma) {
    out << "sigma\n";
    for (int row = 0; row < k; ++row) {
      const Vector r = m.sigma->row(row).transpose();
      write_values(out, r.data(), k);
      out << '\n';
    }
  } else {
    out << "sigma identity\n";
  }
  out << "trace " << m.trace.size();
  if (!m.trace.empty()) out << ' ';
  write_values(out, m.trace.data(), static_cast<Eigen::Index>(m.trace.size()));
  out << '\n';
}

std::string serialize_model(const ModelFile& model) {
  std::ostringstream out;
  write_model(out, model);
  return out.str();
}

ModelFile read_model(std::istream& in) {
  Reader r(in);
  if (r.scalar<int>("medlda-model") != 1) r.fail("unsupported model file version");
  Task task = Task::kLda;
  {
    auto ss = r.line("task");
    std::string name;
    ss >> name;
    r.finish(ss);
    try {
      task = parse_task(name);
    } catch (const ValidationError& e) {
      r.fail(e.what());
    }
  }
  const int k = r.scalar<int>("topics");
  const int v = r.scalar<int>("vocab");
  if (k < 1 || v < 1) r.fail("topics and vocab must be positive");
  const int classes = r.scalar<int>("classes");
  auto number = [&](std::string_view key) {
    auto ss = r.line(key);
    return r.values(ss, 1).front();
  };
  const double c = number("c");
  const double epsilon = number("epsilon");
  const double delta2 = number("delta2");
  auto alpha_line = r.line("alpha");
  const auto alpha = r.values(alpha_line, static_cast<std::size_t>(k));
  {
    auto ss = r.line("beta");
    r.finish(ss);
  }
  Matrix beta(k, v);
  for (int row = 0; row < k; ++row) {
    auto ss = r.raw();
    const auto vals = r.values(ss, static_cast<std::size_t>(v));
    for (int w = 0; w < v; ++w) beta(row, w) = vals[static_cast<std::size_t>(w)];
  }
  ModelFile m{task, TopicModelParams(Eigen::Map<const Vector>(alpha.data(), k), std::move(beta))};
  m.classes = classes;
  m.c = c;
  m.epsilon = epsilon;
  m.delta2 = delta2;
  {
    auto ss = r.line("lambda");
    std::size_t n = 0;
    if (!(ss >> n)) r.fail("bad lambda count");
    const auto vals = r.values(ss, n);
    m.lambda = Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(n));
  }
  {
    auto ss = r.line("sigma");
    std::string word;
    if (ss >> word) {
      if (word != "identity") r.fail("expected 'sigma identity' or a bare 'sigma'");
      r.finish(ss);
    } else {
      Matrix sigma(k, k);
      for (int row = 0; row < k; ++row) {
        auto rs = r.raw();
        const auto vals = r.values(rs, static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) sigma(row, j) = vals[static_cast<std::size_t>(j)];
      }
      m.sigma = std::move(sigma);
    }
  }
  {
    auto ss = r.line("trace");
    std::size_t n = 0;
    if (!(ss >> n)) r.fail("bad trace count");
    m.trace = r.values(ss, n);
  }

  const auto expected_lambda = [&]() -> Eigen::Index {
    switch (task) {
      case Task::kLda: return 0;
      case Task::kClass: return static_cast<Eigen::Index>(classes) * k;
      default: return k;
    }
  }();
  if (task == Task::kClass && classes < 2) r.fail("classification model needs classes >= 2");
  if (m.lambda.size() != expected_lambda) r.fail("lambda has the wrong length for this task");
  return m;
}

ModelFile parse_model(const std::string& text) {
  std::istringstream in(text);
  return read_model(in);
}

std::vector<double> predict(const ModelFile& model, const Corpus& corpus,
                            const InnerSchedule& schedule, int threads) {
  if (model.task == Task::kLda) throw ValidationError("an LDA model has no predictor");
  if (corpus.vocab_size() != model.params.vocab_size()) {
    throw ValidationError("corpus vocabulary size " + std::to_string(corpus.vocab_size()) +
                          " does not match model vocabulary size " +
                          std::to_string(model.params.vocab_size()));
  }
  const auto zbar = infer_topic_proportions(corpus, model.params, schedule, threads);
  std::vector<double> out;
  out.reserve(zbar.size());
  if (model.task == Task::kClass) {
    const ClassificationHead head{model.classes, model.lambda};
    for (const auto& z : zbar) out.push_back(argmax_class(head, z) + 1);
  } else {
    for (const auto& z : zbar) out.push_back(model.lambda.dot(z));
  }
  return out;
}

}  // namespace medlda
