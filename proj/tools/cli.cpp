#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "medlda/baselines.hpp"
#include "medlda/classification.hpp"
#include "medlda/error.hpp"
#include "medlda/eval.hpp"
#include "medlda/model_io.hpp"
#include "medlda/regression.hpp"
#include "medlda/synth.hpp"

namespace medlda::cli {
namespace {

std::string read_file(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + what + " '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Temp file next to the target, then rename over it.
void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ValidationError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ValidationError("cannot rename onto '" + path + "'");
  }
}

// Largest term id + 1 over an LDA-C file; used when no vocabulary size is given.
int infer_vocab_size(const std::string& text) {
  int max_id = -1;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) continue;
      try {
        max_id = std::max(max_id, std::stoi(tok.substr(0, colon)));
      } catch (const std::exception&) {
        // left for the parser to report
      }
    }
  }
  return std::max(max_id + 1, 1);
}

Corpus load_corpus(const std::string& path, std::optional<int> vocab) {
  const std::string text = read_file(path, "corpus");
  return parse_ldac(text, vocab ? *vocab : infer_vocab_size(text));
}

ResponseVector load_response_file(const std::string& path, bool categorical,
                                  std::optional<int> classes) {
  return load_responses(read_file(path, "response file"),
                        categorical ? ResponseKind::kCategorical : ResponseKind::kContinuous,
                        classes);
}

std::string join_lines(const std::vector<double>& values, bool integral) {
  std::string out;
  for (double v : values) {
    out += integral ? std::to_string(static_cast<long long>(v)) : format_double(v);
    out += '\n';
  }
  return out;
}

std::string trace_text(const std::vector<double>& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) out += std::to_string(i + 1) + "\t" + format_double(trace[i]) + "\n";
  return out;
}

// Flat key=value file; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(read_file(path, "config file"));
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

// Appends config entries for options the command line does not set, so
// flags win over the config file and the config file over defaults.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::optional<std::string> config;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    if (key == "config") {
      if (eq != std::string::npos) {
        config = a.substr(eq + 1);
      } else if (i + 1 < args.size()) {
        config = args[i + 1];
      }
    }
    given.insert(key);
  }
  if (!config) return args;
  for (const auto& [key, value] : read_config(*config)) {
    if (key == "config" || given.contains(key)) continue;
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

struct TrainArgs {
  std::string task;
  std::string data;
  std::string responses;
  std::string model;
  std::string trace;
  std::optional<int> vocab;
  std::optional<int> classes;
  int topics = 10;
  double c = 1.0;
  double epsilon = 0.1;
  int iters = 50;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string coupling = "exact";
};

TrainConfig make_config(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.topics = a.topics;
  cfg.c = a.c;
  cfg.epsilon = a.epsilon;
  cfg.em_max_iter = a.iters;
  cfg.em_rel_tol = a.tol;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.coupling = a.coupling == "previous" ? DualCoupling::kPreviousDuals : DualCoupling::kExactCoordinate;
  return cfg;
}

void add_training_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--topics", a.topics, "Number of topics K")->capture_default_str();
  cmd->add_option("--epsilon", a.epsilon, "Width of the epsilon-insensitive tube")->capture_default_str();
  cmd->add_option("--iters", a.iters, "Maximum EM iterations")->capture_default_str();
  cmd->add_option("--tol", a.tol, "Relative change of the objective that stops EM")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads for the per-document E-step")
      ->capture_default_str();
  cmd->add_option("--coupling", a.coupling,
                  "Margin multiplier in the E-step: exact (per-row minimizer) or previous (last dual solve)")
      ->check(CLI::IsMember({"exact", "previous"}))
      ->capture_default_str();
  cmd->add_option("--vocab", a.vocab, "Vocabulary size (default: largest term id + 1)");
  cmd->add_option("--classes", a.classes, "Class count M (default: largest label)");
  cmd->add_option("--config", "Flat key=value file with option defaults");
}

Task checked_task(const std::string& name) { return parse_task(name); }

ModelFile train_model(Task task, const Corpus& corpus, const std::optional<ResponseVector>& responses,
                      const TrainConfig& cfg) {
  switch (task) {
    case Task::kRegFull:
      return to_model_file(train_regression(corpus, *responses, cfg, RegressionVariant::kFull));
    case Task::kRegPartial:
      return to_model_file(train_regression(corpus, *responses, cfg, RegressionVariant::kPartial));
    case Task::kClass:
      return to_model_file(train_classification(corpus, *responses, cfg));
    case Task::kSlda:
      return to_model_file(train_slda_regression(corpus, *responses, cfg));
    case Task::kLda:
      break;
  }
  return to_model_file(train_lda(corpus, cfg));
}

std::optional<ResponseVector> responses_for(Task task, const std::string& path,
                                            std::optional<int> classes) {
  if (task == Task::kLda) return std::nullopt;
  if (path.empty()) {
    throw ValidationError("task '" + std::string(task_name(task)) +
                          "' needs a response file: pass --responses");
  }
  return load_response_file(path, task == Task::kClass, classes);
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const Task task = checked_task(a.task);
  const Corpus corpus = load_corpus(a.data, a.vocab);
  const auto responses = responses_for(task, a.responses, a.classes);
  const ModelFile model = train_model(task, corpus, responses, make_config(a));
  write_file_atomic(a.model, serialize_model(model));
  const std::string trace_path = a.trace.empty() ? a.model + ".trace" : a.trace;
  write_file_atomic(trace_path, trace_text(model.trace));
  out << "task=" << task_name(task) << "\niterations=" << model.trace.size()
      << "\nobjective=" << format_double(model.trace.empty() ? 0.0 : model.trace.back())
      << "\nmodel=" << a.model << "\ntrace=" << trace_path << "\n";
  return kExitOk;
}

Corpus load_corpus_for(const ModelFile& model, const std::string& path, std::optional<int> vocab) {
  if (vocab && *vocab != model.params.vocab_size()) {
    throw ValidationError("--vocab " + std::to_string(*vocab) + " does not match model vocabulary size " +
                          std::to_string(model.params.vocab_size()));
  }
  try {
    return load_corpus(path, model.params.vocab_size());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " (model vocabulary size " +
                          std::to_string(model.params.vocab_size()) + ")");
  }
}

struct InferArgs {
  std::string model;
  std::string data;
  std::string out;
  std::optional<int> vocab;
  int threads = 1;
};

int cmd_infer(const InferArgs& a, std::ostream& out) {
  const ModelFile model = parse_model(read_file(a.model, "model file"));
  const Corpus corpus = load_corpus_for(model, a.data, a.vocab);
  const auto pred = predict(model, corpus, {}, a.threads);
  const std::string text = join_lines(pred, model.task == Task::kClass);
  if (a.out.empty()) {
    out << text;
  } else {
    write_file_atomic(a.out, text);
  }
  return kExitOk;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string responses;
  std::string out;
  std::string tsv;
  std::string embedding;
  std::string class_table;
  std::optional<double> baseline;
  std::optional<int> vocab;
  int threads = 1;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const ModelFile model = parse_model(read_file(a.model, "model file"));
  const Corpus corpus = load_corpus_for(model, a.data, a.vocab);
  MetricsReport report;
  report.add("documents", corpus.size());
  report.add("per_word_bound", per_word_bound(model.params, corpus, {}, a.threads));

  std::optional<ResponseVector> responses;
  if (!a.responses.empty()) {
    responses = load_response_file(a.responses, model.task == Task::kClass,
                                   model.task == Task::kClass ? std::optional<int>(model.classes)
                                                              : std::nullopt);
    check_aligned(corpus, *responses);
  }
  if (responses && model.task != Task::kLda) {
    const auto pred = predict(model, corpus, {}, a.threads);
    double metric = 0.0;
    if (model.task == Task::kClass) {
      std::vector<int> labels;
      for (double p : pred) labels.push_back(static_cast<int>(p) - 1);
      metric = accuracy(responses->labels(), labels);
      report.add("accuracy", metric);
      report.add("error_rate", 1.0 - metric);
    } else {
      metric = predictive_r2(responses->values(), pred);
      report.add("pR2", metric);
    }
    if (a.baseline) report.add("relative_improvement", relative_improvement(metric, *a.baseline));
  }

  const bool need_zbar = !a.embedding.empty() || !a.class_table.empty();
  if (need_zbar) {
    const auto zbar = infer_topic_proportions(corpus, model.params, {}, a.threads);
    if (!a.embedding.empty()) {
      std::vector<std::string> labels;
      for (int d = 0; d < corpus.size(); ++d) {
        if (!responses) {
          labels.push_back(std::to_string(d + 1));
        } else if (responses->is_categorical()) {
          labels.push_back(std::to_string(responses->labels()[static_cast<std::size_t>(d)] + 1));
        } else {
          labels.push_back(format_double(responses->values()[static_cast<std::size_t>(d)]));
        }
      }
      write_file_atomic(a.embedding, export_embedding(zbar, labels));
    }
    if (!a.class_table.empty()) {
      if (!responses || !responses->is_categorical()) {
        throw ValidationError("--class-table needs a classification model and --responses");
      }
      const Matrix table = class_average_topics(zbar, responses->labels(), responses->class_count());
      std::string text;
      for (Eigen::Index y = 0; y < table.rows(); ++y) {
        text += std::to_string(y + 1);
        for (Eigen::Index k = 0; k < table.cols(); ++k) text += "\t" + format_double(table(y, k));
        text += "\n";
      }
      write_file_atomic(a.class_table, text);
    }
  }

  const std::string text = report.to_key_value();
  if (a.out.empty()) {
    out << text;
  } else {
    write_file_atomic(a.out, text);
  }
  if (!a.tsv.empty()) write_file_atomic(a.tsv, report.to_tsv());
  return kExitOk;
}

struct CvArgs {
  TrainArgs train;
  std::vector<double> grid;
  int folds = 5;
  std::string out;
};

int cmd_cv_grid(CvArgs& a, std::ostream& out) {
  const Task task = checked_task(a.train.task);
  if (task != Task::kRegFull && task != Task::kRegPartial && task != Task::kClass) {
    throw ValidationError("cv-grid needs task reg-full, reg-partial or class");
  }
  if (a.grid.empty()) {
    for (int k = 1; k <= 8; ++k) a.grid.push_back(k * k);
  }
  const Corpus corpus = load_corpus(a.train.data, a.train.vocab);
  const auto responses = responses_for(task, a.train.responses, a.train.classes);
  check_aligned(corpus, *responses);
  const auto folds = assign_folds(corpus.size(), a.folds, a.train.seed);

  std::string text = "c\tmean_" + std::string(task == Task::kClass ? "accuracy" : "pR2") + "\n";
  double best_metric = -std::numeric_limits<double>::infinity();
  double best_c = a.grid.front();
  for (double c : a.grid) {
    TrainArgs ta = a.train;
    ta.c = c;
    const TrainConfig cfg = make_config(ta);
    double total = 0.0;
    for (int f = 0; f < a.folds; ++f) {
      std::vector<int> train_idx;
      std::vector<int> test_idx;
      for (int d = 0; d < corpus.size(); ++d) (folds[static_cast<std::size_t>(d)] == f ? test_idx : train_idx).push_back(d);
      const Corpus train_corpus = corpus.subset(train_idx);
      const Corpus test_corpus = corpus.subset(test_idx);
      const ResponseVector train_resp = responses->subset(train_idx);
      const ResponseVector test_resp = responses->subset(test_idx);
      const ModelFile model = train_model(task, train_corpus, train_resp, cfg);
      const auto pred = predict(model, test_corpus, {}, ta.threads);
      if (task == Task::kClass) {
        std::vector<int> labels;
        for (double p : pred) labels.push_back(static_cast<int>(p) - 1);
        total += accuracy(test_resp.labels(), labels);
      } else {
        total += predictive_r2(test_resp.values(), pred);
      }
    }
    const double mean = total / a.folds;
    text += format_double(c) + "\t" + format_double(mean) + "\n";
    if (mean > best_metric) {
      best_metric = mean;
      best_c = c;
    }
  }
  text += "best_c=" + format_double(best_c) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    write_file_atomic(a.out, text);
  }
  return kExitOk;
}

struct SynthArgs {
  std::string task = "regression";
  SynthConfig config;
  std::string data;
  std::string responses;
};

int cmd_synth(SynthArgs& a, std::ostream& out) {
  if (a.task == "regression") {
    a.config.response = SynthResponse::kRegression;
  } else if (a.task == "classification") {
    a.config.response = SynthResponse::kClassification;
  } else {
    a.config.response = SynthResponse::kWordFrequency;
  }
  const SynthData data = generate_synthetic(a.config);
  write_file_atomic(a.data, serialize_ldac(data.corpus));
  write_file_atomic(a.responses, serialize_responses(data.responses));
  out << "documents=" << data.corpus.size() << "\nvocab=" << data.corpus.vocab_size() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topic models trained with margin constraints", "medlda"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write its objective trace");
  train_cmd->add_option("--task", train.task, "reg-full, reg-partial, class, lda or slda")->required();
  train_cmd->add_option("--data", train.data, "Corpus in LDA-C format")->required();
  train_cmd->add_option("--responses", train.responses, "One response per line (labels 1..M)");
  train_cmd->add_option("--c", train.c, "Margin weight C")->capture_default_str();
  train_cmd->add_option("--model", train.model, "Output model file")->required();
  train_cmd->add_option("--trace", train.trace, "Output trace file (default: <model>.trace)");
  add_training_options(train_cmd, train);

  InferArgs infer;
  auto* infer_cmd = app.add_subcommand("infer", "Predict responses or labels for a corpus");
  infer_cmd->add_option("--model", infer.model, "Model file")->required();
  infer_cmd->add_option("--data", infer.data, "Corpus in LDA-C format")->required();
  infer_cmd->add_option("--out", infer.out, "Predictions file (default: stdout)");
  infer_cmd->add_option("--vocab", infer.vocab, "Expected vocabulary size");
  infer_cmd->add_option("--threads", infer.threads, "Worker threads")->capture_default_str();
  infer_cmd->add_option("--config", "Flat key=value file with option defaults");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Report metrics of a model on a corpus");
  eval_cmd->add_option("--model", eval.model, "Model file")->required();
  eval_cmd->add_option("--data", eval.data, "Corpus in LDA-C format")->required();
  eval_cmd->add_option("--responses", eval.responses, "Reference responses or labels");
  eval_cmd->add_option("--out", eval.out, "key=value report (default: stdout)");
  eval_cmd->add_option("--tsv", eval.tsv, "Report as a TSV table");
  eval_cmd->add_option("--embedding", eval.embedding, "Per-document label and E[zbar] rows");
  eval_cmd->add_option("--class-table", eval.class_table, "Per-class average E[zbar]");
  eval_cmd->add_option("--baseline", eval.baseline, "Baseline metric for the relative improvement");
  eval_cmd->add_option("--vocab", eval.vocab, "Expected vocabulary size");
  eval_cmd->add_option("--threads", eval.threads, "Worker threads")->capture_default_str();
  eval_cmd->add_option("--config", "Flat key=value file with option defaults");

  CvArgs cv;
  auto* cv_cmd = app.add_subcommand("cv-grid", "Pick C by k-fold cross-validation");
  cv_cmd->add_option("--task", cv.train.task, "reg-full, reg-partial or class")->required();
  cv_cmd->add_option("--data", cv.train.data, "Corpus in LDA-C format")->required();
  cv_cmd->add_option("--responses", cv.train.responses, "One response per line (labels 1..M)");
  cv_cmd->add_option("--grid", cv.grid, "Candidate C values (default: k^2 for k = 1..8)")->delimiter(',');
  cv_cmd->add_option("--folds", cv.folds, "Fold count")->capture_default_str();
  cv_cmd->add_option("--out", cv.out, "Report file (default: stdout)");
  add_training_options(cv_cmd, cv.train);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-topic corpus");
  synth_cmd->add_option("--task", synth.task, "regression, classification or word-frequency")
      ->check(CLI::IsMember({"regression", "classification", "word-frequency"}))
      ->capture_default_str();
  synth_cmd->add_option("--docs", synth.config.docs, "Documents")->capture_default_str();
  synth_cmd->add_option("--topics", synth.config.topics, "Planted topics")->capture_default_str();
  synth_cmd->add_option("--vocab", synth.config.vocab, "Vocabulary size")->capture_default_str();
  synth_cmd->add_option("--length", synth.config.doc_length, "Tokens per document")->capture_default_str();
  synth_cmd->add_option("--classes", synth.config.classes, "Classes")->capture_default_str();
  synth_cmd->add_option("--alpha", synth.config.doc_alpha, "Dirichlet parameter of theta")
      ->capture_default_str();
  synth_cmd->add_option("--leak", synth.config.leak, "Topic mass spread over the whole vocabulary")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.config.noise, "Response noise standard deviation")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.config.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--data", synth.data, "Output corpus")->required();
  synth_cmd->add_option("--responses", synth.responses, "Output responses")->required();
  synth_cmd->add_option("--config", "Flat key=value file with option defaults");

  try {
    std::vector<std::string> args = apply_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*train_cmd) return cmd_train(train, out);
    if (*infer_cmd) return cmd_infer(infer, out);
    if (*eval_cmd) return cmd_eval(eval, out);
    if (*cv_cmd) return cmd_cv_grid(cv, out);
    if (*synth_cmd) return cmd_synth(synth, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitValidation;
}

}  // namespace medlda::cli
