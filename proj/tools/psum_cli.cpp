#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "psum/psum.h"

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kInput = 2, kModel = 3 };

int exit_code(psum_status s) {
  switch (s) {
    case PSUM_OK: return kOk;
    case PSUM_ERR_MODEL: return kModel;
    case PSUM_ERR_INTERNAL: return kInternal;
    default: return kInput;
  }
}

struct Failure {
  int code;
};

void check(psum_status s) {
  if (s == PSUM_OK) return;
  std::fprintf(stderr, "psum: %s: %s\n", psum_status_string(s), psum_last_error());
  throw Failure{exit_code(s)};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using ConfigHandle = Handle<psum_preprocess_config, psum_preprocess_config_free>;
using CorpusHandle = Handle<psum_corpus, psum_corpus_free>;
using OptionsHandle = Handle<psum_train_options, psum_train_options_free>;
using ModelHandle = Handle<psum_model, psum_model_free>;
using ReportHandle = Handle<psum_report, psum_report_free>;
using SummaryHandle = Handle<psum_summary, psum_summary_free>;
using EvaluationHandle = Handle<psum_evaluation, psum_evaluation_free>;

struct Common {
  std::string corpus;
  std::string stopwords;
  std::vector<std::string> abbreviations;
  bool abbreviations_set = false;
  std::string cache_dir;
};

struct TrainArgs {
  std::string labels, out, report_prefix;
  std::optional<std::uint64_t> seed;
  std::size_t pop_size = 10, max_ite = 100, runs = 30, jobs = 0;
  double ratio = 0.10;
  std::vector<double> phi{1.0, 1.0, 1.0, 1.0};
  std::vector<double> limit1{0.0, 1.0}, limit2{0.0, 6.0}, limit3{0.0, 0.5}, limit4{0.0, 6.0};
  std::vector<double> w_bin{0.2, 1.0}, w_real{1.0, 0.4};
  double stall_fraction = 0.2, stall_epsilon = 1e-6;
};

struct SummarizeArgs {
  std::string model, doc;
  double ratio = 0.0;
  bool scores = false;
};

struct EvaluateArgs {
  std::string model, labels, curve;
  double ratio = 0.0;
  bool per_doc = false;
};

struct FeaturesArgs {
  std::string doc, out;
  bool raw = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--corpus", c.corpus, "JSONL corpus")->required();
  cmd->add_option("--stopwords", c.stopwords, "stopword file replacing the built-in English list");
  cmd->add_option("--abbreviations", c.abbreviations, "abbreviations that do not end a sentence")
      ->each([&c](const std::string&) { c.abbreviations_set = true; });
  cmd->add_option("--cache-dir", c.cache_dir, "metric cache directory")->envname("PSUM_CACHE_DIR");
}

CorpusHandle open_corpus(const Common& c) {
  psum_preprocess_config* raw_config = nullptr;
  check(psum_preprocess_config_new(&raw_config));
  ConfigHandle config(raw_config);
  if (!c.stopwords.empty()) check(psum_preprocess_config_load_stopwords(config.get(), c.stopwords.c_str()));
  if (c.abbreviations_set) {
    std::vector<const char*> list;
    for (const auto& a : c.abbreviations) list.push_back(a.c_str());
    check(psum_preprocess_config_set_abbreviations(config.get(), list.data(), list.size()));
  }
  psum_corpus* corpus = nullptr;
  check(psum_corpus_load(c.corpus.c_str(), config.get(), &corpus));
  return CorpusHandle(corpus);
}

void attach_labels(psum_corpus* corpus, const std::string& path) {
  if (!std::filesystem::exists(path)) {
    std::fprintf(stderr, "psum: labels file '%s' does not exist\n", path.c_str());
    throw Failure{kInput};
  }
  check(psum_corpus_attach_labels(corpus, path.c_str()));
}

ModelHandle open_model(const std::string& path) {
  psum_model* model = nullptr;
  check(psum_model_load(path.c_str(), &model));
  return ModelHandle(model);
}

std::string report_prefix(const TrainArgs& a) {
  if (!a.report_prefix.empty()) return a.report_prefix;
  std::filesystem::path p(a.out);
  return (p.parent_path() / p.stem()).string();
}

void need_pair(const std::vector<double>& v, const char* name) {
  if (v.size() != 2) {
    std::fprintf(stderr, "psum: %s takes exactly two values\n", name);
    throw Failure{kInput};
  }
}

int run_train(const Common& c, const TrainArgs& a) {
  auto corpus = open_corpus(c);
  attach_labels(corpus.get(), a.labels);

  std::uint64_t seed;
  if (a.seed) {
    seed = *a.seed;
  } else {
    seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
    std::fprintf(stderr, "psum: no --seed given, using seed %llu\n", static_cast<unsigned long long>(seed));
  }
  for (auto [v, name] : {std::pair{&a.limit1, "--limit1"}, {&a.limit2, "--limit2"}, {&a.limit3, "--limit3"},
                         {&a.limit4, "--limit4"}, {&a.w_bin, "--w-bin"}, {&a.w_real, "--w-real"}})
    need_pair(*v, name);
  if (a.phi.size() != 4) {
    std::fprintf(stderr, "psum: --phi takes exactly four values\n");
    throw Failure{kInput};
  }

  psum_train_options* raw_options = nullptr;
  check(psum_train_options_new(&raw_options));
  OptionsHandle options(raw_options);
  auto* o = options.get();
  check(psum_train_options_set_pop_size(o, a.pop_size));
  check(psum_train_options_set_max_ite(o, a.max_ite));
  check(psum_train_options_set_runs(o, a.runs));
  check(psum_train_options_set_seed(o, seed));
  check(psum_train_options_set_ratio(o, a.ratio));
  check(psum_train_options_set_jobs(o, a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency())));
  check(psum_train_options_set_phi(o, a.phi[0], a.phi[1], a.phi[2], a.phi[3]));
  check(psum_train_options_set_limit(o, 1, a.limit1[0], a.limit1[1]));
  check(psum_train_options_set_limit(o, 2, a.limit2[0], a.limit2[1]));
  check(psum_train_options_set_limit(o, 3, a.limit3[0], a.limit3[1]));
  check(psum_train_options_set_limit(o, 4, a.limit4[0], a.limit4[1]));
  check(psum_train_options_set_inertia(o, a.w_bin[0], a.w_bin[1], a.w_real[0], a.w_real[1]));
  check(psum_train_options_set_stall(o, a.stall_fraction, a.stall_epsilon));
  check(psum_train_options_set_cache_dir(o, c.cache_dir.c_str()));

  psum_model* raw_model = nullptr;
  psum_report* raw_report = nullptr;
  check(psum_train(corpus.get(), o, &raw_model, &raw_report));
  ModelHandle model(raw_model);
  ReportHandle report(raw_report);

  check(psum_model_save(model.get(), a.out.c_str()));
  const auto prefix = report_prefix(a);
  for (const char* kind : {"metrics", "runs", "curve", "trace"}) {
    const auto path = prefix + "." + kind + ".csv";
    check(psum_report_write(report.get(), kind, path.c_str()));
  }

  std::printf("best fitness %.6f\n", psum_model_fitness(model.get()));
  std::printf("selected");
  for (std::size_t j = 0; j < psum_metric_count(); ++j)
    if (psum_model_is_selected(model.get(), j))
      std::printf(" %s=%.4f", psum_metric_name(j), psum_model_weight(model.get(), j));
  std::printf("\n");
  return kOk;
}

int run_summarize(const Common& c, const SummarizeArgs& a) {
  auto model = open_model(a.model);
  auto corpus = open_corpus(c);
  std::vector<std::size_t> docs;
  if (!a.doc.empty()) {
    std::size_t d = 0;
    check(psum_corpus_find(corpus.get(), a.doc.c_str(), &d));
    docs.push_back(d);
  } else {
    for (std::size_t d = 0; d < psum_corpus_size(corpus.get()); ++d) docs.push_back(d);
  }
  const bool headers = docs.size() > 1;
  for (auto d : docs) {
    psum_summary* raw = nullptr;
    check(psum_summarize(model.get(), corpus.get(), d, a.ratio, c.cache_dir.c_str(), &raw));
    SummaryHandle summary(raw);
    if (headers) std::printf("## %s\n", psum_corpus_document_id(corpus.get(), d));
    for (std::size_t i = 0; i < psum_summary_size(summary.get()); ++i) {
      if (a.scores)
        std::printf("%s\t%.6f\n", psum_summary_sentence_text(summary.get(), i),
                    psum_summary_sentence_score(summary.get(), i));
      else
        std::printf("%s\n", psum_summary_sentence_text(summary.get(), i));
    }
  }
  return kOk;
}

int run_evaluate(const Common& c, const EvaluateArgs& a) {
  auto model = open_model(a.model);
  auto corpus = open_corpus(c);
  attach_labels(corpus.get(), a.labels);
  psum_evaluation* raw = nullptr;
  check(psum_evaluate(model.get(), corpus.get(), a.ratio, c.cache_dir.c_str(), &raw));
  EvaluationHandle evaluation(raw);
  std::printf("accuracy %.6f\n", psum_evaluation_accuracy(evaluation.get()));
  std::printf("mean_mcc %.6f\n", psum_evaluation_mean_mcc(evaluation.get()));
  if (a.per_doc)
    for (std::size_t i = 0; i < psum_evaluation_document_count(evaluation.get()); ++i)
      std::printf("%s\t%.6f\n", psum_evaluation_document_id(evaluation.get(), i),
                  psum_evaluation_document_mcc(evaluation.get(), i));
  if (!a.curve.empty())
    check(psum_write_accuracy_curve(model.get(), corpus.get(), a.ratio, c.cache_dir.c_str(), a.curve.c_str()));
  return kOk;
}

int run_features(const Common& c, const FeaturesArgs& a) {
  auto corpus = open_corpus(c);
  std::size_t d = 0;
  check(psum_corpus_find(corpus.get(), a.doc.c_str(), &d));
  check(psum_corpus_write_features_csv(corpus.get(), d, a.raw ? 1 : 0, c.cache_dir.c_str(), a.out.c_str()));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extractive summarizer trained with a hybrid binary/continuous particle swarm"};
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);
  int verbosity = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbosity, "more log output (repeatable)");
  app.add_flag("-q,--quiet", quiet, "only errors");
  app.set_version_flag("--version", std::string(psum_version()));

  Common common;

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "learn metric weights from a labeled corpus");
  add_common(train_cmd, common);
  train_cmd->add_option("--labels", train.labels, "JSON labels {doc_id: [sentence indices]}")->required();
  train_cmd->add_option("--out", train.out, "model JSON to write")->required();
  train_cmd->add_option("--report-prefix", train.report_prefix, "prefix for report CSVs (default: model path stem)");
  train_cmd->add_option("--seed", train.seed, "base seed; run r uses seed + r");
  train_cmd->add_option("--pop-size", train.pop_size, "particles per swarm")->capture_default_str();
  train_cmd->add_option("--max-ite", train.max_ite, "iterations per run")->capture_default_str();
  train_cmd->add_option("--runs", train.runs, "independent runs")->capture_default_str();
  train_cmd->add_option("--ratio", train.ratio, "summary size as a fraction of sentences")->capture_default_str();
  train_cmd->add_option("--jobs", train.jobs, "concurrent runs (0 = all cores)")->capture_default_str();
  train_cmd->add_option("--phi", train.phi, "phi1 phi2 phi3 phi4")->expected(4);
  train_cmd->add_option("--limit1", train.limit1, "V1 range")->expected(2);
  train_cmd->add_option("--limit2", train.limit2, "V2 range")->expected(2);
  train_cmd->add_option("--limit3", train.limit3, "V3 range")->expected(2);
  train_cmd->add_option("--limit4", train.limit4, "RealInd range")->expected(2);
  train_cmd->add_option("--w-bin", train.w_bin, "binary inertia start end")->expected(2);
  train_cmd->add_option("--w-real", train.w_real, "continuous inertia start end")->expected(2);
  train_cmd->add_option("--stall-fraction", train.stall_fraction, "stall window as a fraction of max-ite (0 = off)")
      ->capture_default_str();
  train_cmd->add_option("--stall-epsilon", train.stall_epsilon, "minimum improvement over the stall window")
      ->capture_default_str();

  SummarizeArgs summarize;
  auto* summarize_cmd = app.add_subcommand("summarize", "print the selected sentences of each document");
  add_common(summarize_cmd, common);
  summarize_cmd->add_option("--model", summarize.model, "model JSON")->required();
  summarize_cmd->add_option("--doc", summarize.doc, "only this document id");
  summarize_cmd->add_option("--ratio", summarize.ratio, "summary ratio (default: the model's)");
  summarize_cmd->add_flag("--scores", summarize.scores, "append a tab and the sentence score");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "accuracy and MCC against labels");
  add_common(evaluate_cmd, common);
  evaluate_cmd->add_option("--model", evaluate.model, "model JSON")->required();
  evaluate_cmd->add_option("--labels", evaluate.labels, "JSON labels")->required();
  evaluate_cmd->add_option("--ratio", evaluate.ratio, "summary ratio (default: the model's)");
  evaluate_cmd->add_option("--curve", evaluate.curve, "write the accuracy-vs-k CSV here");
  evaluate_cmd->add_flag("--per-doc", evaluate.per_doc, "print MCC per document");

  FeaturesArgs features;
  auto* features_cmd = app.add_subcommand("features", "dump a document's feature matrix as CSV");
  add_common(features_cmd, common);
  features_cmd->add_option("--doc", features.doc, "document id")->required();
  features_cmd->add_option("--out", features.out, "CSV to write")->required();
  features_cmd->add_flag("--raw", features.raw, "unscaled values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  psum_set_log_level(quiet ? PSUM_LOG_QUIET : verbosity >= 2 ? PSUM_LOG_DEBUG : verbosity == 1 ? PSUM_LOG_INFO
                                                                                             : PSUM_LOG_WARNING);
  try {
    if (*train_cmd) return run_train(common, train);
    if (*summarize_cmd) return run_summarize(common, summarize);
    if (*evaluate_cmd) return run_evaluate(common, evaluate);
    if (*features_cmd) return run_features(common, features);
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "psum: internal error: %s\n", e.what());
    return kInternal;
  }
  return kInternal;
}
