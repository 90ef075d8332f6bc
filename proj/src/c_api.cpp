#include "psum/psum.h"

#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "corpus.hpp"
#include "error.hpp"
#include "log.hpp"
#include "summarizer.hpp"

struct psum_preprocess_config {
  psum::PreprocessConfig config = psum::PreprocessConfig::defaults();
};

struct psum_corpus {
  psum::Corpus corpus;
  psum::PreprocessConfig config;
};

struct psum_train_options {
  psum::TrainingOptions options;
  std::optional<std::string> cache_dir;
};

struct psum_model {
  psum::SummarizerModel model;
};

struct psum_report {
  psum::RunReport report;
};

struct psum_summary {
  std::vector<psum::SummarySentence> sentences;
};

struct psum_evaluation {
  psum::EvaluationResult result;
};

namespace {

thread_local std::string last_error;

psum_status status_of(psum::ErrorKind kind) {
  switch (kind) {
    case psum::ErrorKind::InvalidArgument: return PSUM_ERR_INVALID_ARGUMENT;
    case psum::ErrorKind::Io: return PSUM_ERR_IO;
    case psum::ErrorKind::Parse: return PSUM_ERR_PARSE;
    case psum::ErrorKind::Validation: return PSUM_ERR_VALIDATION;
    case psum::ErrorKind::Model: return PSUM_ERR_MODEL;
    case psum::ErrorKind::Internal: return PSUM_ERR_INTERNAL;
  }
  return PSUM_ERR_INTERNAL;
}

template <class F>
psum_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return PSUM_OK;
  } catch (const psum::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PSUM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PSUM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return PSUM_ERR_INTERNAL;
  }
}

psum_status null_argument(const char* what) {
  last_error = std::string(what) + " must not be NULL";
  return PSUM_ERR_INVALID_ARGUMENT;
}

std::optional<std::filesystem::path> dir_or_none(const char* dir) {
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return std::filesystem::path(dir);
}

const psum::Document& document_at(const psum_corpus* corpus, size_t doc) {
  if (doc >= corpus->corpus.size())
    psum::fail(psum::ErrorKind::InvalidArgument, "document index " + std::to_string(doc) + " out of range");
  return corpus->corpus.documents[doc];
}

double resolve_ratio(const psum_model* model, double ratio) { return ratio > 0.0 ? ratio : model->model.meta.ratio; }

}  // namespace

extern "C" {

const char* psum_last_error(void) { return last_error.c_str(); }

const char* psum_status_string(psum_status status) {
  switch (status) {
    case PSUM_OK: return "ok";
    case PSUM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PSUM_ERR_IO: return "i/o error";
    case PSUM_ERR_PARSE: return "parse error";
    case PSUM_ERR_VALIDATION: return "validation error";
    case PSUM_ERR_MODEL: return "model error";
    case PSUM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* psum_version(void) { return "1.0.0"; }

void psum_set_log_level(psum_log_level level) { psum::log::set_level(static_cast<psum::log::Level>(level)); }

size_t psum_metric_count(void) { return psum::kMetricCount; }

const char* psum_metric_name(size_t column) {
  return column < psum::kMetricCount ? psum::metric_names()[column].data() : nullptr;
}

psum_status psum_preprocess_config_new(psum_preprocess_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new psum_preprocess_config; });
}

void psum_preprocess_config_free(psum_preprocess_config* config) { delete config; }

psum_status psum_preprocess_config_load_stopwords(psum_preprocess_config* config, const char* path) {
  if (!config || !path) return null_argument("config and path");
  return guarded([&] {
    config->config.stopwords = psum::load_stopwords(path);
    config->config.stopword_list_id = std::string("file:") + path;
  });
}

psum_status psum_preprocess_config_set_abbreviations(psum_preprocess_config* config,
                                                     const char* const* abbreviations, size_t count) {
  if (!config || (count > 0 && !abbreviations)) return null_argument("config and abbreviations");
  return guarded([&] {
    std::vector<std::string> list;
    for (size_t i = 0; i < count; ++i) {
      if (!abbreviations[i]) psum::fail(psum::ErrorKind::InvalidArgument, "abbreviation must not be NULL");
      list.emplace_back(abbreviations[i]);
    }
    config->config.abbreviations = std::move(list);
  });
}

uint64_t psum_preprocess_config_fingerprint(const psum_preprocess_config* config) {
  return config ? config->config.fingerprint() : 0;
}

psum_status psum_corpus_load(const char* path, const psum_preprocess_config* config, psum_corpus** out) {
  if (!path || !out) return null_argument("path and out");
  return guarded([&] {
    auto c = std::make_unique<psum_corpus>();
    c->config = config ? config->config : psum::PreprocessConfig::defaults();
    c->corpus = psum::load_corpus(path, c->config);
    *out = c.release();
  });
}

void psum_corpus_free(psum_corpus* corpus) { delete corpus; }

psum_status psum_corpus_attach_labels(psum_corpus* corpus, const char* labels_path) {
  if (!corpus || !labels_path) return null_argument("corpus and labels_path");
  return guarded([&] { psum::attach_labels(corpus->corpus, psum::read_labels(labels_path)); });
}

size_t psum_corpus_size(const psum_corpus* corpus) { return corpus ? corpus->corpus.size() : 0; }

const char* psum_corpus_document_id(const psum_corpus* corpus, size_t doc) {
  if (!corpus || doc >= corpus->corpus.size()) return nullptr;
  return corpus->corpus.documents[doc].id.c_str();
}

psum_status psum_corpus_find(const psum_corpus* corpus, const char* id, size_t* doc) {
  if (!corpus || !id || !doc) return null_argument("corpus, id and doc");
  for (size_t i = 0; i < corpus->corpus.size(); ++i) {
    if (corpus->corpus.documents[i].id == id) {
      *doc = i;
      last_error.clear();
      return PSUM_OK;
    }
  }
  last_error = std::string("no document with id '") + id + "'";
  return PSUM_ERR_INVALID_ARGUMENT;
}

size_t psum_corpus_sentence_count(const psum_corpus* corpus, size_t doc) {
  if (!corpus || doc >= corpus->corpus.size()) return 0;
  return corpus->corpus.documents[doc].size();
}

const char* psum_corpus_sentence_text(const psum_corpus* corpus, size_t doc, size_t sentence) {
  if (!corpus || doc >= corpus->corpus.size()) return nullptr;
  const auto& d = corpus->corpus.documents[doc];
  return sentence < d.size() ? d.sentences[sentence].raw_text.c_str() : nullptr;
}

psum_status psum_corpus_write_features_csv(const psum_corpus* corpus, size_t doc, int raw, const char* cache_dir,
                                           const char* path) {
  if (!corpus || !path) return null_argument("corpus and path");
  return guarded([&] {
    const auto& d = document_at(corpus, doc);
    psum::Corpus single;
    single.documents.push_back(d);
    const auto matrices = psum::feature_matrices(single, corpus->config, {}, dir_or_none(cache_dir));
    psum::write_file_atomic(path, psum::features_csv(matrices.front(), raw != 0));
  });
}

psum_status psum_train_options_new(psum_train_options** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new psum_train_options; });
}

void psum_train_options_free(psum_train_options* options) { delete options; }

#define PSUM_REQUIRE_OPTIONS \
  if (!options) return null_argument("options")

psum_status psum_train_options_set_pop_size(psum_train_options* options, size_t pop_size) {
  PSUM_REQUIRE_OPTIONS;
  options->options.swarm.pop_size = pop_size;
  return PSUM_OK;
}

psum_status psum_train_options_set_max_ite(psum_train_options* options, size_t max_ite) {
  PSUM_REQUIRE_OPTIONS;
  options->options.swarm.max_ite = max_ite;
  return PSUM_OK;
}

psum_status psum_train_options_set_runs(psum_train_options* options, size_t runs) {
  PSUM_REQUIRE_OPTIONS;
  options->options.runs = runs;
  return PSUM_OK;
}

psum_status psum_train_options_set_seed(psum_train_options* options, uint64_t seed) {
  PSUM_REQUIRE_OPTIONS;
  options->options.seed = seed;
  return PSUM_OK;
}

psum_status psum_train_options_set_ratio(psum_train_options* options, double ratio) {
  PSUM_REQUIRE_OPTIONS;
  options->options.ratio = ratio;
  return PSUM_OK;
}

psum_status psum_train_options_set_jobs(psum_train_options* options, size_t jobs) {
  PSUM_REQUIRE_OPTIONS;
  options->options.jobs = jobs;
  return PSUM_OK;
}

psum_status psum_train_options_set_phi(psum_train_options* options, double phi1, double phi2, double phi3,
                                       double phi4) {
  PSUM_REQUIRE_OPTIONS;
  auto& s = options->options.swarm;
  s.phi1 = phi1;
  s.phi2 = phi2;
  s.phi3 = phi3;
  s.phi4 = phi4;
  return PSUM_OK;
}

psum_status psum_train_options_set_limit(psum_train_options* options, int which, double lower, double upper) {
  PSUM_REQUIRE_OPTIONS;
  auto& s = options->options.swarm;
  auto limits = psum::pso::SwarmConfig::uniform_limits(s.dimensions, {lower, upper});
  switch (which) {
    case 1: s.limit1 = std::move(limits); break;
    case 2: s.limit2 = std::move(limits); break;
    case 3: s.limit3 = std::move(limits); break;
    case 4: s.limit4 = std::move(limits); break;
    default:
      last_error = "limit selector must be 1, 2, 3 or 4";
      return PSUM_ERR_INVALID_ARGUMENT;
  }
  return PSUM_OK;
}

psum_status psum_train_options_set_inertia(psum_train_options* options, double bin_start, double bin_end,
                                           double real_start, double real_end) {
  PSUM_REQUIRE_OPTIONS;
  options->options.swarm.w_bin = {bin_start, bin_end};
  options->options.swarm.w_real = {real_start, real_end};
  return PSUM_OK;
}

psum_status psum_train_options_set_stall(psum_train_options* options, double fraction, double epsilon) {
  PSUM_REQUIRE_OPTIONS;
  options->options.swarm.stall_fraction = fraction;
  options->options.swarm.stall_epsilon = epsilon;
  return PSUM_OK;
}

psum_status psum_train_options_set_cache_dir(psum_train_options* options, const char* dir) {
  PSUM_REQUIRE_OPTIONS;
  if (dir && *dir)
    options->cache_dir = dir;
  else
    options->cache_dir.reset();
  return PSUM_OK;
}

psum_status psum_train(const psum_corpus* corpus, const psum_train_options* options, psum_model** model,
                       psum_report** report) {
  if (!corpus || !options || !model) return null_argument("corpus, options and model");
  return guarded([&] {
    std::optional<std::filesystem::path> cache;
    if (options->cache_dir) cache = *options->cache_dir;
    const auto matrices = psum::feature_matrices(corpus->corpus, corpus->config, {}, cache);
    auto out = psum::train(corpus->corpus, matrices, options->options);
    out.model.meta.preprocess_fingerprint = corpus->config.fingerprint();
    auto m = std::make_unique<psum_model>(psum_model{std::move(out.model)});
    if (report) *report = new psum_report{std::move(out.report)};
    *model = m.release();
  });
}

psum_status psum_model_save(const psum_model* model, const char* path) {
  if (!model || !path) return null_argument("model and path");
  return guarded([&] { psum::save_model(model->model, path); });
}

psum_status psum_model_load(const char* path, psum_model** out) {
  if (!path || !out) return null_argument("path and out");
  return guarded([&] { *out = new psum_model{psum::load_model(path)}; });
}

void psum_model_free(psum_model* model) { delete model; }

double psum_model_weight(const psum_model* model, size_t column) {
  return model && column < psum::kMetricCount ? model->model.criterion.weights[column] : 0.0;
}

int psum_model_is_selected(const psum_model* model, size_t column) {
  return model && column < psum::kMetricCount && (model->model.criterion.mask >> column) & 1u;
}

double psum_model_fitness(const psum_model* model) { return model ? model->model.meta.final_fitness : 0.0; }

psum_status psum_report_write(const psum_report* report, const char* kind, const char* path) {
  if (!report || !kind || !path) return null_argument("report, kind and path");
  return guarded([&] {
    const std::string k = kind;
    std::string text;
    if (k == "metrics")
      text = psum::report_metrics_csv(report->report);
    else if (k == "runs")
      text = psum::report_runs_csv(report->report);
    else if (k == "curve")
      text = psum::curve_csv(report->report.curve);
    else if (k == "trace")
      text = psum::trace_csv(report->report);
    else
      psum::fail(psum::ErrorKind::InvalidArgument, "unknown report kind '" + k + "'");
    psum::write_file_atomic(path, text);
  });
}

void psum_report_free(psum_report* report) { delete report; }

psum_status psum_summarize(const psum_model* model, const psum_corpus* corpus, size_t doc, double ratio,
                           const char* cache_dir, psum_summary** out) {
  if (!model || !corpus || !out) return null_argument("model, corpus and out");
  return guarded([&] {
    const auto& d = document_at(corpus, doc);
    psum::Corpus single;
    single.documents.push_back(d);
    const auto matrices = psum::feature_matrices(single, corpus->config, {}, dir_or_none(cache_dir));
    *out = new psum_summary{psum::summarize(d, matrices.front(), model->model, resolve_ratio(model, ratio))};
  });
}

void psum_summary_free(psum_summary* summary) { delete summary; }

size_t psum_summary_size(const psum_summary* summary) { return summary ? summary->sentences.size() : 0; }

size_t psum_summary_sentence_index(const psum_summary* summary, size_t i) {
  return summary && i < summary->sentences.size() ? summary->sentences[i].index : 0;
}

const char* psum_summary_sentence_text(const psum_summary* summary, size_t i) {
  return summary && i < summary->sentences.size() ? summary->sentences[i].text.c_str() : nullptr;
}

double psum_summary_sentence_score(const psum_summary* summary, size_t i) {
  return summary && i < summary->sentences.size() ? summary->sentences[i].score : 0.0;
}

psum_status psum_evaluate(const psum_model* model, const psum_corpus* corpus, double ratio, const char* cache_dir,
                          psum_evaluation** out) {
  if (!model || !corpus || !out) return null_argument("model, corpus and out");
  return guarded([&] {
    const auto matrices = psum::feature_matrices(corpus->corpus, corpus->config, {}, dir_or_none(cache_dir));
    *out = new psum_evaluation{psum::evaluate(model->model, corpus->corpus, matrices, resolve_ratio(model, ratio))};
  });
}

void psum_evaluation_free(psum_evaluation* evaluation) { delete evaluation; }

double psum_evaluation_accuracy(const psum_evaluation* evaluation) {
  return evaluation ? evaluation->result.accuracy : 0.0;
}

double psum_evaluation_mean_mcc(const psum_evaluation* evaluation) {
  return evaluation ? evaluation->result.mean_mcc : 0.0;
}

size_t psum_evaluation_document_count(const psum_evaluation* evaluation) {
  return evaluation ? evaluation->result.per_doc.size() : 0;
}

const char* psum_evaluation_document_id(const psum_evaluation* evaluation, size_t i) {
  return evaluation && i < evaluation->result.per_doc.size() ? evaluation->result.per_doc[i].doc_id.c_str() : nullptr;
}

double psum_evaluation_document_mcc(const psum_evaluation* evaluation, size_t i) {
  return evaluation && i < evaluation->result.per_doc.size() ? evaluation->result.per_doc[i].mcc : 0.0;
}

psum_status psum_write_accuracy_curve(const psum_model* model, const psum_corpus* corpus, double ratio,
                                      const char* cache_dir, const char* path) {
  if (!model || !corpus || !path) return null_argument("model, corpus and path");
  return guarded([&] {
    const auto matrices = psum::feature_matrices(corpus->corpus, corpus->config, {}, dir_or_none(cache_dir));
    const auto curve =
        psum::accuracy_curve(model->model.meta.mean_weights, corpus->corpus, matrices, resolve_ratio(model, ratio));
    psum::write_file_atomic(path, psum::curve_csv(curve));
  });
}

}  // extern "C"
