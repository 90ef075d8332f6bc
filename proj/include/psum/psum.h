#ifndef PSUM_PSUM_H
#define PSUM_PSUM_H

#include <stddef.h>
#include <stdint.h>

#if defined(PSUM_BUILDING_LIBRARY)
#define PSUM_API __attribute__((visibility("default")))
#else
#define PSUM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psum_status {
  PSUM_OK = 0,
  PSUM_ERR_INVALID_ARGUMENT = 1,
  PSUM_ERR_IO = 2,
  PSUM_ERR_PARSE = 3,
  PSUM_ERR_VALIDATION = 4,
  PSUM_ERR_MODEL = 5,
  PSUM_ERR_INTERNAL = 6
} psum_status;

typedef enum psum_log_level {
  PSUM_LOG_QUIET = 0,
  PSUM_LOG_WARNING = 1,
  PSUM_LOG_INFO = 2,
  PSUM_LOG_DEBUG = 3
} psum_log_level;

typedef struct psum_preprocess_config psum_preprocess_config;
typedef struct psum_corpus psum_corpus;
typedef struct psum_train_options psum_train_options;
typedef struct psum_model psum_model;
typedef struct psum_report psum_report;
typedef struct psum_summary psum_summary;
typedef struct psum_evaluation psum_evaluation;

/* Message of the last failed call on this thread ("" if none). */
PSUM_API const char* psum_last_error(void);
PSUM_API const char* psum_status_string(psum_status status);
PSUM_API const char* psum_version(void);
PSUM_API void psum_set_log_level(psum_log_level level);

PSUM_API size_t psum_metric_count(void);
/* Canonical column name, NULL when out of range. */
PSUM_API const char* psum_metric_name(size_t column);

/* Preprocessing: built-in English stopwords and abbreviations by default. */
PSUM_API psum_status psum_preprocess_config_new(psum_preprocess_config** out);
PSUM_API void psum_preprocess_config_free(psum_preprocess_config* config);
PSUM_API psum_status psum_preprocess_config_load_stopwords(psum_preprocess_config* config, const char* path);
/* Replaces the abbreviation list. */
PSUM_API psum_status psum_preprocess_config_set_abbreviations(psum_preprocess_config* config,
                                                              const char* const* abbreviations, size_t count);
PSUM_API uint64_t psum_preprocess_config_fingerprint(const psum_preprocess_config* config);

/* Corpus: JSONL documents, labels as {"doc_id": [sentence indices]}. config may be NULL. */
PSUM_API psum_status psum_corpus_load(const char* path, const psum_preprocess_config* config, psum_corpus** out);
PSUM_API void psum_corpus_free(psum_corpus* corpus);
PSUM_API psum_status psum_corpus_attach_labels(psum_corpus* corpus, const char* labels_path);
PSUM_API size_t psum_corpus_size(const psum_corpus* corpus);
PSUM_API const char* psum_corpus_document_id(const psum_corpus* corpus, size_t doc);
/* Index of the document with this id, or PSUM_ERR_INVALID_ARGUMENT. */
PSUM_API psum_status psum_corpus_find(const psum_corpus* corpus, const char* id, size_t* doc);
PSUM_API size_t psum_corpus_sentence_count(const psum_corpus* corpus, size_t doc);
PSUM_API const char* psum_corpus_sentence_text(const psum_corpus* corpus, size_t doc, size_t sentence);
/* CSV of the feature matrix (scaled, or raw when raw != 0). cache_dir may be NULL. */
PSUM_API psum_status psum_corpus_write_features_csv(const psum_corpus* corpus, size_t doc, int raw,
                                                    const char* cache_dir, const char* path);

/* Training options. Defaults: pop 10, 100 iterations, 30 runs, ratio 0.10, seed 0. */
PSUM_API psum_status psum_train_options_new(psum_train_options** out);
PSUM_API void psum_train_options_free(psum_train_options* options);
PSUM_API psum_status psum_train_options_set_pop_size(psum_train_options* options, size_t pop_size);
PSUM_API psum_status psum_train_options_set_max_ite(psum_train_options* options, size_t max_ite);
PSUM_API psum_status psum_train_options_set_runs(psum_train_options* options, size_t runs);
PSUM_API psum_status psum_train_options_set_seed(psum_train_options* options, uint64_t seed);
PSUM_API psum_status psum_train_options_set_ratio(psum_train_options* options, double ratio);
PSUM_API psum_status psum_train_options_set_jobs(psum_train_options* options, size_t jobs);
PSUM_API psum_status psum_train_options_set_phi(psum_train_options* options, double phi1, double phi2, double phi3,
                                                double phi4);
/* which: 1..4 selects limit1..limit4; the range applies to every dimension. */
PSUM_API psum_status psum_train_options_set_limit(psum_train_options* options, int which, double lower,
                                                  double upper);
PSUM_API psum_status psum_train_options_set_inertia(psum_train_options* options, double bin_start, double bin_end,
                                                    double real_start, double real_end);
/* fraction 0 disables the stall test. */
PSUM_API psum_status psum_train_options_set_stall(psum_train_options* options, double fraction, double epsilon);
PSUM_API psum_status psum_train_options_set_cache_dir(psum_train_options* options, const char* dir);

/* Trains on the labeled documents. report may be NULL. */
PSUM_API psum_status psum_train(const psum_corpus* corpus, const psum_train_options* options,
                                psum_model** model, psum_report** report);

PSUM_API psum_status psum_model_save(const psum_model* model, const char* path);
PSUM_API psum_status psum_model_load(const char* path, psum_model** out);
PSUM_API void psum_model_free(psum_model* model);
PSUM_API double psum_model_weight(const psum_model* model, size_t column);
PSUM_API int psum_model_is_selected(const psum_model* model, size_t column);
PSUM_API double psum_model_fitness(const psum_model* model);

/* kind: "metrics", "runs", "curve" or "trace". */
PSUM_API psum_status psum_report_write(const psum_report* report, const char* kind, const char* path);
PSUM_API void psum_report_free(psum_report* report);

/* ratio <= 0 uses the model's training ratio. cache_dir may be NULL. */
PSUM_API psum_status psum_summarize(const psum_model* model, const psum_corpus* corpus, size_t doc, double ratio,
                                    const char* cache_dir, psum_summary** out);
PSUM_API void psum_summary_free(psum_summary* summary);
PSUM_API size_t psum_summary_size(const psum_summary* summary);
PSUM_API size_t psum_summary_sentence_index(const psum_summary* summary, size_t i);
PSUM_API const char* psum_summary_sentence_text(const psum_summary* summary, size_t i);
PSUM_API double psum_summary_sentence_score(const psum_summary* summary, size_t i);

PSUM_API psum_status psum_evaluate(const psum_model* model, const psum_corpus* corpus, double ratio,
                                   const char* cache_dir, psum_evaluation** out);
PSUM_API void psum_evaluation_free(psum_evaluation* evaluation);
PSUM_API double psum_evaluation_accuracy(const psum_evaluation* evaluation);
PSUM_API double psum_evaluation_mean_mcc(const psum_evaluation* evaluation);
PSUM_API size_t psum_evaluation_document_count(const psum_evaluation* evaluation);
PSUM_API const char* psum_evaluation_document_id(const psum_evaluation* evaluation, size_t i);
PSUM_API double psum_evaluation_document_mcc(const psum_evaluation* evaluation, size_t i);

/* Accuracy as the top-k metrics by mean training weight are added, k = 1..16. */
PSUM_API psum_status psum_write_accuracy_curve(const psum_model* model, const psum_corpus* corpus, double ratio,
                                               const char* cache_dir, const char* path);

#ifdef __cplusplus
}
#endif

#endif
