#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "fitness.hpp"
#include "metrics.hpp"
#include "pso.hpp"

namespace psum {

struct TrainingOptions {
  pso::SwarmConfig swarm = pso::SwarmConfig::defaults(kMetricCount);
  double ratio = 0.10;
  std::size_t runs = 30;
  std::uint64_t seed = 0;  // run r uses seed + r
  std::size_t jobs = 1;
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::size_t pop_size = 0;
  std::size_t max_ite = 0;
  double ratio = 0.0;
  std::uint64_t corpus_fingerprint = 0;
  std::uint64_t preprocess_fingerprint = 0;
  double final_fitness = 0.0;
  std::array<double, kMetricCount> mean_weights{};

  bool operator==(const TrainingMeta&) const = default;
};

struct SummarizerModel {
  std::uint32_t schema_version = kMetricSchemaVersion;
  Criterion criterion;
  TrainingMeta meta;

  bool operator==(const SummarizerModel& o) const {
    return schema_version == o.schema_version && criterion.mask == o.criterion.mask &&
           criterion.weights == o.criterion.weights && meta == o.meta;
  }
};

struct RunResult {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double fitness = 0.0;
  std::size_t iterations = 0;
  Criterion criterion;
  std::vector<pso::IterationStats> trace;
};

struct CurvePoint {
  std::size_t k = 0;
  std::size_t added_column = 0;
  double accuracy = 0.0;
  double mean_mcc = 0.0;
};

struct RunReport {
  std::vector<RunResult> runs;
  std::array<double, kMetricCount> participation{};  // fraction of runs selecting each metric
  std::array<double, kMetricCount> weight_mean{};
  std::array<double, kMetricCount> weight_std{};     // population standard deviation
  std::vector<std::size_t> ranking;                  // columns by decreasing mean weight
  std::vector<CurvePoint> curve;                     // accuracy using the top-k ranked metrics
};

struct DocEvaluation {
  std::string doc_id;
  std::size_t sentences = 0;
  ConfusionMatrix confusion;
  double mcc = 0.0;
  double agreement = 0.0;  // TP / |labels|
};

struct EvaluationResult {
  double accuracy = 0.0;
  double mean_mcc = 0.0;
  std::vector<DocEvaluation> per_doc;
};

struct SummarySentence {
  std::size_t index = 0;
  std::string text;
  double score = 0.0;
  std::size_t rank = 0;  // 1 = highest score
};

// Feature matrices for every document, read from / written to cache_dir when given.
std::vector<FeatureMatrix> feature_matrices(const Corpus& corpus, const PreprocessConfig& preprocess,
                                            const MetricConfig& metrics,
                                            const std::optional<std::filesystem::path>& cache_dir);

struct TrainingOutput {
  SummarizerModel model;
  RunReport report;
};

TrainingOutput train(const Corpus& corpus, const std::vector<FeatureMatrix>& matrices, const TrainingOptions& options);

RunResult train_single_run(const TrainingSet& set, const TrainingOptions& options, std::size_t run);

std::vector<double> score_sentences(const Criterion& criterion, const FeatureMatrix& matrix);

// Selected sentences in document order.
std::vector<SummarySentence> summarize(const Document& doc, const FeatureMatrix& matrix, const SummarizerModel& model,
                                       double ratio);
std::vector<SummarySentence> summarize(const Document& doc, const SummarizerModel& model, double ratio,
                                       const MetricConfig& metrics = {});

EvaluationResult evaluate_criterion(const Criterion& criterion, const Corpus& corpus,
                                    const std::vector<FeatureMatrix>& matrices, double ratio);
EvaluationResult evaluate(const SummarizerModel& model, const Corpus& corpus,
                          const std::vector<FeatureMatrix>& matrices, double ratio);

// Columns ordered by decreasing coefficient (canonical order on ties).
std::vector<std::size_t> rank_metrics(const std::array<double, kMetricCount>& coefficients);

std::vector<CurvePoint> accuracy_curve(const std::array<double, kMetricCount>& coefficients, const Corpus& corpus,
                                       const std::vector<FeatureMatrix>& matrices, double ratio);

std::string model_to_json(const SummarizerModel& model);
SummarizerModel model_from_json(const std::string& text);
void save_model(const SummarizerModel& model, const std::filesystem::path& path);
SummarizerModel load_model(const std::filesystem::path& path);

std::string report_metrics_csv(const RunReport& report);
std::string report_runs_csv(const RunReport& report);
std::string curve_csv(const std::vector<CurvePoint>& curve);
std::string trace_csv(const RunReport& report);
std::string features_csv(const FeatureMatrix& matrix, bool raw);

// temp file + rename
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace psum
