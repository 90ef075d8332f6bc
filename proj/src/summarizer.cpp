#include "summarizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "error.hpp"
#include "log.hpp"
#include "metric_cache.hpp"

namespace psum {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kModelFormat = "psum-model";

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoull(s, &used, 16);
  if (used != s.size()) throw std::invalid_argument("bad hex");
  return v;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string mask_names(MetricMask mask) {
  std::string out;
  for (std::size_t j = 0; j < kMetricCount; ++j) {
    if (!(mask & (MetricMask{1} << j))) continue;
    if (!out.empty()) out += '+';
    out += metric_name(j);
  }
  return out;
}

}  // namespace

std::vector<FeatureMatrix> feature_matrices(const Corpus& corpus, const PreprocessConfig& preprocess,
                                            const MetricConfig& metrics,
                                            const std::optional<std::filesystem::path>& cache_dir) {
  std::vector<FeatureMatrix> out;
  out.reserve(corpus.size());
  std::size_t hits = 0;
  for (const auto& doc : corpus.documents) {
    if (cache_dir) {
      const auto fingerprint = cache_fingerprint(doc, preprocess, metrics);
      if (auto cached = cache_load(*cache_dir, doc.id, fingerprint); cached && cached->rows == doc.size()) {
        out.push_back(std::move(*cached));
        ++hits;
        continue;
      }
      out.push_back(compute_feature_matrix(doc, metrics));
      cache_store(*cache_dir, out.back(), fingerprint);
    } else {
      out.push_back(compute_feature_matrix(doc, metrics));
    }
  }
  if (cache_dir) log::info("metric cache: " + std::to_string(hits) + "/" + std::to_string(corpus.size()) + " hits");
  return out;
}

RunResult train_single_run(const TrainingSet& set, const TrainingOptions& options, std::size_t run) {
  pso::SwarmConfig config = options.swarm;
  config.seed = options.seed + run;
  const double ratio = options.ratio;

  auto evaluator = [&](const pso::Particle& p) {
    const auto f = evaluate_particle(p, set, ratio, config.limit4);
    return pso::Evaluation{f.fitness, bits_from_mask(f.fit_mask, config.dimensions)};
  };
  const auto result = pso::run_swarm(config, evaluator, apply_velocity_penalty);

  RunResult r;
  r.run = run;
  r.seed = config.seed;
  r.fitness = result.best.fitness;
  r.iterations = result.iterations;
  r.criterion.mask = mask_from_bits(result.best.fit_mask);
  r.criterion.weights = normalize_coefficients(result.best.real, r.criterion.mask, config.limit4);
  r.trace = result.trace;
  return r;
}

TrainingOutput train(const Corpus& corpus, const std::vector<FeatureMatrix>& matrices, const TrainingOptions& options) {
  if (options.swarm.dimensions != kMetricCount)
    fail(ErrorKind::InvalidArgument, "swarm dimensionality must equal the metric count (16)");
  options.swarm.validate();
  if (options.runs == 0) fail(ErrorKind::InvalidArgument, "runs must be at least 1");
  summary_size(1, options.ratio);  // validates the ratio
  if (corpus.labeled_count() == 0) fail(ErrorKind::Validation, "corpus has no labeled documents");

  const TrainingSet set = TrainingSet::build(corpus, matrices);
  if (std::all_of(set.docs.begin(), set.docs.end(), [](const auto& d) { return d.rows == 1; }))
    log::warn("every labeled document has a single sentence; training is degenerate");

  std::vector<RunResult> runs(options.runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < options.runs; r = next++) {
      try {
        runs[r] = train_single_run(set, options, r);
        log::info("run " + std::to_string(r) + ": fitness " + num(runs[r].fitness) + " after " +
                  std::to_string(runs[r].iterations) + " iterations, metrics " + mask_names(runs[r].criterion.mask));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.jobs, 1, options.runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  TrainingOutput out;
  RunReport& report = out.report;
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].fitness > runs[best].fitness) best = r;

  const double n = static_cast<double>(runs.size());
  for (const auto& r : runs) {
    for (std::size_t j = 0; j < kMetricCount; ++j) {
      if (r.criterion.mask & (MetricMask{1} << j)) report.participation[j] += 1.0 / n;
      report.weight_mean[j] += r.criterion.weights[j] / n;
    }
  }
  for (const auto& r : runs) {
    for (std::size_t j = 0; j < kMetricCount; ++j) {
      const double d = r.criterion.weights[j] - report.weight_mean[j];
      report.weight_std[j] += d * d / n;
    }
  }
  for (auto& s : report.weight_std) s = std::sqrt(s);
  report.ranking = rank_metrics(report.weight_mean);
  report.curve = accuracy_curve(report.weight_mean, corpus, matrices, options.ratio);

  SummarizerModel& model = out.model;
  model.criterion = runs[best].criterion;
  model.meta.seed = options.seed;
  model.meta.runs = options.runs;
  model.meta.pop_size = options.swarm.pop_size;
  model.meta.max_ite = options.swarm.max_ite;
  model.meta.ratio = options.ratio;
  model.meta.corpus_fingerprint = corpus.fingerprint();
  model.meta.final_fitness = runs[best].fitness;
  model.meta.mean_weights = report.weight_mean;
  report.runs = std::move(runs);
  return out;
}

std::vector<double> score_sentences(const Criterion& criterion, const FeatureMatrix& matrix) {
  std::vector<double> scores(matrix.rows);
  for (std::size_t i = 0; i < matrix.rows; ++i) scores[i] = sentence_score(criterion.weights, matrix.row(i));
  return scores;
}

std::vector<SummarySentence> summarize(const Document& doc, const FeatureMatrix& matrix, const SummarizerModel& model,
                                       double ratio) {
  if (model.schema_version != kMetricSchemaVersion)
    fail(ErrorKind::Model, "model metric schema version " + std::to_string(model.schema_version) +
                               " does not match " + std::to_string(kMetricSchemaVersion) +
                               "; retrain the model or rebuild the metric cache");
  if (matrix.rows != doc.size()) fail(ErrorKind::Internal, "feature matrix does not match document '" + doc.id + "'");
  const auto scores = score_sentences(model.criterion, matrix);

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
  std::vector<std::size_t> rank(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;

  std::vector<SummarySentence> out;
  for (auto i : select_summary(scores, ratio)) out.push_back({i, doc.sentences[i].raw_text, scores[i], rank[i]});
  return out;
}

std::vector<SummarySentence> summarize(const Document& doc, const SummarizerModel& model, double ratio,
                                       const MetricConfig& metrics) {
  return summarize(doc, compute_feature_matrix(doc, metrics), model, ratio);
}

EvaluationResult evaluate_criterion(const Criterion& criterion, const Corpus& corpus,
                                    const std::vector<FeatureMatrix>& matrices, double ratio) {
  if (matrices.size() != corpus.size()) fail(ErrorKind::Internal, "feature matrix count does not match corpus");
  EvaluationResult result;
  std::size_t correct = 0, total = 0, label_total = 0;
  double weighted_mcc = 0.0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& doc = corpus.documents[d];
    if (!doc.labeled()) continue;
    const auto scores = score_sentences(criterion, matrices[d]);
    const auto picked = select_summary(scores, ratio);
    DocEvaluation e;
    e.doc_id = doc.id;
    e.sentences = doc.size();
    e.confusion = confusion(picked, *doc.labels, doc.size());
    e.mcc = mcc(e.confusion);
    e.agreement = doc.labels->empty() ? 0.0 : static_cast<double>(e.confusion.tp) / static_cast<double>(doc.labels->size());
    correct += e.confusion.tp + e.confusion.tn;
    total += doc.size();
    label_total += doc.labels->size();
    weighted_mcc += static_cast<double>(doc.labels->size()) * e.mcc;
    result.per_doc.push_back(std::move(e));
  }
  if (result.per_doc.empty()) fail(ErrorKind::Validation, "evaluation corpus has no labeled documents");
  result.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  result.mean_mcc = label_total > 0 ? weighted_mcc / static_cast<double>(label_total) : 0.0;
  return result;
}

EvaluationResult evaluate(const SummarizerModel& model, const Corpus& corpus,
                          const std::vector<FeatureMatrix>& matrices, double ratio) {
  return evaluate_criterion(model.criterion, corpus, matrices, ratio);
}

std::vector<std::size_t> rank_metrics(const std::array<double, kMetricCount>& coefficients) {
  std::vector<std::size_t> order(kMetricCount);
  for (std::size_t j = 0; j < kMetricCount; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return coefficients[a] > coefficients[b]; });
  return order;
}

std::vector<CurvePoint> accuracy_curve(const std::array<double, kMetricCount>& coefficients, const Corpus& corpus,
                                       const std::vector<FeatureMatrix>& matrices, double ratio) {
  const auto order = rank_metrics(coefficients);
  std::vector<CurvePoint> curve;
  MetricMask mask = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    mask |= MetricMask{1} << order[k];
    Criterion c{mask, normalize_scaled(coefficients, mask)};
    const auto e = evaluate_criterion(c, corpus, matrices, ratio);
    curve.push_back({k + 1, order[k], e.accuracy, e.mean_mcc});
  }
  return curve;
}

std::string model_to_json(const SummarizerModel& model) {
  ojson j;
  j["format"] = kModelFormat;
  j["schema_version"] = model.schema_version;
  j["metrics"] = ojson::array();
  for (auto name : metric_names()) j["metrics"].push_back(name);
  j["selected"] = ojson::array();
  for (std::size_t c = 0; c < kMetricCount; ++c)
    if (model.criterion.mask & (MetricMask{1} << c)) j["selected"].push_back(metric_name(c));
  j["weights"] = ojson::object();
  for (std::size_t c = 0; c < kMetricCount; ++c) j["weights"][std::string(metric_name(c))] = model.criterion.weights[c];

  ojson t;
  t["seed"] = model.meta.seed;
  t["runs"] = model.meta.runs;
  t["pop_size"] = model.meta.pop_size;
  t["max_ite"] = model.meta.max_ite;
  t["ratio"] = model.meta.ratio;
  t["corpus_fingerprint"] = hex64(model.meta.corpus_fingerprint);
  t["preprocess_fingerprint"] = hex64(model.meta.preprocess_fingerprint);
  t["final_fitness"] = model.meta.final_fitness;
  t["mean_weights"] = ojson::object();
  for (std::size_t c = 0; c < kMetricCount; ++c) t["mean_weights"][std::string(metric_name(c))] = model.meta.mean_weights[c];
  j["training"] = std::move(t);
  return j.dump(2) + "\n";
}

SummarizerModel model_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    fail(ErrorKind::Model, std::string("malformed model file: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string()) != kModelFormat)
      fail(ErrorKind::Model, "not a psum model file (missing \"format\": \"psum-model\")");
    const auto version = j.at("schema_version").get<std::uint32_t>();
    if (version != kMetricSchemaVersion)
      fail(ErrorKind::Model, "model schema version " + std::to_string(version) + " does not match supported version " +
                                 std::to_string(kMetricSchemaVersion));
    const auto& metrics = j.at("metrics");
    if (!metrics.is_array() || metrics.size() != kMetricCount)
      fail(ErrorKind::Model, "model has " + std::to_string(metrics.is_array() ? metrics.size() : 0) +
                                 " metric columns, schema version " + std::to_string(kMetricSchemaVersion) +
                                 " expects " + std::to_string(kMetricCount));
    for (std::size_t c = 0; c < kMetricCount; ++c)
      if (metrics[c].get<std::string>() != metric_name(c))
        fail(ErrorKind::Model, "model metric column " + std::to_string(c) + " is '" + metrics[c].get<std::string>() +
                                   "', expected '" + std::string(metric_name(c)) + "'");

    SummarizerModel model;
    model.schema_version = version;
    for (const auto& name : j.at("selected")) {
      const auto c = metric_index(name.get<std::string>());
      if (c == kMetricCount) fail(ErrorKind::Model, "unknown selected metric '" + name.get<std::string>() + "'");
      model.criterion.mask |= MetricMask{1} << c;
    }
    const auto& weights = j.at("weights");
    for (std::size_t c = 0; c < kMetricCount; ++c) model.criterion.weights[c] = weights.at(std::string(metric_name(c))).get<double>();
    double sum = 0.0;
    for (std::size_t c = 0; c < kMetricCount; ++c) {
      const double w = model.criterion.weights[c];
      const bool selected = model.criterion.mask & (MetricMask{1} << c);
      if (!std::isfinite(w) || w < 0.0 || (!selected && w != 0.0))
        fail(ErrorKind::Model, "invalid weight for metric '" + std::string(metric_name(c)) + "'");
      sum += w;
    }
    if (model.criterion.mask != 0 && std::abs(sum - 1.0) > 1e-9)
      fail(ErrorKind::Model, "selected metric weights sum to " + num(sum) + ", expected 1");

    const auto& t = j.at("training");
    model.meta.seed = t.at("seed").get<std::uint64_t>();
    model.meta.runs = t.at("runs").get<std::size_t>();
    model.meta.pop_size = t.at("pop_size").get<std::size_t>();
    model.meta.max_ite = t.at("max_ite").get<std::size_t>();
    model.meta.ratio = t.at("ratio").get<double>();
    model.meta.corpus_fingerprint = parse_hex64(t.at("corpus_fingerprint").get<std::string>());
    model.meta.preprocess_fingerprint = parse_hex64(t.at("preprocess_fingerprint").get<std::string>());
    model.meta.final_fitness = t.at("final_fitness").get<double>();
    for (std::size_t c = 0; c < kMetricCount; ++c)
      model.meta.mean_weights[c] = t.at("mean_weights").at(std::string(metric_name(c))).get<double>();
    return model;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorKind::Model, std::string("invalid model file: ") + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto temp = path;
  temp += ".tmp";
  {
    std::ofstream f(temp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Io, "cannot write '" + temp.string() + "'");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) fail(ErrorKind::Io, "short write to '" + temp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) fail(ErrorKind::Io, "cannot move '" + temp.string() + "' to '" + path.string() + "': " + ec.message());
}

void save_model(const SummarizerModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model));
}

SummarizerModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Model, "cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

std::string report_metrics_csv(const RunReport& report) {
  std::ostringstream out;
  out << "rank,metric,type,participation,mean_weight,std_weight\n";
  for (std::size_t r = 0; r < report.ranking.size(); ++r) {
    const auto c = report.ranking[r];
    out << r + 1 << ',' << metric_name(c) << ',' << metric_type_name(metric_type(c)) << ','
        << num(report.participation[c]) << ',' << num(report.weight_mean[c]) << ',' << num(report.weight_std[c])
        << '\n';
  }
  return out.str();
}

std::string report_runs_csv(const RunReport& report) {
  std::ostringstream out;
  out << "run,seed,fitness,iterations,metrics\n";
  for (const auto& r : report.runs)
    out << r.run << ',' << r.seed << ',' << num(r.fitness) << ',' << r.iterations << ','
        << mask_names(r.criterion.mask) << '\n';
  return out.str();
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "k,metric,accuracy,mean_mcc\n";
  for (const auto& p : curve)
    out << p.k << ',' << metric_name(p.added_column) << ',' << num(p.accuracy) << ',' << num(p.mean_mcc) << '\n';
  return out.str();
}

std::string trace_csv(const RunReport& report) {
  std::ostringstream out;
  out << "run,ite,best_fit,mean_fit,wBin,wReal\n";
  for (const auto& r : report.runs)
    for (const auto& s : r.trace)
      out << r.run << ',' << s.ite << ',' << num(s.best_fit) << ',' << num(s.mean_fit) << ',' << num(s.w_bin) << ','
          << num(s.w_real) << '\n';
  return out.str();
}

std::string features_csv(const FeatureMatrix& matrix, bool raw) {
  std::ostringstream out;
  out << "sentence";
  for (auto name : metric_names()) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    out << i;
    for (double v : raw ? matrix.raw_row(i) : matrix.row(i)) out << ',' << num(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace psum
