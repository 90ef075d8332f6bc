// Runs the nine acceptance criteria and prints one PASS/FAIL line each.
// Usage: psum_acceptance <path-to-psum-cli> [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <unistd.h>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "fitness.hpp"
#include "metric_cache.hpp"
#include "metrics.hpp"
#include "pso.hpp"
#include "rng.hpp"
#include "summarizer.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace psum;
using psum::testing::SyntheticOptions;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("psum_acceptance_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Corpus labeled_corpus(const SyntheticOptions& options, const std::array<double, kMetricCount>& weights) {
  auto corpus = build_corpus(psum::testing::synthetic_documents(options), PreprocessConfig::defaults());
  attach_labels(corpus, psum::testing::planted_labels(corpus, weights, 0.10));
  return corpus;
}

Outcome planted_recovery() {
  const auto start = std::chrono::steady_clock::now();
  const auto planted = psum::testing::weights_of({{"tf", 0.4}, {"d_cov_j", 0.3}, {"len_ch", 0.2}, {"title_j", 0.1}});
  SyntheticOptions options;
  options.docs = 80;
  options.seed = 2024;
  const auto all = labeled_corpus(options, planted);
  Corpus train_set, test_set;
  for (std::size_t d = 0; d < all.size(); ++d) (d < 60 ? train_set : test_set).documents.push_back(all.documents[d]);

  TrainingOptions t;
  t.swarm.pop_size = 10;
  t.swarm.max_ite = 100;
  t.runs = 5;
  t.seed = 7;
  const auto cfg = PreprocessConfig::defaults();
  const auto out = train(train_set, feature_matrices(train_set, cfg, {}, std::nullopt), t);
  const auto eval = evaluate(out.model, test_set, feature_matrices(test_set, cfg, {}, std::nullopt), 0.10);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::set<MetricType> planted_types, chosen_types;
  for (std::size_t c = 0; c < kMetricCount; ++c) {
    if (planted[c] > 0) planted_types.insert(metric_type(c));
    if (out.model.criterion.mask & (MetricMask{1} << c)) chosen_types.insert(metric_type(c));
  }
  std::size_t shared = 0;
  for (auto type : planted_types) shared += chosen_types.count(type);

  std::string chosen;
  for (std::size_t c = 0; c < kMetricCount; ++c)
    if (out.model.criterion.mask & (MetricMask{1} << c)) chosen += std::string(chosen.empty() ? "" : "+") + std::string(metric_name(c));

  const bool pass = eval.mean_mcc >= 0.70 && eval.accuracy >= 0.90 && shared >= 3 && seconds <= 300.0;
  return {pass, "held-out mcc " + fmt("%.4f", eval.mean_mcc) + ", accuracy " + fmt("%.4f", eval.accuracy) +
                    ", planted groups " + std::to_string(shared) + "/4 (" + chosen + "), train fitness " +
                    fmt("%.4f", out.model.meta.final_fitness) + ", " + fmt("%.1f", seconds) + " s"};
}

Outcome single_metric_oracle() {
  SyntheticOptions options;
  options.docs = 40;
  options.seed = 99;
  const auto corpus = labeled_corpus(options, psum::testing::weights_of({{"len_ch", 1.0}}));
  const auto matrices = feature_matrices(corpus, PreprocessConfig::defaults(), {}, std::nullopt);
  const auto set = TrainingSet::build(corpus, matrices);
  TrainingOptions t;
  t.swarm.max_ite = 100;
  t.seed = 11;
  std::size_t perfect = 0;
  std::string fits;
  for (std::size_t r = 0; r < 5; ++r) {
    const auto run = train_single_run(set, t, r);
    if (std::abs(run.fitness - 1.0) <= 1e-9) ++perfect;
    fits += (r ? " " : "") + fmt("%.6f", run.fitness) + "@" + std::to_string(run.iterations);
  }
  return {perfect >= 4, std::to_string(perfect) + "/5 runs reached 1.0 (fitness@iterations: " + fits + ")"};
}

Outcome mcc_equivalence() {
  Rng rng(3);
  std::size_t zero_denominator = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t S = 5 + rng.next_u64() % 46;
    std::vector<bool> label(S), pred(S);
    std::set<std::size_t> labels;
    std::vector<std::size_t> predicted;
    const double pl = rng.uniform01(), pp = rng.uniform01();
    for (std::size_t i = 0; i < S; ++i) {
      label[i] = rng.uniform01() < pl;
      pred[i] = rng.uniform01() < pp;
      if (label[i]) labels.insert(i);
      if (pred[i]) predicted.push_back(i);
    }
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < S; ++i) {
      if (pred[i] && label[i]) ++tp;
      else if (pred[i]) ++fp;
      else if (label[i]) ++fn;
      else ++tn;
    }
    const long long denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    const double expected = denom == 0 ? 0.0 : static_cast<double>(tp * tn - fp * fn) / std::sqrt(static_cast<double>(denom));
    if (denom == 0) ++zero_denominator;
    const auto m = confusion(predicted, labels, S);
    if (m.tp != static_cast<std::size_t>(tp) || m.fp != static_cast<std::size_t>(fp) ||
        m.fn != static_cast<std::size_t>(fn) || m.tn != static_cast<std::size_t>(tn))
      return {false, "confusion counts differ at trial " + std::to_string(trial)};
    if (mcc(m) != expected) return {false, "mcc differs at trial " + std::to_string(trial)};
  }
  const ConfusionMatrix all_predicted{5, 5, 0, 0};
  const ConfusionMatrix none_predicted{0, 0, 4, 6};
  if (mcc(all_predicted) == 0.0 && mcc(none_predicted) == 0.0 && mcc({0, 0, 0, 10}) == 0.0 &&
      mcc({0, 3, 2, 0}) == -1.0)
    return {true, "1000 instances exact, " + std::to_string(zero_denominator) + " random zero-denominator cases"};
  return {false, "zero-denominator case not 0"};
}

Outcome combination_enumeration() {
  for (MetricMask bin = 0; bin < (MetricMask{1} << kMetricCount); ++bin) {
    std::size_t expected = 1;
    bool any = false;
    for (const auto& g : metric_groups()) {
      std::size_t count = 0;
      for (auto c : g.member_columns) count += (bin >> c) & 1u;
      if (count) {
        expected *= count;
        any = true;
      }
    }
    if (!any) expected = 0;
    const auto combos = enumerate_combinations(bin);
    const std::size_t got = combos.size();
    if (got != expected) return {false, "mask " + std::to_string(bin) + ": " + std::to_string(got) + " != " + std::to_string(expected)};
    if (combination_count(bin) != expected) return {false, "combination_count disagrees at " + std::to_string(bin)};
    std::set<MetricMask> distinct;
    for (auto m : combos) {
      if ((m & ~bin) != 0) return {false, "combination outside BinInd at " + std::to_string(bin)};
      for (const auto& g : metric_groups()) {
        std::size_t in_bin = 0, in_combo = 0;
        for (auto c : g.member_columns) {
          in_bin += (bin >> c) & 1u;
          in_combo += (m >> c) & 1u;
        }
        if (in_combo != (in_bin ? 1u : 0u)) return {false, "group rule broken at " + std::to_string(bin)};
      }
      distinct.insert(m);
    }
    if (distinct.size() != combos.size()) return {false, "duplicate combinations at " + std::to_string(bin)};
  }
  const auto all = enumerate_combinations((MetricMask{1} << kMetricCount) - 1);
  return {all.size() == 324, "65536 patterns checked, all-16 gives " + std::to_string(all.size())};
}

Outcome pso_invariants() {
  SyntheticOptions options;
  options.docs = 10;
  options.seed = 5;
  const auto corpus = labeled_corpus(options, psum::testing::weights_of({{"tf", 0.5}, {"pos_f", 0.5}}));
  const auto matrices = feature_matrices(corpus, PreprocessConfig::defaults(), {}, std::nullopt);
  const auto set = TrainingSet::build(corpus, matrices);

  auto config = pso::SwarmConfig::defaults(kMetricCount);
  config.pop_size = 10;
  config.max_ite = 50;
  config.stall_fraction = 0.0;
  config.seed = 17;
  std::size_t checked = 0;
  std::string violation;
  auto bounds = [&](const pso::Particle& p) {
    for (std::size_t j = 0; j < kMetricCount; ++j) {
      if (std::abs(p.v1[j]) > 0.5 || std::abs(p.v2[j]) > 3.0 || std::abs(p.v3[j]) > 0.25 || std::abs(p.real[j]) > 3.0)
        if (violation.empty()) violation = "bound violated at evaluation " + std::to_string(checked);
    }
    ++checked;
  };
  auto evaluator = [&](const pso::Particle& p) {
    bounds(p);
    const auto f = evaluate_particle(p, set, 0.10, config.limit4);
    return pso::Evaluation{f.fitness, bits_from_mask(f.fit_mask)};
  };
  const auto result = pso::run_swarm(config, evaluator, apply_velocity_penalty);
  if (!violation.empty()) return {false, violation};
  if (result.iterations != 50) return {false, "ran " + std::to_string(result.iterations) + " iterations"};
  for (std::size_t i = 1; i < result.trace.size(); ++i)
    if (result.trace[i].best_fit < result.trace[i - 1].best_fit) return {false, "global best decreased at " + std::to_string(i)};
  const bool endpoints = pso::inertia(0, 50, 0.2, 1.0) == 0.2 && pso::inertia(49, 50, 0.2, 1.0) == 1.0 &&
                         pso::inertia(0, 50, 1.0, 0.4) == 1.0 && pso::inertia(49, 50, 1.0, 0.4) == 0.4 &&
                         result.trace.front().w_bin == 0.2 && result.trace.back().w_bin == 1.0 &&
                         result.trace.front().w_real == 1.0 && result.trace.back().w_real == 0.4;
  if (!endpoints) return {false, "inertia endpoints not exact"};
  return {true, std::to_string(checked) + " particle states within bounds, best non-decreasing over 50 iterations"};
}

Outcome normalization() {
  Rng rng(21);
  const auto limit4 = pso::SwarmConfig::uniform_limits(kMetricCount, {0.0, 6.0});
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> real(kMetricCount);
    for (auto& r : real) r = rng.uniform(-3.0, 3.0);
    if (trial % 50 == 0) real.assign(kMetricCount, -3.0);
    const auto mask = static_cast<MetricMask>(rng.next_u64() & 0xFFFF);
    const auto w = normalize_coefficients(real, mask, limit4);
    double sum = 0.0;
    for (std::size_t j = 0; j < kMetricCount; ++j) {
      if (w[j] < 0.0) return {false, "negative weight"};
      if (!(mask & (MetricMask{1} << j)) && w[j] != 0.0) return {false, "weight outside mask"};
      sum += w[j];
    }
    if (mask != 0) worst = std::max(worst, std::abs(sum - 1.0));
    if (mask == 0 && sum != 0.0) return {false, "empty mask gave weights"};

    const std::size_t S = 5 + rng.next_u64() % 46;
    std::vector<double> features(S * kMetricCount);
    for (auto& f : features) f = rng.uniform01();
    const double factor = rng.uniform(0.01, 100.0);
    std::array<double, kMetricCount> scaled_w{};
    for (std::size_t j = 0; j < kMetricCount; ++j) scaled_w[j] = factor * w[j];
    std::vector<double> a(S), b(S);
    for (std::size_t i = 0; i < S; ++i) {
      const std::span<const double> row(features.data() + i * kMetricCount, kMetricCount);
      a[i] = sentence_score(w, row);
      b[i] = sentence_score(scaled_w, row);
    }
    if (select_summary(a, 0.1) != select_summary(b, 0.1)) return {false, "summary changed under scaling at " + std::to_string(trial)};
  }
  if (worst > 1e-9) return {false, "sum deviates by " + fmt("%.3g", worst)};
  return {true, "10000 cases, max |sum-1| " + fmt("%.3g", worst) + ", summaries scale-invariant"};
}

Outcome metrics_properties() {
  SyntheticOptions options;
  options.docs = 30;
  options.seed = 8;
  options.min_sentences = 1;
  const auto corpus = build_corpus(psum::testing::synthetic_documents(options), PreprocessConfig::defaults());
  double worst_freq = 0.0;
  for (const auto& doc : corpus.documents) {
    const auto m = compute_feature_matrix(doc);
    for (std::size_t c = 0; c < kMetricCount; ++c) {
      double lo = 1e300, hi = -1e300, rlo = 1e300, rhi = -1e300;
      for (std::size_t i = 0; i < m.rows; ++i) {
        lo = std::min(lo, m.at(i, c));
        hi = std::max(hi, m.at(i, c));
        rlo = std::min(rlo, m.raw_row(i)[c]);
        rhi = std::max(rhi, m.raw_row(i)[c]);
      }
      if (lo < 0.0 || hi > 1.0) return {false, "scaled value outside [0,1] in " + doc.id};
      if (rlo != rhi && (lo != 0.0 || hi != 1.0)) return {false, "nonconstant column not spanning [0,1] in " + doc.id};
      if (rlo == rhi && hi != 0.0) return {false, "constant column not 0 in " + doc.id};
    }
    // brute-force recount straight from the token lists
    std::size_t total_words = 0;
    for (const auto& s : doc.sentences) total_words += s.words.size();
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto& s = doc.sentences[i];
      double tf_sum = 0.0, tf_isf = 0.0;
      for (const auto& term : s.terms) {
        std::size_t count = 0, sentences_with = 0;
        for (const auto& other : doc.sentences) {
          std::size_t here = 0;
          for (const auto& t : other.terms) here += t == term;
          count += here;
          sentences_with += here > 0;
        }
        const double tf = static_cast<double>(count) / static_cast<double>(total_words);
        const double isf = std::max(0.0, 1.0 - std::log(static_cast<double>(doc.size()) / static_cast<double>(sentences_with)));
        tf_sum += tf;
        tf_isf += tf * isf;
      }
      const double tf = s.terms.empty() ? 0.0 : tf_sum / static_cast<double>(s.terms.size());
      const auto f = frequency_metrics(s, doc);
      worst_freq = std::max({worst_freq, std::abs(f.tf - tf), std::abs(f.tf_isf - tf_isf)});
      if (m.raw_row(i)[static_cast<std::size_t>(Metric::Tf)] != f.tf) return {false, "matrix tf differs from frequency_metrics"};
    }
  }
  if (worst_freq > 1e-12) return {false, "frequency recount differs by " + fmt("%.3g", worst_freq)};

  Rng rng(13);
  const auto vocab = psum::testing::synthetic_vocabulary(12, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> a, b;
    const std::size_t na = rng.next_u64() % 10, nb = rng.next_u64() % 10;
    for (std::size_t k = 0; k < na; ++k) a.push_back(vocab[rng.next_u64() % vocab.size()]);
    for (std::size_t k = 0; k < nb; ++k) b.push_back(vocab[rng.next_u64() % vocab.size()]);
    const auto ab = similarity_metrics(count_terms(a), count_terms(b));
    const auto ba = similarity_metrics(count_terms(b), count_terms(a));
    if (ab.overlap != ba.overlap || ab.jaccard != ba.jaccard || ab.cosine != ba.cosine)
      return {false, "similarity asymmetric at pair " + std::to_string(trial)};
  }
  return {true, "scaling contract on 30 docs, frequency max error " + fmt("%.3g", worst_freq) + ", 1000 symmetric pairs"};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "CLI path not given"};
  const auto dir = scratch_dir("determinism");
  SyntheticOptions options;
  options.docs = 20;
  options.seed = 31;
  const auto raw = psum::testing::synthetic_documents(options);
  auto corpus = build_corpus(raw, PreprocessConfig::defaults());
  psum::testing::write_text((dir / "c.jsonl").string(), psum::testing::to_jsonl(raw));
  psum::testing::write_text(
      (dir / "l.json").string(),
      psum::testing::to_labels_json(psum::testing::planted_labels(
          corpus, psum::testing::weights_of({{"tf_isf", 0.6}, {"pos_f", 0.4}}), 0.10)));

  std::vector<std::string> names;
  for (const char* out : {"a", "b"}) {
    const std::string cmd = "\"" + cli + "\" -q train --corpus \"" + (dir / "c.jsonl").string() + "\" --labels \"" +
                            (dir / "l.json").string() + "\" --out \"" + (dir / (std::string(out) + ".json")).string() +
                            "\" --seed 7 --jobs 2 > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "CLI train failed: " + cmd};
  }
  std::size_t compared = 0;
  for (const char* suffix : {".json", ".metrics.csv", ".runs.csv", ".curve.csv", ".trace.csv"}) {
    const auto a = slurp(dir / (std::string("a") + suffix));
    const auto b = slurp(dir / (std::string("b") + suffix));
    if (a.empty() || a != b) return {false, std::string("outputs differ or are empty: ") + suffix};
    ++compared;
  }
  fs::remove_all(dir);
  return {true, std::to_string(compared) + " output files byte-identical across two runs with --seed 7"};
}

Outcome cache() {
  const auto dir = scratch_dir("cache");
  SyntheticOptions options;
  options.docs = 12;
  options.seed = 41;
  const auto config = PreprocessConfig::defaults();
  auto corpus = build_corpus(psum::testing::synthetic_documents(options), config);
  attach_labels(corpus, psum::testing::planted_labels(corpus, psum::testing::weights_of({{"len_w", 0.7}, {"title_o", 0.3}}), 0.1));

  const auto& doc = corpus.documents.front();
  const auto fresh = compute_feature_matrix(doc);
  const auto fp = cache_fingerprint(doc, config, {});
  cache_store(dir, fresh, fp);
  const auto loaded = cache_load(dir, doc.id, fp);
  if (!loaded || !(*loaded == fresh) ||
      std::memcmp(loaded->scaled.data(), fresh.scaled.data(), fresh.scaled.size() * sizeof(double)) != 0 ||
      std::memcmp(loaded->raw.data(), fresh.raw.data(), fresh.raw.size() * sizeof(double)) != 0)
    return {false, "round-trip not bit-exact"};

  auto other = config;
  other.stopwords.insert(doc.sentences.front().words.front());
  const auto stale_fp = cache_fingerprint(doc, other, {});
  if (stale_fp == fp || cache_load(dir, doc.id, stale_fp)) return {false, "stale fingerprint accepted"};
  // a stale entry must be recomputed and overwritten
  FeatureMatrix poisoned = fresh;
  for (auto& v : poisoned.scaled) v = 0.5;
  cache_store(dir, poisoned, stale_fp);
  Corpus single;
  single.documents.push_back(doc);
  const auto recomputed = feature_matrices(single, config, {}, dir);
  if (!(recomputed.front() == fresh)) return {false, "stale entry was used instead of recomputing"};
  if (!cache_load(dir, doc.id, fp)) return {false, "recomputed entry not written back"};

  TrainingOptions t;
  t.runs = 3;
  t.seed = 5;
  t.swarm.max_ite = 40;
  const auto uncached = train(corpus, feature_matrices(corpus, config, {}, std::nullopt), t);
  const auto first = train(corpus, feature_matrices(corpus, config, {}, dir), t);
  const auto second = train(corpus, feature_matrices(corpus, config, {}, dir), t);
  if (!(uncached.model == first.model) || !(first.model == second.model) ||
      model_to_json(uncached.model) != model_to_json(second.model))
    return {false, "cached and uncached training disagree"};
  fs::remove_all(dir);
  return {true, "bit-exact round-trip, stale entry recomputed, cached and uncached models identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"planted-criterion recovery", planted_recovery},
      {"single-metric oracle (len_ch)", single_metric_oracle},
      {"MCC equivalence", mcc_equivalence},
      {"combination enumeration", combination_enumeration},
      {"PSO invariants", pso_invariants},
      {"coefficient normalization", normalization},
      {"metric properties", metrics_properties},
      {"CLI determinism", [&] { return determinism(cli); }},
      {"metric cache", cache},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int number = static_cast<int>(k + 1);
    if (!only.empty() && !only.count(number)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", number, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
