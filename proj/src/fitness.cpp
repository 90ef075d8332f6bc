#include "fitness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "error.hpp"

namespace psum {
namespace {

// Top-t indices under (score desc, index asc); returns them in ascending index order.
std::vector<std::size_t> top_indices(std::span<const double> scores, std::size_t t, std::vector<std::size_t>& scratch) {
  const std::size_t n = scores.size();
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = i;
  t = std::min(t, n);
  auto better = [&](std::size_t a, std::size_t b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); };
  if (t < n) std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(t), scratch.end(), better);
  std::vector<std::size_t> out(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(t));
  std::sort(out.begin(), out.end());
  return out;
}

struct CandidateScorer {
  const TrainingSet& set;
  double ratio;
  std::vector<double> scores;
  std::vector<std::size_t> scratch;

  double fitness(const Criterion& c) {
    std::vector<std::size_t> columns;
    for (std::size_t j = 0; j < kMetricCount; ++j)
      if (c.mask & (MetricMask{1} << j)) columns.push_back(j);

    double weighted = 0.0;
    for (const auto& doc : set.docs) {
      if (doc.labels.empty()) continue;
      scores.assign(doc.rows, 0.0);
      for (std::size_t r = 0; r < doc.rows; ++r) {
        const double* row = doc.features.data() + r * kMetricCount;
        double s = 0.0;
        for (auto j : columns) s += c.weights[j] * row[j];
        scores[r] = s;
      }
      const auto picked = top_indices(scores, summary_size(doc.rows, ratio), scratch);
      ConfusionMatrix m;
      for (auto i : picked) (doc.positive[i] ? m.tp : m.fp) += 1;
      m.fn = doc.labels.size() - m.tp;
      m.tn = doc.rows - m.tp - m.fp - m.fn;
      weighted += static_cast<double>(doc.labels.size()) * mcc(m);
    }
    return weighted / static_cast<double>(set.total_labels);
  }
};

}  // namespace

MetricMask mask_from_bits(std::span<const std::uint8_t> bits) {
  MetricMask m = 0;
  for (std::size_t j = 0; j < bits.size() && j < 32; ++j)
    if (bits[j]) m |= MetricMask{1} << j;
  return m;
}

pso::BitVector bits_from_mask(MetricMask mask, std::size_t n) {
  pso::BitVector bits(n, 0);
  for (std::size_t j = 0; j < n && j < 32; ++j) bits[j] = (mask >> j) & 1U;
  return bits;
}

std::size_t mask_size(MetricMask mask) { return static_cast<std::size_t>(std::popcount(mask)); }

std::array<double, kMetricCount> normalize_scaled(std::span<const double> scaled, MetricMask mask) {
  std::array<double, kMetricCount> w{};
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < kMetricCount; ++j) {
    if (!(mask & (MetricMask{1} << j))) continue;
    total += scaled[j];
    ++count;
  }
  if (count == 0) return w;
  for (std::size_t j = 0; j < kMetricCount; ++j) {
    if (!(mask & (MetricMask{1} << j))) continue;
    w[j] = total > 0.0 ? scaled[j] / total : 1.0 / static_cast<double>(count);
  }
  return w;
}

std::array<double, kMetricCount> normalize_coefficients(std::span<const double> real_ind, MetricMask mask,
                                                        std::span<const pso::Range> limit4) {
  std::array<double, kMetricCount> scaled{};
  for (std::size_t j = 0; j < kMetricCount; ++j) {
    if (!(mask & (MetricMask{1} << j))) continue;
    const double r = limit4[j].radius();
    scaled[j] = r > 0.0 ? std::clamp((real_ind[j] + r) / (2.0 * r), 0.0, 1.0) : 1.0;
  }
  return normalize_scaled(scaled, mask);
}

double sentence_score(std::span<const double> weights, std::span<const double> features) {
  double s = 0.0;
  for (std::size_t j = 0; j < weights.size() && j < features.size(); ++j) s += weights[j] * features[j];
  return s;
}

std::size_t summary_size(std::size_t sentence_count, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) fail(ErrorKind::InvalidArgument, "summary ratio must lie in (0, 1]");
  const auto t = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(sentence_count)));
  return std::min(sentence_count, std::max<std::size_t>(1, t));
}

std::vector<std::size_t> select_summary(std::span<const double> scores, double ratio) {
  std::vector<std::size_t> scratch;
  return top_indices(scores, summary_size(scores.size(), ratio), scratch);
}

double mcc(const ConfusionMatrix& m) {
  const auto tp = static_cast<double>(m.tp), fp = static_cast<double>(m.fp);
  const auto fn = static_cast<double>(m.fn), tn = static_cast<double>(m.tn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

ConfusionMatrix confusion(std::span<const std::size_t> predicted, const std::set<std::size_t>& labels,
                          std::size_t sentence_count) {
  ConfusionMatrix m;
  for (auto i : predicted) (labels.count(i) ? m.tp : m.fp) += 1;
  m.fn = labels.size() - m.tp;
  m.tn = sentence_count - m.tp - m.fp - m.fn;
  return m;
}

std::vector<MetricMask> enumerate_combinations(MetricMask bin_ind) {
  std::vector<MetricMask> combos{0};
  for (const auto& group : metric_groups()) {
    std::vector<MetricMask> picks;
    for (auto c : group.member_columns)
      if (bin_ind & (MetricMask{1} << c)) picks.push_back(MetricMask{1} << c);
    if (picks.empty()) continue;
    std::vector<MetricMask> next;
    next.reserve(combos.size() * picks.size());
    for (auto base : combos)
      for (auto pick : picks) next.push_back(base | pick);
    combos = std::move(next);
  }
  if (combos.size() == 1 && combos[0] == 0) return {};
  std::sort(combos.begin(), combos.end());
  return combos;
}

std::size_t combination_count(MetricMask bin_ind) {
  std::size_t product = 1;
  bool any = false;
  for (const auto& group : metric_groups()) {
    std::size_t k = 0;
    for (auto c : group.member_columns)
      if (bin_ind & (MetricMask{1} << c)) ++k;
    if (k == 0) continue;
    any = true;
    product *= k;
  }
  return any ? product : 0;
}

TrainingSet TrainingSet::build(const Corpus& corpus, const std::vector<FeatureMatrix>& matrices) {
  if (matrices.size() != corpus.size()) fail(ErrorKind::Internal, "feature matrix count does not match corpus");
  TrainingSet set;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& doc = corpus.documents[d];
    if (!doc.labeled()) continue;
    const auto& fm = matrices[d];
    if (fm.rows != doc.size() || fm.doc_id != doc.id)
      fail(ErrorKind::Internal, "feature matrix does not match document '" + doc.id + "'");
    Entry e;
    e.doc_id = doc.id;
    e.rows = fm.rows;
    e.features = fm.scaled;
    e.labels = *doc.labels;
    e.positive.assign(e.rows, 0);
    for (auto i : e.labels) e.positive[i] = 1;
    set.total_labels += e.labels.size();
    set.docs.push_back(std::move(e));
  }
  if (set.total_labels == 0) fail(ErrorKind::Validation, "corpus has no labeled sentences");
  return set;
}

double criterion_fitness(const Criterion& criterion, const TrainingSet& set, double ratio) {
  CandidateScorer scorer{set, ratio, {}, {}};
  return scorer.fitness(criterion);
}

ParticleFitness evaluate_particle(const pso::Particle& p, const TrainingSet& set, double ratio,
                                  std::span<const pso::Range> limit4) {
  const MetricMask bin = mask_from_bits(p.bin);
  ParticleFitness best;
  if (bin == 0) return best;

  CandidateScorer scorer{set, ratio, {}, {}};
  bool first = true;
  for (MetricMask mask : enumerate_combinations(bin)) {
    Criterion c{mask, normalize_coefficients(p.real, mask, limit4)};
    const double f = scorer.fitness(c);
    const bool wins = first || f > best.fitness ||
                      (f == best.fitness && (mask_size(mask) < mask_size(best.fit_mask) ||
                                             (mask_size(mask) == mask_size(best.fit_mask) && mask < best.fit_mask)));
    if (wins) best = {f, mask};
    first = false;
  }
  return best;
}

void apply_velocity_penalty(pso::Particle& p) {
  for (std::size_t k = 0; k < p.bin.size(); ++k) {
    if (p.bin[k] && !p.fit_mask[k]) {
      p.v1[k] *= 0.98;
      p.v2[k] *= 0.75;
    }
  }
}

}  // namespace psum
