#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "corpus.hpp"
#include "metrics.hpp"
#include "pso.hpp"

namespace psum {

using MetricMask = std::uint32_t;  // bit j selects metric column j

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct Criterion {
  MetricMask mask = 0;
  std::array<double, kMetricCount> weights{};  // zero outside mask, sum 1 inside
};

MetricMask mask_from_bits(std::span<const std::uint8_t> bits);
pso::BitVector bits_from_mask(MetricMask mask, std::size_t n = kMetricCount);
std::size_t mask_size(MetricMask mask);

// scaled_j = (realInd_j + r_j) / (2 r_j) with r_j the limit4 radius; weights are the
// masked scaled values divided by their sum, uniform when that sum is 0.
std::array<double, kMetricCount> normalize_coefficients(std::span<const double> real_ind, MetricMask mask,
                                                        std::span<const pso::Range> limit4);
// Second half of normalize_coefficients: divide masked non-negative values by their sum.
std::array<double, kMetricCount> normalize_scaled(std::span<const double> scaled, MetricMask mask);

double sentence_score(std::span<const double> weights, std::span<const double> features);

// t = max(1, round(ratio * S))
std::size_t summary_size(std::size_t sentence_count, double ratio);

// Indices of the t best scores (earlier index wins ties), in ascending index order.
std::vector<std::size_t> select_summary(std::span<const double> scores, double ratio);

double mcc(const ConfusionMatrix& m);

ConfusionMatrix confusion(std::span<const std::size_t> predicted, const std::set<std::size_t>& labels,
                          std::size_t sentence_count);

// One metric per non-empty type group, Cartesian product in ascending order.
std::vector<MetricMask> enumerate_combinations(MetricMask bin_ind);
std::size_t combination_count(MetricMask bin_ind);

// Labeled documents paired with their feature matrices.
struct TrainingSet {
  struct Entry {
    std::string doc_id;
    std::size_t rows = 0;
    std::vector<double> features;    // rows x kMetricCount scaled
    std::vector<std::uint8_t> positive;  // per sentence
    std::set<std::size_t> labels;
  };
  std::vector<Entry> docs;
  std::size_t total_labels = 0;

  static TrainingSet build(const Corpus& corpus, const std::vector<FeatureMatrix>& matrices);
};

// Label-weighted MCC of a fixed criterion over the set (Eq. 10 aggregation).
double criterion_fitness(const Criterion& criterion, const TrainingSet& set, double ratio);

struct ParticleFitness {
  double fitness = -1.0;
  MetricMask fit_mask = 0;
};

// Best combination derived from the particle's BinInd. All-zero BinInd scores -1.
ParticleFitness evaluate_particle(const pso::Particle& p, const TrainingSet& set, double ratio,
                                  std::span<const pso::Range> limit4);

// Dimensions selected in BinInd but dropped from FitInd: V1 *= 0.98, V2 *= 0.75.
void apply_velocity_penalty(pso::Particle& p);

}  // namespace psum
