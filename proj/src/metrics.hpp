#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "preprocess.hpp"

namespace psum {

inline constexpr std::size_t kMetricCount = 16;
inline constexpr std::uint32_t kMetricSchemaVersion = 1;

enum class Metric : std::size_t {
  PosF, PosL, PosB,
  LenW, LenCh,
  Luhn, KeyTf, KeyCov,
  Tf, TfIsf,
  TitleO, TitleJ, TitleC,
  DCovO, DCovJ, DCovC,
};

enum class MetricType : std::size_t { Position, Length, Keywords, Frequency, Title, Coverage };
inline constexpr std::size_t kMetricTypeCount = 6;

struct MetricTypeGroup {
  MetricType type;
  std::string_view name;
  std::vector<std::size_t> member_columns;
};

const std::array<std::string_view, kMetricCount>& metric_names();
std::string_view metric_name(std::size_t column);
// kMetricCount when unknown
std::size_t metric_index(std::string_view name);
const std::vector<MetricTypeGroup>& metric_groups();
MetricType metric_type(std::size_t column);
std::string_view metric_type_name(MetricType type);

struct MetricConfig {
  double keyword_fraction = 0.10;
  std::size_t keyword_min = 5;
  std::size_t keyword_max = 100;

  std::uint64_t fingerprint() const;
};

struct KeywordSet {
  std::set<std::string> terms;
  double selection_fraction = 0.10;

  bool contains(const std::string& term) const { return terms.count(term) != 0; }
};

KeywordSet select_keywords(const Document& doc, const MetricConfig& config = {});

struct PositionMetrics {
  double pos_f, pos_l, pos_b;
};
struct LengthMetrics {
  double len_w, len_ch;
};
struct KeywordMetrics {
  double luhn, key_tf, key_cov;
};
struct FrequencyMetrics {
  double tf, tf_isf;
};
struct SimilarityMetrics {
  double overlap, jaccard, cosine;
};

// position is 1-based: 1 <= position <= sentence_count
PositionMetrics position_metrics(std::size_t position, std::size_t sentence_count);
LengthMetrics length_metrics(const Sentence& s);
KeywordMetrics keyword_metrics(const Sentence& s, const KeywordSet& keywords, const Document& doc);
FrequencyMetrics frequency_metrics(const Sentence& s, const Document& doc);

double term_frequency(const std::string& term, const Document& doc);
// 1 - ln(S / sf), clamped below at 0
double inverse_sentence_frequency(const std::string& term, const Document& doc);

using TermCounts = std::map<std::string, std::size_t>;
TermCounts count_terms(std::span<const std::string> terms);
SimilarityMetrics similarity_metrics(const TermCounts& a, const TermCounts& b);

struct FeatureMatrix {
  std::string doc_id;
  std::size_t rows = 0;
  std::vector<double> raw;     // rows x kMetricCount, row-major
  std::vector<double> scaled;  // min-max scaled per column to [0, 1]

  std::span<const double> raw_row(std::size_t i) const { return {raw.data() + i * kMetricCount, kMetricCount}; }
  std::span<const double> row(std::size_t i) const { return {scaled.data() + i * kMetricCount, kMetricCount}; }
  double at(std::size_t i, std::size_t column) const { return scaled[i * kMetricCount + column]; }

  bool operator==(const FeatureMatrix&) const = default;
};

std::array<double, kMetricCount> raw_metrics(const Document& doc, std::size_t sentence, const KeywordSet& keywords);

// Per-column min-max scaling; constant columns become 0.
std::vector<double> scale_columns(std::span<const double> raw, std::size_t rows);

FeatureMatrix compute_feature_matrix(const Document& doc, const MetricConfig& config = {});

}  // namespace psum
