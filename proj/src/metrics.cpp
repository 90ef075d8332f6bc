#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "hash.hpp"

namespace psum {
namespace {

constexpr std::size_t kLuhnMaxGap = 4;  // a run of this many non-keywords breaks a cluster

double luhn_score(const Sentence& s, const KeywordSet& keywords) {
  std::vector<std::size_t> positions;
  for (std::size_t k = 0; k < s.terms.size(); ++k)
    if (keywords.contains(s.terms[k])) positions.push_back(s.term_word_pos[k]);
  if (positions.empty()) return 0.0;

  double best = 0.0;
  std::size_t first = positions[0];
  std::size_t count = 1;
  auto close_cluster = [&](std::size_t last) {
    const double span = static_cast<double>(last - first + 1);
    best = std::max(best, static_cast<double>(count * count) / span);
  };
  for (std::size_t k = 1; k < positions.size(); ++k) {
    const std::size_t gap = positions[k] - positions[k - 1] - 1;
    if (gap >= kLuhnMaxGap) {
      close_cluster(positions[k - 1]);
      first = positions[k];
      count = 0;
    }
    ++count;
  }
  close_cluster(positions.back());
  return best;
}

}  // namespace

const std::array<std::string_view, kMetricCount>& metric_names() {
  static constexpr std::array<std::string_view, kMetricCount> names = {
      "pos_f", "pos_l",   "pos_b", "len_w",   "len_ch",  "luhn",    "key_tf",  "key_cov",
      "tf",    "tf_isf",  "title_o", "title_j", "title_c", "d_cov_o", "d_cov_j", "d_cov_c",
  };
  return names;
}

std::string_view metric_name(std::size_t column) { return metric_names().at(column); }

std::size_t metric_index(std::string_view name) {
  const auto& names = metric_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return kMetricCount;
}

const std::vector<MetricTypeGroup>& metric_groups() {
  static const std::vector<MetricTypeGroup> groups = {
      {MetricType::Position, "position", {0, 1, 2}},    {MetricType::Length, "length", {3, 4}},
      {MetricType::Keywords, "keywords", {5, 6, 7}},    {MetricType::Frequency, "frequency", {8, 9}},
      {MetricType::Title, "title", {10, 11, 12}},       {MetricType::Coverage, "coverage", {13, 14, 15}},
  };
  return groups;
}

MetricType metric_type(std::size_t column) {
  for (const auto& g : metric_groups())
    for (auto c : g.member_columns)
      if (c == column) return g.type;
  fail(ErrorKind::InvalidArgument, "metric column out of range: " + std::to_string(column));
}

std::string_view metric_type_name(MetricType type) { return metric_groups()[static_cast<std::size_t>(type)].name; }

std::uint64_t MetricConfig::fingerprint() const {
  return Fnv1a()
      .str("psum-metrics")
      .u64(kMetricSchemaVersion)
      .f64(keyword_fraction)
      .u64(keyword_min)
      .u64(keyword_max)
      .u64(kLuhnMaxGap)
      .value();
}

KeywordSet select_keywords(const Document& doc, const MetricConfig& config) {
  KeywordSet kw;
  kw.selection_fraction = config.keyword_fraction;
  const std::size_t vocab = doc.term_stats.size();
  if (vocab == 0) return kw;

  std::vector<std::pair<std::string, std::size_t>> ranked;
  ranked.reserve(vocab);
  for (const auto& [term, st] : doc.term_stats) ranked.emplace_back(term, st.tf_count);
  // map iteration is lexicographic, so a stable sort by count keeps ties in lexicographic order
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  auto count = static_cast<std::size_t>(std::ceil(config.keyword_fraction * static_cast<double>(vocab)));
  count = std::clamp(count, config.keyword_min, config.keyword_max);
  count = std::min(count, vocab);
  for (std::size_t i = 0; i < count; ++i) kw.terms.insert(ranked[i].first);
  return kw;
}

PositionMetrics position_metrics(std::size_t position, std::size_t sentence_count) {
  if (position < 1 || position > sentence_count)
    fail(ErrorKind::InvalidArgument, "sentence position " + std::to_string(position) + " outside [1, " +
                                         std::to_string(sentence_count) + "]");
  const double i = static_cast<double>(position);
  const double from_end = static_cast<double>(sentence_count - position + 1);
  return {i, 1.0 / i, std::max(1.0 / i, 1.0 / from_end)};
}

LengthMetrics length_metrics(const Sentence& s) {
  return {static_cast<double>(s.words.size()), static_cast<double>(s.char_len)};
}

double term_frequency(const std::string& term, const Document& doc) {
  const auto it = doc.term_stats.find(term);
  if (it == doc.term_stats.end() || doc.total_words == 0) return 0.0;
  return static_cast<double>(it->second.tf_count) / static_cast<double>(doc.total_words);
}

double inverse_sentence_frequency(const std::string& term, const Document& doc) {
  const auto it = doc.term_stats.find(term);
  if (it == doc.term_stats.end() || it->second.sf_count == 0) return 0.0;
  const double isf =
      1.0 - std::log(static_cast<double>(doc.size()) / static_cast<double>(it->second.sf_count));
  return std::max(0.0, isf);
}

KeywordMetrics keyword_metrics(const Sentence& s, const KeywordSet& keywords, const Document& doc) {
  KeywordMetrics m{0.0, 0.0, 0.0};
  std::set<std::string_view> distinct;
  for (const auto& term : s.terms) {
    if (!keywords.contains(term)) continue;
    m.key_tf += term_frequency(term, doc);
    distinct.insert(term);
  }
  if (distinct.empty()) return m;
  m.luhn = luhn_score(s, keywords);
  m.key_cov = static_cast<double>(distinct.size()) / static_cast<double>(keywords.terms.size());
  return m;
}

FrequencyMetrics frequency_metrics(const Sentence& s, const Document& doc) {
  FrequencyMetrics m{0.0, 0.0};
  if (s.terms.empty()) return m;
  double tf_sum = 0.0;
  for (const auto& term : s.terms) {
    const double tf = term_frequency(term, doc);
    tf_sum += tf;
    m.tf_isf += tf * inverse_sentence_frequency(term, doc);
  }
  m.tf = tf_sum / static_cast<double>(s.terms.size());
  return m;
}

TermCounts count_terms(std::span<const std::string> terms) {
  TermCounts counts;
  for (const auto& t : terms) ++counts[t];
  return counts;
}

SimilarityMetrics similarity_metrics(const TermCounts& a, const TermCounts& b) {
  std::size_t size_a = 0, size_b = 0, common = 0;
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (const auto& [t, c] : a) {
    if (c == 0) continue;
    ++size_a;
    norm_a += static_cast<double>(c) * static_cast<double>(c);
  }
  for (const auto& [t, c] : b) {
    if (c == 0) continue;
    ++size_b;
    norm_b += static_cast<double>(c) * static_cast<double>(c);
    const auto it = a.find(t);
    if (it != a.end() && it->second > 0) {
      ++common;
      dot += static_cast<double>(it->second) * static_cast<double>(c);
    }
  }
  SimilarityMetrics m{0.0, 0.0, 0.0};
  const std::size_t smaller = std::min(size_a, size_b);
  const std::size_t unite = size_a + size_b - common;
  if (smaller > 0) m.overlap = static_cast<double>(common) / static_cast<double>(smaller);
  if (unite > 0) m.jaccard = static_cast<double>(common) / static_cast<double>(unite);
  const double denom = std::sqrt(norm_a * norm_b);
  if (denom > 0.0) m.cosine = dot / denom;
  return m;
}

std::array<double, kMetricCount> raw_metrics(const Document& doc, std::size_t sentence, const KeywordSet& keywords) {
  const Sentence& s = doc.sentences.at(sentence);
  const auto pos = position_metrics(sentence + 1, doc.size());
  const auto len = length_metrics(s);
  const auto key = keyword_metrics(s, keywords, doc);
  const auto freq = frequency_metrics(s, doc);

  const TermCounts own = count_terms(s.terms);
  const auto title = similarity_metrics(own, count_terms(doc.title_terms));

  // the rest of the document: all term occurrences minus this sentence's
  TermCounts rest;
  for (const auto& [term, st] : doc.term_stats) {
    const auto it = own.find(term);
    const std::size_t mine = it == own.end() ? 0 : it->second;
    if (st.tf_count > mine) rest.emplace_hint(rest.end(), term, st.tf_count - mine);
  }
  const auto cover = similarity_metrics(own, rest);
  std::size_t shared = 0;
  for (const auto& [term, c] : own)
    if (rest.count(term)) ++shared;
  const double vocab = static_cast<double>(doc.term_stats.size());
  const double d_cov_j = vocab > 0 ? static_cast<double>(shared) / vocab : 0.0;

  return {pos.pos_f,    pos.pos_l,     pos.pos_b,    len.len_w,     len.len_ch,   key.luhn,
          key.key_tf,   key.key_cov,   freq.tf,      freq.tf_isf,   title.overlap, title.jaccard,
          title.cosine, cover.overlap, d_cov_j,      cover.cosine};
}

std::vector<double> scale_columns(std::span<const double> raw, std::size_t rows) {
  if (raw.size() != rows * kMetricCount) fail(ErrorKind::InvalidArgument, "raw matrix size does not match rows x 16");
  std::vector<double> scaled(raw.size(), 0.0);
  for (std::size_t c = 0; c < kMetricCount; ++c) {
    double lo = raw[c], hi = raw[c];
    for (std::size_t r = 1; r < rows; ++r) {
      lo = std::min(lo, raw[r * kMetricCount + c]);
      hi = std::max(hi, raw[r * kMetricCount + c]);
    }
    if (!(hi > lo)) continue;
    const double range = hi - lo;
    for (std::size_t r = 0; r < rows; ++r)
      scaled[r * kMetricCount + c] = std::clamp((raw[r * kMetricCount + c] - lo) / range, 0.0, 1.0);
  }
  return scaled;
}

FeatureMatrix compute_feature_matrix(const Document& doc, const MetricConfig& config) {
  FeatureMatrix fm;
  fm.doc_id = doc.id;
  fm.rows = doc.size();
  fm.raw.reserve(fm.rows * kMetricCount);
  const KeywordSet keywords = select_keywords(doc, config);
  for (std::size_t i = 0; i < fm.rows; ++i) {
    const auto row = raw_metrics(doc, i, keywords);
    fm.raw.insert(fm.raw.end(), row.begin(), row.end());
  }
  if (fm.rows > 0) fm.scaled = scale_columns(fm.raw, fm.rows);
  return fm;
}

}  // namespace psum
