#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace psum {

struct RawDocument;

struct Sentence {
  std::size_t index = 0;  // 0-based position in the document
  std::string raw_text;
  std::size_t char_len = 0;  // UTF-8 code points of raw_text
  std::vector<std::string> words;
  std::vector<std::string> terms;
  std::vector<std::size_t> term_word_pos;  // word position each term came from
};

struct TermStat {
  std::size_t tf_count = 0;  // occurrences in the document
  std::size_t sf_count = 0;  // sentences containing the term
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<std::string> title_terms;  // multiset, in reading order
  std::map<std::string, TermStat> term_stats;
  std::size_t total_words = 0;
  std::optional<std::set<std::size_t>> labels;  // positive sentence indices
  std::uint64_t content_hash = 0;

  std::size_t size() const { return sentences.size(); }
  bool labeled() const { return labels.has_value(); }
};

struct PreprocessConfig {
  std::set<std::string> stopwords;
  std::vector<std::string> abbreviations;
  std::string stopword_list_id;

  static PreprocessConfig defaults();

  std::uint64_t fingerprint() const;
};

const std::vector<std::string>& default_stopwords();
const std::vector<std::string>& default_abbreviations();
inline constexpr std::string_view kDefaultStopwordListId = "en-v1";

// Reads a stopword file: one word per line, '#' comments, blank lines ignored.
std::set<std::string> load_stopwords(const std::string& path);

// Splits on '.', '!' and '?' followed by whitespace or end of text. Decimal
// points and listed abbreviations do not split.
std::vector<std::string> split_sentences(std::string_view paragraph,
                                         const std::vector<std::string>& abbreviations = default_abbreviations());

// Whitespace tokens with leading/trailing punctuation stripped.
std::vector<std::string> tokenize_words(std::string_view sentence);

// Lowercase, drop stopwords and non-alphanumeric characters, stem alphabetic words.
std::vector<std::string> normalize(const std::vector<std::string>& words, const std::set<std::string>& stopwords);

std::size_t utf8_length(std::string_view text);

Document build_document(const RawDocument& raw, const PreprocessConfig& config);

}  // namespace psum
