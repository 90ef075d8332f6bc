#include "preprocess.hpp"

#include <algorithm>
#include <fstream>

#include "corpus.hpp"
#include "error.hpp"
#include "hash.hpp"
#include "porter_stemmer.hpp"

namespace psum {
namespace {

constexpr std::string_view kSplitterVersion = "split-v1";

const char* const kBuiltinStopwords[] = {
#include "stopwords_en.inc"
};

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_ascii_punct(unsigned char c) { return c < 0x80 && !is_space(c) && !is_digit(c) && !is_alpha(c) && c >= 0x21; }

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Length of a closing quote/bracket at text[pos], 0 if none.
std::size_t closer_length(std::string_view text, std::size_t pos) {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
  // U+2019 and U+201D
  if (text.substr(pos, 3) == "\xE2\x80\x99" || text.substr(pos, 3) == "\xE2\x80\x9D") return 3;
  return 0;
}

bool ends_with_abbreviation(std::string_view sentence, const std::vector<std::string>& abbreviations) {
  const std::string lower = lowercase(sentence);
  for (const auto& abbr : abbreviations) {
    const std::string a = lowercase(abbr);
    if (a.empty() || lower.size() < a.size()) continue;
    if (lower.compare(lower.size() - a.size(), a.size(), a) != 0) continue;
    const std::size_t before = lower.size() - a.size();
    if (before == 0) return true;
    const auto prev = static_cast<unsigned char>(lower[before - 1]);
    if (is_space(prev) || prev == '(' || prev == '[' || prev == '"') return true;
  }
  return false;
}

struct Normalized {
  std::vector<std::string> terms;
  std::vector<std::size_t> positions;
};

Normalized normalize_with_positions(const std::vector<std::string>& words, const std::set<std::string>& stopwords) {
  Normalized out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string lower = lowercase(words[i]);
    if (stopwords.count(lower)) continue;
    std::string cleaned;
    bool alphabetic = true;
    for (char ch : lower) {
      const auto c = static_cast<unsigned char>(ch);
      if (is_alpha(c)) {
        cleaned.push_back(ch);
      } else if (is_digit(c) || c >= 0x80) {
        cleaned.push_back(ch);
        alphabetic = false;
      }
    }
    if (cleaned.empty() || stopwords.count(cleaned)) continue;
    out.terms.push_back(alphabetic ? porter_stem(cleaned) : cleaned);
    out.positions.push_back(i);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words(std::begin(kBuiltinStopwords), std::end(kBuiltinStopwords));
  return words;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> abbreviations = {
      "Dr.", "Mr.", "Mrs.", "Ms.", "Prof.", "Fig.", "Figs.", "Eq.", "et al.", "e.g.", "i.e.", "vs.", "etc.", "No.",
      "approx.", "cf.",
  };
  return abbreviations;
}

PreprocessConfig PreprocessConfig::defaults() {
  PreprocessConfig config;
  config.stopwords = std::set<std::string>(default_stopwords().begin(), default_stopwords().end());
  config.abbreviations = default_abbreviations();
  config.stopword_list_id = std::string(kDefaultStopwordListId);
  return config;
}

std::uint64_t PreprocessConfig::fingerprint() const {
  Fnv1a h;
  h.str("psum-preprocess").str(kPorterStemmerId).str(kSplitterVersion);
  h.u64(stopwords.size());
  for (const auto& w : stopwords) h.str(w);
  h.u64(abbreviations.size());
  for (const auto& a : abbreviations) h.str(a);
  return h.value();
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open stopword file '" + path + "'");
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto word = trim(line);
    if (!word.empty()) words.insert(lowercase(word));
  }
  return words;
}

std::vector<std::string> split_sentences(std::string_view paragraph, const std::vector<std::string>& abbreviations) {
  std::vector<std::string> out;
  const std::size_t n = paragraph.size();
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < n) {
    if (!is_terminator(paragraph[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < n && is_terminator(paragraph[end])) ++end;
    const bool single_period = (end - i == 1) && paragraph[i] == '.';
    while (end < n) {
      const std::size_t len = closer_length(paragraph, end);
      if (len == 0) break;
      end += len;
    }
    const bool boundary = end == n || is_space(static_cast<unsigned char>(paragraph[end]));
    bool split = boundary;
    if (split && single_period && ends_with_abbreviation(paragraph.substr(start, i + 1 - start), abbreviations))
      split = false;
    if (split) {
      const auto sentence = trim(paragraph.substr(start, end - start));
      if (!sentence.empty()) out.emplace_back(sentence);
      start = end;
    }
    i = end;
  }
  const auto rest = trim(paragraph.substr(std::min(start, n)));
  if (!rest.empty()) out.emplace_back(rest);
  return out;
}

std::vector<std::string> tokenize_words(std::string_view sentence) {
  std::vector<std::string> words;
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    while (i < n && is_space(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t j = i;
    while (j < n && !is_space(static_cast<unsigned char>(sentence[j]))) ++j;
    std::size_t b = i, e = j;
    while (b < e && is_ascii_punct(static_cast<unsigned char>(sentence[b]))) ++b;
    while (e > b && is_ascii_punct(static_cast<unsigned char>(sentence[e - 1]))) --e;
    if (e > b) words.emplace_back(sentence.substr(b, e - b));
    i = j;
  }
  return words;
}

std::vector<std::string> normalize(const std::vector<std::string>& words, const std::set<std::string>& stopwords) {
  return normalize_with_positions(words, stopwords).terms;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t count = 0;
  for (char ch : text)
    if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) ++count;
  return count;
}

Document build_document(const RawDocument& raw, const PreprocessConfig& config) {
  Document doc;
  doc.id = raw.id;

  for (const auto& paragraph : raw.paragraphs) {
    for (auto& text : split_sentences(paragraph, config.abbreviations)) {
      Sentence s;
      s.index = doc.sentences.size();
      s.char_len = utf8_length(text);
      s.words = tokenize_words(text);
      auto normalized = normalize_with_positions(s.words, config.stopwords);
      s.terms = std::move(normalized.terms);
      s.term_word_pos = std::move(normalized.positions);
      s.raw_text = std::move(text);
      doc.sentences.push_back(std::move(s));
    }
  }
  if (doc.sentences.empty()) fail(ErrorKind::Validation, "document '" + raw.id + "' has no sentences");

  for (const auto& title : raw.title_blocks) {
    for (auto& term : normalize(tokenize_words(title), config.stopwords)) doc.title_terms.push_back(std::move(term));
  }

  for (const auto& s : doc.sentences) {
    doc.total_words += s.words.size();
    std::set<std::string_view> seen;
    for (const auto& term : s.terms) {
      auto& stat = doc.term_stats[term];
      ++stat.tf_count;
      if (seen.insert(term).second) ++stat.sf_count;
    }
  }

  Fnv1a h;
  h.str(raw.id).u64(raw.title_blocks.size());
  for (const auto& t : raw.title_blocks) h.str(t);
  h.u64(raw.paragraphs.size());
  for (const auto& p : raw.paragraphs) h.str(p);
  doc.content_hash = h.value();
  return doc;
}

}  // namespace psum
