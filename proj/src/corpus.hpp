#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "preprocess.hpp"

namespace psum {

struct RawDocument {
  std::string id;
  std::vector<std::string> title_blocks;
  std::vector<std::string> paragraphs;
};

struct LabelSet {
  std::string doc_id;
  std::set<std::size_t> positive_sentence_indices;
};

struct Corpus {
  std::vector<Document> documents;

  std::size_t size() const { return documents.size(); }
  const Document* find(const std::string& id) const;
  std::size_t labeled_count() const;
  std::uint64_t fingerprint() const;  // content + labels
};

// One JSON object per line: {"id": str, "titles": [str], "paragraphs": [str]}.
// Blank lines are skipped.
std::vector<RawDocument> read_raw_corpus(const std::string& path);
std::vector<RawDocument> parse_raw_corpus(const std::string& text);

Corpus load_corpus(const std::string& path, const PreprocessConfig& config);
Corpus build_corpus(const std::vector<RawDocument>& raw, const PreprocessConfig& config);

// {"doc_id": [0-based sentence indices], ...}
std::vector<LabelSet> read_labels(const std::string& path);
std::vector<LabelSet> parse_labels(const std::string& text);

// Every referenced document gets its positive set; the rest become unlabeled.
void attach_labels(Corpus& corpus, const std::vector<LabelSet>& labels);

// Canonical JSON dump of the preprocessed corpus (debugging and equality checks).
std::string corpus_to_json(const Corpus& corpus);

}  // namespace psum
