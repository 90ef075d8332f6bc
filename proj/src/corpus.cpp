#include "corpus.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "error.hpp"
#include "hash.hpp"

namespace psum {
namespace {

using json = nlohmann::json;

// Best-effort id of a line that failed to parse, for error messages.
std::string sniff_id(std::string_view line) {
  static const std::regex id_field(R"re("id"\s*:\s*"([^"\\]*)")re");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(line.begin(), line.end(), m, id_field)) return m[1].str();
  return {};
}

std::string slurp(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> string_array(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) {
    if (std::string_view(key) == "titles") return {};
    fail(ErrorKind::Validation, where + ": missing field '" + key + "'");
  }
  const auto& arr = obj.at(key);
  if (!arr.is_array()) fail(ErrorKind::Validation, where + ": field '" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) fail(ErrorKind::Validation, where + ": field '" + key + "' must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

const Document* Corpus::find(const std::string& id) const {
  for (const auto& d : documents)
    if (d.id == id) return &d;
  return nullptr;
}

std::size_t Corpus::labeled_count() const {
  std::size_t n = 0;
  for (const auto& d : documents)
    if (d.labeled()) ++n;
  return n;
}

std::uint64_t Corpus::fingerprint() const {
  Fnv1a h;
  h.u64(documents.size());
  for (const auto& d : documents) {
    h.u64(d.content_hash);
    if (d.labels) {
      h.u64(d.labels->size());
      for (auto i : *d.labels) h.u64(i);
    } else {
      h.u64(~std::uint64_t{0});
    }
  }
  return h.value();
}

std::vector<RawDocument> parse_raw_corpus(const std::string& text) {
  std::vector<RawDocument> docs;
  std::unordered_set<std::string> ids;
  std::size_t line_start = 0;
  std::size_t line_no = 0;
  std::string last_id;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    ++line_no;
    const std::string_view line(text.data() + line_start, line_end - line_start);
    const bool blank = line.find_first_not_of(" \t\r") == std::string_view::npos;
    if (!blank) {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        std::ostringstream msg;
        msg << "corpus line " << line_no << " (byte offset " << line_start + (e.byte > 0 ? e.byte - 1 : 0) << ")";
        if (const auto id = sniff_id(line); !id.empty())
          msg << " in document '" << id << "'";
        else if (!last_id.empty())
          msg << " after document '" << last_id << "'";
        msg << ": malformed JSON: " << e.what();
        fail(ErrorKind::Parse, msg.str());
      }
      const std::string where = "corpus line " + std::to_string(line_no);
      if (!obj.is_object()) fail(ErrorKind::Validation, where + ": expected a JSON object");
      if (!obj.contains("id") || !obj.at("id").is_string())
        fail(ErrorKind::Validation, where + ": missing string field 'id'");
      RawDocument raw;
      raw.id = obj.at("id").get<std::string>();
      const std::string doc_where = where + " (document '" + raw.id + "')";
      if (raw.id.empty()) fail(ErrorKind::Validation, where + ": empty document id");
      if (!ids.insert(raw.id).second) fail(ErrorKind::Validation, doc_where + ": duplicate document id");
      raw.title_blocks = string_array(obj, "titles", doc_where);
      raw.paragraphs = string_array(obj, "paragraphs", doc_where);
      if (raw.paragraphs.empty()) fail(ErrorKind::Validation, doc_where + ": document has no paragraphs");
      last_id = raw.id;
      docs.push_back(std::move(raw));
    }
    line_start = line_end + 1;
  }
  return docs;
}

std::vector<RawDocument> read_raw_corpus(const std::string& path) { return parse_raw_corpus(slurp(path, "corpus file")); }

Corpus build_corpus(const std::vector<RawDocument>& raw, const PreprocessConfig& config) {
  Corpus corpus;
  corpus.documents.reserve(raw.size());
  for (const auto& r : raw) corpus.documents.push_back(build_document(r, config));
  return corpus;
}

Corpus load_corpus(const std::string& path, const PreprocessConfig& config) {
  return build_corpus(read_raw_corpus(path), config);
}

std::vector<LabelSet> parse_labels(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("malformed label JSON: ") + e.what());
  }
  if (!obj.is_object()) fail(ErrorKind::Validation, "label file must be a JSON object {doc_id: [indices]}");
  std::vector<LabelSet> labels;
  for (const auto& [id, arr] : obj.items()) {
    if (!arr.is_array()) fail(ErrorKind::Validation, "labels for '" + id + "' must be an array of indices");
    LabelSet set{id, {}};
    for (const auto& v : arr) {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(ErrorKind::Validation, "labels for '" + id + "' must be non-negative integers");
      set.positive_sentence_indices.insert(v.get<std::size_t>());
    }
    labels.push_back(std::move(set));
  }
  return labels;
}

std::vector<LabelSet> read_labels(const std::string& path) { return parse_labels(slurp(path, "label file")); }

void attach_labels(Corpus& corpus, const std::vector<LabelSet>& labels) {
  std::vector<std::optional<std::set<std::size_t>>> assigned(corpus.documents.size());
  for (const auto& set : labels) {
    std::size_t at = corpus.documents.size();
    for (std::size_t i = 0; i < corpus.documents.size(); ++i)
      if (corpus.documents[i].id == set.doc_id) at = i;
    if (at == corpus.documents.size()) fail(ErrorKind::Validation, "labels reference unknown document '" + set.doc_id + "'");
    const auto& doc = corpus.documents[at];
    for (auto index : set.positive_sentence_indices) {
      if (index >= doc.size())
        fail(ErrorKind::Validation, "label index " + std::to_string(index) + " out of range for document '" + doc.id +
                                        "' with " + std::to_string(doc.size()) + " sentences");
    }
    assigned[at] = set.positive_sentence_indices;
  }
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) corpus.documents[i].labels = std::move(assigned[i]);
}

std::string corpus_to_json(const Corpus& corpus) {
  json out = json::array();
  for (const auto& d : corpus.documents) {
    json doc;
    doc["id"] = d.id;
    doc["content_hash"] = d.content_hash;
    doc["total_words"] = d.total_words;
    doc["title_terms"] = d.title_terms;
    json sentences = json::array();
    for (const auto& s : d.sentences) {
      sentences.push_back({{"index", s.index},
                           {"text", s.raw_text},
                           {"char_len", s.char_len},
                           {"words", s.words},
                           {"terms", s.terms},
                           {"term_word_pos", s.term_word_pos}});
    }
    doc["sentences"] = std::move(sentences);
    json stats = json::object();
    for (const auto& [term, st] : d.term_stats) stats[term] = {st.tf_count, st.sf_count};
    doc["term_stats"] = std::move(stats);
    if (d.labels) doc["labels"] = *d.labels;
    out.push_back(std::move(doc));
  }
  return out.dump();
}

}  // namespace psum
