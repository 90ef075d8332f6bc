#include "metric_cache.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "hash.hpp"
#include "log.hpp"

namespace psum {
namespace {

constexpr std::array<char, 8> kMagic = {'P', 'S', 'U', 'M', 'F', 'M', 'A', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  put_u64(out, bits);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  bool u32(std::uint32_t& v) {
    if (pos_ + 4 > bytes_.size()) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return true;
  }

  bool u64(std::uint64_t& v) {
    if (pos_ + 8 > bytes_.size()) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return true;
  }

  bool f64(double& d) {
    std::uint64_t bits;
    if (!u64(bits)) return false;
    std::memcpy(&d, &bits, sizeof d);
    return true;
  }

  bool magic() {
    if (bytes_.size() < kMagic.size() || std::memcmp(bytes_.data(), kMagic.data(), kMagic.size()) != 0) return false;
    pos_ = kMagic.size();
    return true;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t cache_fingerprint(const Document& doc, const PreprocessConfig& preprocess, const MetricConfig& metrics) {
  return Fnv1a()
      .u64(kCacheSchemaVersion)
      .u64(preprocess.fingerprint())
      .u64(metrics.fingerprint())
      .u64(doc.content_hash)
      .value();
}

std::filesystem::path cache_path(const std::filesystem::path& cache_dir, const std::string& doc_id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string name;
  for (char ch : doc_id) {
    const auto c = static_cast<unsigned char>(ch);
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                      c == '_' || c == '-';
    if (safe) {
      name.push_back(ch);
    } else {
      name.push_back('%');
      name.push_back(kHex[c >> 4]);
      name.push_back(kHex[c & 0xF]);
    }
  }
  // keep "." and ".." from resolving to directories
  if (name.find_first_not_of('.') == std::string::npos) name = "%2E" + name.substr(1);
  return cache_dir / (name + ".fmat");
}

void cache_store(const std::filesystem::path& cache_dir, const FeatureMatrix& matrix, std::uint64_t fingerprint) {
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create cache directory '" + cache_dir.string() + "': " + ec.message());

  std::string out(kMagic.begin(), kMagic.end());
  put_u32(out, kCacheSchemaVersion);
  put_u64(out, fingerprint);
  put_u64(out, matrix.rows);
  put_u32(out, static_cast<std::uint32_t>(kMetricCount));
  for (double d : matrix.raw) put_f64(out, d);
  for (double d : matrix.scaled) put_f64(out, d);

  const auto target = cache_path(cache_dir, matrix.doc_id);
  auto temp = target;
  temp += ".tmp";
  {
    std::ofstream f(temp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Io, "cannot write cache file '" + temp.string() + "'");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) fail(ErrorKind::Io, "short write to cache file '" + temp.string() + "'");
  }
  std::filesystem::rename(temp, target, ec);
  if (ec) fail(ErrorKind::Io, "cannot rename cache file into '" + target.string() + "': " + ec.message());
}

std::optional<FeatureMatrix> cache_load(const std::filesystem::path& cache_dir, const std::string& doc_id,
                                        std::uint64_t fingerprint) {
  const auto path = cache_path(cache_dir, doc_id);
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string bytes = buf.str();

  auto corrupt = [&](const char* why) -> std::optional<FeatureMatrix> {
    log::warn("ignoring corrupt cache file '" + path.string() + "': " + why);
    return std::nullopt;
  };

  Reader r(bytes);
  std::uint32_t version = 0, cols = 0;
  std::uint64_t stored_fingerprint = 0, rows = 0;
  if (!r.magic()) return corrupt("bad magic");
  if (!r.u32(version) || !r.u64(stored_fingerprint) || !r.u64(rows) || !r.u32(cols)) return corrupt("truncated header");
  if (version != kCacheSchemaVersion) {
    log::info("cache file '" + path.string() + "' has schema version " + std::to_string(version) + ", recomputing");
    return std::nullopt;
  }
  if (stored_fingerprint != fingerprint) return std::nullopt;
  if (cols != kMetricCount) return corrupt("unexpected column count");
  if (rows == 0 || rows > (r.remaining() / 8)) return corrupt("bad row count");
  const std::uint64_t values = rows * kMetricCount;
  if (r.remaining() != 2 * values * 8) return corrupt("payload size does not match header");

  FeatureMatrix m;
  m.doc_id = doc_id;
  m.rows = static_cast<std::size_t>(rows);
  m.raw.resize(values);
  m.scaled.resize(values);
  for (auto& d : m.raw) r.f64(d);
  for (auto& d : m.scaled) r.f64(d);
  return m;
}

}  // namespace psum
