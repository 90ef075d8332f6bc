#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "corpus.hpp"
#include "metrics.hpp"

namespace psum {

inline constexpr std::uint32_t kCacheSchemaVersion = 1;

// Fingerprint stored with a cached matrix: pipeline configuration plus the
// document's own content, so edits to either invalidate the entry.
std::uint64_t cache_fingerprint(const Document& doc, const PreprocessConfig& preprocess, const MetricConfig& metrics);

// <cache_dir>/<doc_id>.fmat; bytes outside [A-Za-z0-9._-] are %XX-escaped.
std::filesystem::path cache_path(const std::filesystem::path& cache_dir, const std::string& doc_id);

// Writes atomically (temp file + rename).
void cache_store(const std::filesystem::path& cache_dir, const FeatureMatrix& matrix, std::uint64_t fingerprint);

// Absent when missing, stale or unreadable; corrupt files log a warning.
std::optional<FeatureMatrix> cache_load(const std::filesystem::path& cache_dir, const std::string& doc_id,
                                        std::uint64_t fingerprint);

}  // namespace psum
