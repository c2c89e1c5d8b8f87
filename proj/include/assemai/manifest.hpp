#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "assemai/core.hpp"

namespace assemai {

/// One labelled frame. `image_path` is relative to the manifest's directory.
struct Sample {
  std::string image_path;
  AnomalyClass label = AnomalyClass::NoAnomaly;
  std::int64_t cycle_index = 1;
  CycleState state{4};
  std::int64_t timestamp_ms = 0;
  BoundingBox truth_box;
  std::string provenance;  // compact JSON object text; empty when absent

  friend bool operator==(const Sample&, const Sample&) = default;
};

using ClassCounts = std::array<std::int64_t, kNumClasses>;

struct DatasetManifest {
  std::vector<Sample> samples;
  ClassCounts class_counts{};
  std::uint64_t seed = 0;
  std::string generator_version;
  std::string provenance;

  /// Recomputes class_counts from samples.
  void recount();
};

ClassCounts tally(const std::vector<Sample>& samples);

inline constexpr const char* kManifestFile = "manifest.jsonl";
inline constexpr const char* kManifestMetaFile = "manifest.meta.json";

/// One JSON object per line with the Sample field names.
std::string sample_to_json_line(const Sample& s);
Sample sample_from_json_line(const std::string& line);

/// Writes <dir>/manifest.jsonl and <dir>/manifest.meta.json.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& dir);

/// Accepts either a manifest directory or the manifest.jsonl path. Class counts
/// are recomputed from the samples; seed/version come from the meta file if present.
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Directory that relative image paths resolve against.
std::filesystem::path manifest_dir(const std::filesystem::path& path);

}  // namespace assemai
