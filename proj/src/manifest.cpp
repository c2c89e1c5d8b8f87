#include "assemai/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace assemai {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ClassCounts tally(const std::vector<Sample>& samples) {
  ClassCounts c{};
  for (const auto& s : samples) ++c[to_index(s.label)];
  return c;
}

void DatasetManifest::recount() { class_counts = tally(samples); }

std::string sample_to_json_line(const Sample& s) {
  ordered_json j;
  j["image_path"] = s.image_path;
  j["label"] = to_index(s.label);
  j["cycle_index"] = s.cycle_index;
  j["state"] = s.state.value();
  j["timestamp_ms"] = s.timestamp_ms;
  j["truth_box"] = {{"x_min", s.truth_box.x_min},
                    {"y_min", s.truth_box.y_min},
                    {"x_max", s.truth_box.x_max},
                    {"y_max", s.truth_box.y_max}};
  if (!s.provenance.empty()) j["provenance"] = ordered_json::parse(s.provenance);
  return j.dump();
}

Sample sample_from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    Sample s;
    s.image_path = j.at("image_path").get<std::string>();
    s.label = class_from_index(j.at("label").get<int>());
    s.cycle_index = j.at("cycle_index").get<std::int64_t>();
    if (s.cycle_index < 1) throw InputError("cycle_index must be >= 1");
    s.state = CycleState(j.at("state").get<int>());
    s.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    const auto& b = j.at("truth_box");
    s.truth_box = {b.at("x_min").get<int>(), b.at("y_min").get<int>(), b.at("x_max").get<int>(),
                   b.at("y_max").get<int>()};
    if (j.contains("provenance")) s.provenance = j.at("provenance").dump();
    return s;
  } catch (const json::parse_error& e) {
    throw FormatError("manifest line is not JSON", e.byte);
  } catch (const json::exception& e) {
    throw InputError(std::string("manifest line: ") + e.what());
  }
}

std::filesystem::path manifest_dir(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return path;
  return path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    std::ofstream out(dir / kManifestFile, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / kManifestFile).string());
    for (const auto& s : manifest.samples) out << sample_to_json_line(s) << '\n';
    if (!out) throw IoError("short write to manifest");
  }
  ordered_json meta;
  meta["seed"] = manifest.seed;
  meta["generator_version"] = manifest.generator_version;
  meta["class_counts"] = manifest.class_counts;
  meta["sample_count"] = manifest.samples.size();
  if (!manifest.provenance.empty()) meta["provenance"] = ordered_json::parse(manifest.provenance);
  std::ofstream out(dir / kManifestMetaFile, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / kManifestMetaFile).string());
  out << meta.dump(2) << '\n';
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  const auto dir = manifest_dir(path);
  const auto file = std::filesystem::is_directory(path) ? path / kManifestFile : path;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + file.string());
  DatasetManifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      m.samples.push_back(sample_from_json_line(line));
    } catch (const InputError& e) {
      throw InputError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  m.recount();
  std::ifstream meta_in(dir / kManifestMetaFile);
  if (meta_in) {
    try {
      const json meta = json::parse(meta_in);
      m.seed = meta.value("seed", std::uint64_t{0});
      m.generator_version = meta.value("generator_version", std::string{});
      if (meta.contains("provenance")) m.provenance = meta.at("provenance").dump();
    } catch (const json::exception& e) {
      throw InputError(std::string("manifest meta: ") + e.what());
    }
  }
  return m;
}

}  // namespace assemai
