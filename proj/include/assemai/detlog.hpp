#pragma once

// Detection log: append-only JSON Lines, one record per line, each line
// written with a single write(2) on an O_APPEND descriptor.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "assemai/core.hpp"
#include "assemai/ontology.hpp"

namespace assemai {

struct DetectionRecord {
  std::int64_t ts_ms = 0;
  std::int64_t cycle_index = 1;
  CycleState cycle_state{4};
  AnomalyClass predicted_class = AnomalyClass::NoAnomaly;
  std::array<double, kNumClasses> probs{};
  BoundingBox bbox;
  Verdict verdict;
  double latency_ms = 0.0;
  std::string model_id;
};

/// Written instead of a DetectionRecord when processing a captured frame failed.
struct ErrorRecord {
  std::int64_t ts_ms = 0;
  std::int64_t cycle_index = 1;
  CycleState cycle_state{4};
  std::string error;
};

std::string record_to_json_line(const DetectionRecord& r);
std::string record_to_json_line(const ErrorRecord& r);

/// Parses one log line. Throws InputError when the line is neither kind of record.
DetectionRecord detection_from_json_line(const std::string& line);

/// Opens `path` once and appends whole lines. Not copyable; one owner.
class LogWriter {
 public:
  explicit LogWriter(const std::filesystem::path& path);
  ~LogWriter();
  LogWriter(const LogWriter&) = delete;
  LogWriter& operator=(const LogWriter&) = delete;

  void append(const DetectionRecord& r);
  void append(const ErrorRecord& r);
  /// `line` must not contain a newline; one is added.
  void append_line(const std::string& line);

 private:
  int fd_;
  std::filesystem::path path_;
};

void append_record(const DetectionRecord& r, const std::filesystem::path& log_path);

struct LogContents {
  std::vector<DetectionRecord> records;
  std::vector<ErrorRecord> errors;
  std::int64_t skipped = 0;            // malformed lines
  std::vector<std::string> warnings;   // one per skipped line
};

/// Throws IoError when the file cannot be opened.
LogContents read_log(const std::filesystem::path& log_path);

}  // namespace assemai
