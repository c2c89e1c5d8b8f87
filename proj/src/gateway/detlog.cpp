#include "assemai/detlog.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace assemai {

namespace {

using ordered_json = nlohmann::ordered_json;

void require_known_class(const nlohmann::json& j, const char* key, AnomalyClass& out) {
  const auto name = j.at(key).get<std::string>();
  const auto c = parse_class_name(name);
  if (!c) throw InputError(std::string("unknown class name in ") + key + ": " + name);
  out = *c;
}

ErrorRecord error_from_json(const nlohmann::json& j) {
  ErrorRecord e;
  e.ts_ms = j.at("ts_ms").get<std::int64_t>();
  e.cycle_index = j.at("cycle_index").get<std::int64_t>();
  e.cycle_state = CycleState(j.at("cycle_state").get<int>());
  e.error = j.at("error").get<std::string>();
  return e;
}

}  // namespace

std::string record_to_json_line(const DetectionRecord& r) {
  ordered_json j;
  j["ts_ms"] = r.ts_ms;
  j["cycle_index"] = r.cycle_index;
  j["cycle_state"] = r.cycle_state.value();
  j["predicted_class"] = class_name(r.predicted_class);
  j["probs"] = r.probs;
  j["bbox"] = {{"x_min", r.bbox.x_min}, {"y_min", r.bbox.y_min}, {"x_max", r.bbox.x_max}, {"y_max", r.bbox.y_max}};
  j["verdict"] = {{"status", verdict_status_name(r.verdict.status)},
                  {"rule_id", r.verdict.rule_id},
                  {"reason", r.verdict.reason},
                  {"state", r.verdict.state.value()},
                  {"predicted", class_name(r.verdict.predicted)}};
  j["latency_ms"] = r.latency_ms;
  j["model_id"] = r.model_id;
  return j.dump();
}

std::string record_to_json_line(const ErrorRecord& r) {
  ordered_json j;
  j["ts_ms"] = r.ts_ms;
  j["cycle_index"] = r.cycle_index;
  j["cycle_state"] = r.cycle_state.value();
  j["error"] = r.error;
  return j.dump();
}

DetectionRecord detection_from_json_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    DetectionRecord r;
    r.ts_ms = j.at("ts_ms").get<std::int64_t>();
    r.cycle_index = j.at("cycle_index").get<std::int64_t>();
    r.cycle_state = CycleState(j.at("cycle_state").get<int>());
    require_known_class(j, "predicted_class", r.predicted_class);
    const auto& p = j.at("probs");
    if (!p.is_array() || p.size() != kNumClasses) throw InputError("probs must hold 5 values");
    for (std::size_t i = 0; i < kNumClasses; ++i) r.probs[i] = p[i].get<double>();
    const auto& b = j.at("bbox");
    r.bbox = {b.at("x_min").get<int>(), b.at("y_min").get<int>(), b.at("x_max").get<int>(), b.at("y_max").get<int>()};
    const auto& v = j.at("verdict");
    const auto status = v.at("status").get<std::string>();
    if (status == "Consistent") {
      r.verdict.status = VerdictStatus::Consistent;
    } else if (status == "Inconsistent") {
      r.verdict.status = VerdictStatus::Inconsistent;
    } else {
      throw InputError("unknown verdict status " + status);
    }
    r.verdict.rule_id = v.at("rule_id").get<std::string>();
    r.verdict.reason = v.at("reason").get<std::string>();
    r.verdict.state = CycleState(v.at("state").get<int>());
    require_known_class(v, "predicted", r.verdict.predicted);
    r.latency_ms = j.at("latency_ms").get<double>();
    r.model_id = j.at("model_id").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("detection record: ") + e.what());
  }
}

LogWriter::LogWriter(const std::filesystem::path& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open log " + path.string() + ": " + std::strerror(errno));
}

LogWriter::~LogWriter() { ::close(fd_); }

void LogWriter::append(const DetectionRecord& r) { append_line(record_to_json_line(r)); }

void LogWriter::append(const ErrorRecord& r) { append_line(record_to_json_line(r)); }

void LogWriter::append_line(const std::string& line) {
  if (line.find('\n') != std::string::npos) throw InputError("log line contains a newline");
  const std::string full = line + "\n";
  const ssize_t n = ::write(fd_, full.data(), full.size());
  if (n != static_cast<ssize_t>(full.size())) {
    throw IoError("short write to " + path_.string() + (n < 0 ? std::string(": ") + std::strerror(errno) : ""));
  }
}

void append_record(const DetectionRecord& r, const std::filesystem::path& log_path) {
  LogWriter(log_path).append(r);
}

LogContents read_log(const std::filesystem::path& log_path) {
  std::ifstream in(log_path);
  if (!in) throw IoError("cannot open log " + log_path.string());
  LogContents out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.is_object() && j.contains("error")) {
        out.errors.push_back(error_from_json(j));
      } else {
        out.records.push_back(detection_from_json_line(line));
      }
    } catch (const std::exception& e) {
      ++out.skipped;
      out.warnings.push_back(log_path.string() + ":" + std::to_string(line_no) + ": skipped: " + e.what());
    }
  }
  return out;
}

}  // namespace assemai
