#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace assemai::cli {

struct GenOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::int64_t count = 1000;
  int width = 256;
  int height = 256;
  double noise = 0.03;
  int clutter = 6;
  std::int64_t period_ms = 2100;
};

struct PreprocessOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string in;
  std::vector<int> states{4, 9};
  std::vector<double> state9_window{0.0, 1.0};
  std::int64_t period_ms = 2100;
  std::string roi = "detect";
  std::string geometry;
  int ssim_window = 7;
  int ssim_limit = 200;
};

struct TrainOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string manifest;
  std::string roi = "none";
  int epochs = 20;
  int batch = 32;
  double lr = 1e-3;
  int input = 64;
  double split = 0.8;
  int channels = 1;
  int conv1 = 32;
  int conv2 = 64;
  int dense = 512;
};

struct EvalOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string model;
  std::string manifest;
  std::string predictions;
  std::string ontology;
  std::string roi = "none";
};

struct ExplainOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string model;
  std::string manifest;
  std::string roi = "none";
  std::string layer = "conv2";
  int limit = 50;
  int heatmaps = 8;
  bool all = false;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string log;
  std::string ontology;
  int state = 0;
  std::string cls;
};

struct PlcServeOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string bind = "127.0.0.1";
  int port = 14840;
  std::int64_t period_ms = 2100;
  std::int64_t duration_ms = 0;
};

struct GatewayOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string model;
  std::string ontology;
  std::string plc_host = "127.0.0.1";
  int plc_port = 14840;
  std::int64_t cycles = 0;
  std::int64_t poll_ms = 20;
  std::int64_t backoff_ms = 100;
  std::int64_t backoff_max_ms = 5000;
  int retry_budget = 10;
  std::string roi = "detect";
  int width = 256;
  int height = 256;
  double noise = 0.03;
  int clutter = 6;
};

struct ReportOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> runs;
};

// Each returns the process exit code; library errors propagate as exceptions.
int run_gen(const GenOptions& o);
int run_preprocess(const PreprocessOptions& o);
int run_train(const TrainOptions& o);
int run_eval(const EvalOptions& o);
int run_explain(const ExplainOptions& o);
int run_verify(const VerifyOptions& o);
int run_plc_serve(const PlcServeOptions& o);
int run_gateway_cmd(const GatewayOptions& o);
int run_report(const ReportOptions& o);

/// Prints "wrote <path>" to stdout.
void announce(const std::filesystem::path& p);
/// Creates the directory (and parents); IoError when impossible.
void ensure_dir(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& text);
std::string read_text(const std::filesystem::path& p);

}  // namespace assemai::cli
