#include <json.hpp>

#include <csignal>
#include <chrono>
#include <iostream>
#include <sstream>
#include <thread>

#include "assemai/fftag.hpp"
#include "assemai/gateway.hpp"
#include "assemai/ontology.hpp"
#include "commands.hpp"

namespace assemai::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

void install_signal_handlers() {
  struct sigaction sa {};
  sa.sa_handler = on_signal;
  sigemptyset(&sa.sa_mask);
  sigaction(SIGINT, &sa, nullptr);
  sigaction(SIGTERM, &sa, nullptr);
}

OntologySpec ontology_or_default(const std::string& path) {
  return load_ontology(path.empty() ? default_ontology_path() : fs::path(path));
}

}  // namespace

int run_verify(const VerifyOptions& o) {
  const OntologySpec spec = ontology_or_default(o.ontology);
  if (!o.cls.empty()) {
    const auto c = parse_class_name(o.cls);
    if (!c) throw InputError("unknown class '" + o.cls + "'");
    std::cout << explain_prediction(CycleState(o.state), *c, spec) << "\n";
    return 0;
  }
  const AuditTable table = audit(fs::path(o.log), spec);
  for (const std::string& w : table.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << table.to_text();
  if (!o.out.empty()) {
    const fs::path out(o.out);
    ensure_dir(out);
    write_text(out / "audit.json", table.to_json());
    write_text(out / "audit.txt", table.to_text());
    announce(out / "audit.json");
    announce(out / "audit.txt");
  }
  return 0;
}

int run_plc_serve(const PlcServeOptions& o) {
  install_signal_handlers();
  PlcServer server(CycleTiming::uniform(o.period_ms), o.bind, static_cast<std::uint16_t>(o.port));
  std::cout << "FFTAG/1 listening on " << o.bind << ":" << server.port() << " (cycle " << o.period_ms << " ms)"
            << std::endl;
  const auto start = std::chrono::steady_clock::now();
  while (!g_stop.load()) {
    if (o.duration_ms > 0 && std::chrono::steady_clock::now() - start >= std::chrono::milliseconds(o.duration_ms)) {
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  server.stop();
  std::cout << "stopped" << std::endl;
  return 0;
}

int run_gateway_cmd(const GatewayOptions& o) {
  install_signal_handlers();
  GatewayConfig cfg;
  cfg.plc_host = o.plc_host;
  cfg.plc_port = static_cast<std::uint16_t>(o.plc_port);
  cfg.poll_interval_ms = o.poll_ms;
  cfg.backoff_initial_ms = o.backoff_ms;
  cfg.backoff_max_ms = o.backoff_max_ms;
  cfg.retry_budget = o.retry_budget;
  cfg.stop_after_cycles = o.cycles;
  const auto mode = parse_roi_mode(o.roi);
  if (!mode) throw InputError("unknown roi mode '" + o.roi + "'");
  cfg.roi_mode = *mode;
  cfg.validate();

  const Model model = load_model(o.model);
  const OntologySpec spec = ontology_or_default(o.ontology);
  RenderOptions ro;
  ro.width = o.width;
  ro.height = o.height;
  ro.noise_sigma = o.noise;
  ro.clutter_count = o.clutter;
  SynthFrameSource frames(o.seed, ro);

  const fs::path out(o.out);
  ensure_dir(out);
  const fs::path log = out / "detections.jsonl";
  const GatewayResult r = run_gateway(cfg, frames, model, spec, log, &g_stop);
  std::cout << "records " << r.records << ", errors " << r.errors << ", reconnects " << r.reconnects << "\n";
  announce(log);
  if (r.exit_code != 0) {
    std::cerr << "error: " << r.fatal_message << "\n";
    return r.exit_code;
  }
  return 0;
}

int run_report(const ReportOptions& o) {
  static const char* kArtifacts[] = {"preprocess.json", "train.json", "metrics.json", "explain.json", "audit.json"};
  const fs::path out(o.out);
  ensure_dir(out);
  ordered_json report = ordered_json::array();
  std::ostringstream txt;
  for (const std::string& run : o.runs) {
    if (!fs::is_directory(run)) throw InputError("run directory " + run + " does not exist");
    ordered_json entry;
    entry["run"] = run;
    txt << "== " << run << "\n";
    bool any = false;
    for (const char* name : kArtifacts) {
      const fs::path p = fs::path(run) / name;
      if (!fs::exists(p)) continue;
      any = true;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text(p));
      } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(p.string() + " is not valid JSON", e.byte);
      }
      const std::string key = fs::path(name).stem().string();
      if (key == "metrics") {
        entry[key] = {{"accuracy", j["accuracy"]},
                      {"weighted_precision", j["weighted_precision"]},
                      {"weighted_recall", j["weighted_recall"]},
                      {"weighted_f1", j["weighted_f1"]},
                      {"support", j["support"]}};
        char line[160];
        std::snprintf(line, sizeof line, "  accuracy %.2f%%  WP %.2f%%  WR %.2f%%  WF1 %.2f%%  support %lld\n",
                      100.0 * j["accuracy"].get<double>(), 100.0 * j["weighted_precision"].get<double>(),
                      100.0 * j["weighted_recall"].get<double>(), 100.0 * j["weighted_f1"].get<double>(),
                      j["support"].get<long long>());
        txt << line;
      } else if (key == "explain") {
        entry[key] = {{"layer", j["layer"]},
                      {"explained", j["explained"]},
                      {"median_in_box_fraction", j["median_in_box_fraction"]},
                      {"median_box_area_fraction", j["median_box_area_fraction"]}};
        char line[160];
        std::snprintf(line, sizeof line, "  saliency in box %.4f (box area %.4f) over %lld images\n",
                      j["median_in_box_fraction"].get<double>(), j["median_box_area_fraction"].get<double>(),
                      j["explained"].get<long long>());
        txt << line;
      } else if (key == "train") {
        entry[key] = {{"model_id", j["model_id"]}, {"best_epoch", j["best_epoch"]}, {"roi", j["roi"]}};
        txt << "  model " << j["model_id"].get<std::string>() << " best epoch " << j["best_epoch"] << "\n";
      } else if (key == "audit") {
        entry[key] = j;
        for (const auto& row : j["classes"]) {
          txt << "  " << row["class"].get<std::string>() << ": " << row["inconsistent"] << " out of " << row["total"]
              << " inconsistent\n";
        }
      } else {
        entry[key] = {{"kept_samples", j["kept_samples"]}, {"detected", j["detected"]}, {"roi", j["roi"]}};
        txt << "  kept " << j["kept_samples"] << " samples, detector hits " << j["detected"] << "\n";
      }
    }
    if (!any) txt << "  (no artifacts)\n";
    report.push_back(std::move(entry));
  }
  write_text(out / "report.json", report.dump(2) + "\n");
  write_text(out / "report.txt", txt.str());
  std::cout << txt.str();
  announce(out / "report.json");
  announce(out / "report.txt");
  return 0;
}

}  // namespace assemai::cli
