#include "assemai/gateway.hpp"

#include <chrono>
#include <set>
#include <thread>
#include <variant>

#include <json.hpp>

#include "assemai/rng.hpp"
#include "assemai/scorecam.hpp"

namespace assemai {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kLabelStream = 0x6c6162656cULL;

struct Trigger {
  std::int64_t cycle_index;
  CycleState state;
  std::int64_t server_time_ms;
  Clock::time_point received;
};

using LogItem = std::variant<DetectionRecord, ErrorRecord>;

bool stop_requested(const std::atomic<bool>* stop) { return stop && stop->load(); }

// Sleeps in short slices so a stop request is honoured promptly.
void sleep_interruptible(std::int64_t ms, const std::atomic<bool>* stop) {
  const auto until = Clock::now() + std::chrono::milliseconds(ms);
  while (!stop_requested(stop) && Clock::now() < until) {
    std::this_thread::sleep_for(std::min<Clock::duration>(until - Clock::now(), std::chrono::milliseconds(20)));
  }
}

}  // namespace

void GatewayConfig::validate() const {
  if (plc_host.empty()) throw InputError("plc_host must not be empty");
  if (poll_interval_ms < 1) throw InputError("poll_interval_ms must be at least 1");
  if (backoff_initial_ms < 1 || backoff_max_ms < backoff_initial_ms) {
    throw InputError("backoff must satisfy 1 <= backoff_initial_ms <= backoff_max_ms");
  }
  if (retry_budget < 1) throw InputError("retry_budget must be at least 1");
  if (io_timeout_ms < 1) throw InputError("io_timeout_ms must be at least 1");
  if (queue_capacity < 1) throw InputError("queue_capacity must be at least 1");
  if (stop_after_cycles < 0) throw InputError("stop_after_cycles must be non-negative");
}

GatewayConfig GatewayConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("gateway config is not valid JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw InputError("gateway config must be a JSON object");
  GatewayConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "plc_host") c.plc_host = v.get<std::string>();
      else if (key == "plc_port") c.plc_port = v.get<std::uint16_t>();
      else if (key == "poll_interval_ms") c.poll_interval_ms = v.get<std::int64_t>();
      else if (key == "backoff_initial_ms") c.backoff_initial_ms = v.get<std::int64_t>();
      else if (key == "backoff_max_ms") c.backoff_max_ms = v.get<std::int64_t>();
      else if (key == "retry_budget") c.retry_budget = v.get<int>();
      else if (key == "io_timeout_ms") c.io_timeout_ms = v.get<int>();
      else if (key == "queue_capacity") c.queue_capacity = v.get<std::size_t>();
      else if (key == "stop_after_cycles") c.stop_after_cycles = v.get<std::int64_t>();
      else if (key == "roi_mode") {
        const auto m = parse_roi_mode(v.get<std::string>());
        if (!m) throw InputError("roi_mode must be detect, fixed or none");
        c.roi_mode = *m;
      } else {
        throw InputError("unknown gateway config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::type_error& e) {
    throw InputError(std::string("gateway config has a wrongly typed value: ") + e.what());
  }
  c.validate();
  return c;
}

std::string GatewayConfig::to_json() const {
  nlohmann::ordered_json j;
  j["plc_host"] = plc_host;
  j["plc_port"] = plc_port;
  j["poll_interval_ms"] = poll_interval_ms;
  j["backoff_initial_ms"] = backoff_initial_ms;
  j["backoff_max_ms"] = backoff_max_ms;
  j["retry_budget"] = retry_budget;
  j["io_timeout_ms"] = io_timeout_ms;
  j["queue_capacity"] = queue_capacity;
  j["stop_after_cycles"] = stop_after_cycles;
  j["roi_mode"] = std::string(roi_mode_name(roi_mode));
  return j.dump(2);
}

SynthFrameSource::SynthFrameSource(std::uint64_t seed, RenderOptions opts,
                                   std::array<double, kNumClasses> class_fractions)
    : seed_(seed), opts_(std::move(opts)), fractions_(class_fractions) {
  double total = 0.0;
  for (double f : fractions_) {
    if (!(f >= 0.0)) throw InputError("class fractions must be non-negative");
    total += f;
  }
  if (!(total > 0.0)) throw InputError("class fractions must not all be zero");
}

AnomalyClass SynthFrameSource::label_for(std::int64_t cycle_index, CycleState state) const {
  Rng rng(derive_seed(seed_, kLabelStream, static_cast<std::uint64_t>(cycle_index),
                      static_cast<std::uint64_t>(state.value())));
  double total = 0.0;
  for (double f : fractions_) total += f;
  double u = rng.uniform() * total;
  for (int c = 0; c < kNumClasses; ++c) {
    if (u < fractions_[c]) return class_from_index(c);
    u -= fractions_[c];
  }
  for (int c = kNumClasses - 1; c >= 0; --c)
    if (fractions_[c] > 0.0) return class_from_index(c);
  return AnomalyClass::NoAnomaly;
}

ImageRaster SynthFrameSource::capture(std::int64_t cycle_index, CycleState state) {
  return render_frame(cycle_index, state, label_for(cycle_index, state), seed_, opts_).image;
}

std::optional<CaptureTrigger::Capture> CaptureTrigger::observe(CycleState state) {
  if (!prev_) {
    prev_ = state;
    return std::nullopt;
  }
  if (state.value() < prev_->value()) {
    ++cycle_index_;
    captured_ = 0;
  }
  const bool entered = state != *prev_;
  prev_ = state;
  if (!entered || (state.value() != 4 && state.value() != 9)) return std::nullopt;
  const unsigned bit = 1u << state.value();
  if (captured_ & bit) return std::nullopt;
  captured_ |= bit;
  return Capture{cycle_index_, state};
}

GatewayResult run_gateway(const GatewayConfig& config, FrameSource& frames, const Model& model,
                          const OntologySpec& ontology, const std::filesystem::path& log_path,
                          const std::atomic<bool>* stop) {
  config.validate();
  LogWriter writer(log_path);
  const ModelSpec& spec = model.spec();

  BoundedQueue<Trigger> triggers(config.queue_capacity);
  BoundedQueue<LogItem> outputs(config.queue_capacity);
  GatewayResult result;

  // Setup that can take a while stays off the polling path.
  std::thread inference([&] {
    const std::string mid = model_id(model);
    const InputPreparer prep(config.roi_mode, spec.in_width, spec.in_height);
    while (auto t = triggers.pop()) {
      try {
        const ImageRaster frame = frames.capture(t->cycle_index, t->state);
        const PreparedInput in = prep.prepare(frame, t->state);
        const Tensor probs = softmax(forward(model, image_to_batch(model, in.image)));
        DetectionRecord r;
        r.ts_ms = t->server_time_ms;
        r.cycle_index = t->cycle_index;
        r.cycle_state = t->state;
        std::copy_n(probs.data.begin(), kNumClasses, r.probs.begin());
        r.predicted_class = class_from_index(argmax(r.probs));
        r.bbox = in.bbox;
        r.verdict = verify(t->state, r.predicted_class, ontology);
        r.model_id = mid;
        r.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - t->received).count();
        outputs.push(std::move(r));
      } catch (const std::exception& e) {
        outputs.push(ErrorRecord{t->server_time_ms, t->cycle_index, t->state, e.what()});
      }
    }
    outputs.close();
  });

  std::thread log_stage([&] {
    while (auto item = outputs.pop()) {
      std::visit([&](const auto& rec) { writer.append(rec); }, *item);
      if (std::holds_alternative<DetectionRecord>(*item)) ++result.records;
      else ++result.errors;
    }
  });

  CaptureTrigger trigger;
  int failures = 0;
  std::int64_t backoff = config.backoff_initial_ms;
  bool done = false;
  bool ever_connected = false;
  while (!done && !stop_requested(stop)) {
    try {
      TagSubscription sub(config.plc_host, config.plc_port, kCycleStateTag, config.poll_interval_ms,
                          config.io_timeout_ms);
      if (ever_connected) ++result.reconnects;
      ever_connected = true;
      while (!stop_requested(stop)) {
        const TagReading reading = sub.next();
        const auto received = Clock::now();
        failures = 0;
        backoff = config.backoff_initial_ms;
        const auto cap = trigger.observe(reading.value);
        if (config.stop_after_cycles > 0 && trigger.cycle_index() > config.stop_after_cycles) {
          done = true;
          break;
        }
        if (cap) triggers.push(Trigger{cap->cycle_index, cap->state, reading.server_time_ms, received});
      }
    } catch (const Error& e) {
      const bool transport = dynamic_cast<const TransportError*>(&e) != nullptr;
      const bool protocol = dynamic_cast<const ProtocolError*>(&e) != nullptr;
      if (!transport && !protocol) {
        result.exit_code = 2;
        result.fatal_message = e.what();
        break;
      }
      if (++failures > config.retry_budget) {
        result.exit_code = 2;
        result.fatal_message = "PLC unavailable after " + std::to_string(config.retry_budget) +
                               " attempts: " + e.what();
        break;
      }
      sleep_interruptible(backoff, stop);
      backoff = std::min(backoff * 2, config.backoff_max_ms);
    }
  }

  triggers.close();
  inference.join();
  log_stage.join();
  return result;
}

}  // namespace assemai
