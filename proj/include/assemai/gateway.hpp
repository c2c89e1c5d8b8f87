#pragma once

// Inference gateway: follows the PLC cycle-state tag, captures a frame on
// each entry into state 4 or 9, classifies it and appends a record to the
// detection log.

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "assemai/detlog.hpp"
#include "assemai/fftag.hpp"
#include "assemai/nnet.hpp"
#include "assemai/ontology.hpp"
#include "assemai/pipeline.hpp"
#include "assemai/synthgen.hpp"

namespace assemai {

/// FIFO with a fixed capacity. push blocks while full; pop blocks while
/// empty and returns nullopt once the queue is closed and drained.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  /// Returns false if the queue was closed.
  bool push(T value) {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
    if (closed_) return false;
    items_.push_back(std::move(value));
    not_empty_.notify_one();
    return true;
  }

  std::optional<T> pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T v = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return v;
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  bool closed_ = false;
};

struct GatewayConfig {
  std::string plc_host = "127.0.0.1";
  std::uint16_t plc_port = kFftagDefaultPort;
  std::int64_t poll_interval_ms = 20;
  std::int64_t backoff_initial_ms = 100;
  std::int64_t backoff_max_ms = 5000;
  int retry_budget = 10;
  int io_timeout_ms = 2000;
  std::size_t queue_capacity = 8;
  /// Stop once this many cycles have been observed; 0 runs until stopped.
  std::int64_t stop_after_cycles = 0;
  RoiMode roi_mode = RoiMode::Detect;

  void validate() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static GatewayConfig from_json(const std::string& text);
  std::string to_json() const;
};

/// Camera stand-in.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual ImageRaster capture(std::int64_t cycle_index, CycleState state) = 0;
};

/// Renders synthetic frames. The label of each (cycle, state) is drawn from
/// `class_fractions` with a stream derived from the seed, so it is fixed
/// before the gateway asks for the frame.
class SynthFrameSource : public FrameSource {
 public:
  explicit SynthFrameSource(std::uint64_t seed, RenderOptions opts = {},
                            std::array<double, kNumClasses> class_fractions = kDefaultClassFractions);

  ImageRaster capture(std::int64_t cycle_index, CycleState state) override;
  AnomalyClass label_for(std::int64_t cycle_index, CycleState state) const;

 private:
  std::uint64_t seed_;
  RenderOptions opts_;
  std::array<double, kNumClasses> fractions_;
};

struct GatewayResult {
  int exit_code = 0;  // 0 clean stop, 2 PLC unavailable beyond the retry budget
  std::int64_t records = 0;
  std::int64_t errors = 0;
  std::int64_t reconnects = 0;
  std::string fatal_message;
};

/// Runs until `stop` is set, stop_after_cycles is reached, or the PLC stays
/// unreachable for retry_budget consecutive attempts. Queued work is drained
/// and written before returning.
GatewayResult run_gateway(const GatewayConfig& config, FrameSource& frames, const Model& model,
                          const OntologySpec& ontology, const std::filesystem::path& log_path,
                          const std::atomic<bool>* stop = nullptr);

/// Edge detector over successive tag values. Returns the (cycle, state) to
/// capture for this reading, if any. The first reading only primes it.
class CaptureTrigger {
 public:
  struct Capture {
    std::int64_t cycle_index;
    CycleState state;
  };

  std::optional<Capture> observe(CycleState state);
  std::int64_t cycle_index() const noexcept { return cycle_index_; }

 private:
  std::optional<CycleState> prev_;
  std::int64_t cycle_index_ = 1;
  unsigned captured_ = 0;  // bit per state captured in the current cycle
};

}  // namespace assemai
