#include "assemai/timing.hpp"

#include <algorithm>

namespace assemai {

CycleTiming CycleTiming::uniform(std::int64_t cycle_period_ms) {
  if (cycle_period_ms < kNumCycleStates) {
    throw InputError("cycle period must be at least 21 ms");
  }
  std::vector<std::int64_t> b(kNumCycleStates + 1);
  for (int i = 0; i <= kNumCycleStates; ++i) b[i] = i * cycle_period_ms / kNumCycleStates;
  return CycleTiming(std::move(b));
}

CycleTiming::CycleTiming(std::vector<std::int64_t> boundaries, std::pair<double, double> state9_subwindow)
    : boundaries_(std::move(boundaries)), state9_subwindow_(state9_subwindow) {
  if (boundaries_.size() != kNumCycleStates + 1) {
    throw InputError("cycle timing needs 22 window boundaries, got " + std::to_string(boundaries_.size()));
  }
  if (boundaries_.front() != 0) throw InputError("first state window must start at 0");
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (boundaries_[i] <= boundaries_[i - 1]) {
      throw InputError("state window " + std::to_string(i) + " is empty or out of order");
    }
  }
  const auto [a, b] = state9_subwindow_;
  if (!(0.0 <= a && a < b && b <= 1.0)) throw InputError("state 9 subwindow must satisfy 0 <= a < b <= 1");
}

StatePosition map_timestamp_to_state(std::int64_t timestamp_ms, const CycleTiming& timing) {
  if (timestamp_ms < 0) throw InputError("timestamp must be non-negative");
  const std::int64_t period = timing.cycle_period_ms();
  const std::int64_t phase = timestamp_ms % period;
  const auto& b = timing.boundaries();
  // First boundary strictly greater than phase closes the containing window.
  const auto it = std::upper_bound(b.begin(), b.end(), phase);
  const int state = static_cast<int>(it - b.begin());
  const double begin = static_cast<double>(b[state - 1]);
  const double width = static_cast<double>(b[state] - b[state - 1]);
  return {timestamp_ms / period + 1, CycleState(state), (static_cast<double>(phase) - begin) / width};
}

}  // namespace assemai
