#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "assemai/core.hpp"

namespace assemai {

/// Per-cycle state schedule: 21 contiguous half-open windows covering
/// [0, cycle_period_ms), plus the retained fraction of state 9's window.
class CycleTiming {
 public:
  /// 21 equal windows (integer boundaries i*period/21).
  static CycleTiming uniform(std::int64_t cycle_period_ms);

  /// `boundaries` holds 22 strictly increasing values from 0 to the period.
  CycleTiming(std::vector<std::int64_t> boundaries, std::pair<double, double> state9_subwindow = {0.0, 1.0});

  std::int64_t cycle_period_ms() const noexcept { return boundaries_.back(); }
  std::int64_t window_begin(CycleState s) const noexcept { return boundaries_[s.value() - 1]; }
  std::int64_t window_end(CycleState s) const noexcept { return boundaries_[s.value()]; }
  const std::vector<std::int64_t>& boundaries() const noexcept { return boundaries_; }
  std::pair<double, double> state9_subwindow() const noexcept { return state9_subwindow_; }

 private:
  std::vector<std::int64_t> boundaries_;
  std::pair<double, double> state9_subwindow_;
};

struct StatePosition {
  std::int64_t cycle_index;  // 1-based
  CycleState state;
  double window_fraction;    // position inside the state's window, in [0,1)
};

/// cycle_index = floor(t / period) + 1; state = window containing t mod period.
/// Throws InputError for negative timestamps.
StatePosition map_timestamp_to_state(std::int64_t timestamp_ms, const CycleTiming& timing);

}  // namespace assemai
