#pragma once

#include <chrono>
#include <cstdint>
#include <functional>

namespace fyp {

// Milliseconds since the Unix epoch.
using ClockFn = std::function<std::int64_t()>;

inline std::int64_t WallClockMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// A clock that only moves when told to. Agents advance it by simulated
// dwell times so that timestamps in recorded traffic are reproducible.
// Not thread-safe; each agent owns one.
class LogicalClock {
 public:
  explicit LogicalClock(std::int64_t start_ms = 0) : now_ms_(start_ms) {}

  std::int64_t Now() const { return now_ms_; }
  void Advance(std::int64_t ms) { now_ms_ += ms; }
  ClockFn AsFunction() {
    return [this] { return now_ms_; };
  }

 private:
  std::int64_t now_ms_;
};

}  // namespace fyp
