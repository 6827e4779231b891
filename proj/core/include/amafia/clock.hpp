// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stop_token>
#include <string>
#include <thread>

namespace amafia {

using Duration = std::chrono::milliseconds;
using TimePoint = std::chrono::sys_time<Duration>;

/// Milliseconds since the unix epoch, as stored in logs and frames.
inline std::int64_t to_millis(TimePoint t) { return t.time_since_epoch().count(); }
inline TimePoint from_millis(std::int64_t ms) { return TimePoint{Duration{ms}}; }

/// `[HH:MM:SS]` rendering of a timestamp shifted by a fixed UTC offset.
std::string format_hms(TimePoint t, std::chrono::minutes utc_offset);
/// Offset of the process' local timezone from UTC at `at`.
std::chrono::minutes local_utc_offset(TimePoint at);

using TimerId = std::uint64_t;

/// Time source plus one-shot timers. Game sessions, agents and tests all go
/// through this interface so a whole game can run on virtual time.
class Clock {
 public:
  virtual ~Clock() = default;

  virtual TimePoint now() const = 0;

  /// Blocks until `deadline` or until `stop` is requested. Returns false if
  /// woken by the stop request.
  virtual bool sleep_until(TimePoint deadline, std::stop_token stop = {}) = 0;
  bool sleep_for(Duration d, std::stop_token stop = {}) { return sleep_until(now() + d, stop); }

  virtual TimerId schedule_at(TimePoint when, std::function<void()> fn) = 0;
  virtual void cancel(TimerId id) = 0;
};

/// Wall clock. Timers fire on a dedicated worker thread.
class SystemClock final : public Clock {
 public:
  SystemClock();
  ~SystemClock() override;
  SystemClock(const SystemClock&) = delete;
  SystemClock& operator=(const SystemClock&) = delete;

  TimePoint now() const override;
  bool sleep_until(TimePoint deadline, std::stop_token stop = {}) override;
  TimerId schedule_at(TimePoint when, std::function<void()> fn) override;
  void cancel(TimerId id) override;

 private:
  void run(std::stop_token stop);

  std::mutex mu_;
  std::condition_variable_any cv_;
  std::map<std::pair<TimePoint, TimerId>, std::function<void()>> timers_;
  TimerId next_id_ = 1;
  std::jthread worker_;
};

/// Deterministic discrete-event clock. Time only moves inside sleep_until /
/// advance_*; due timers run in (time, schedule order) before time passes
/// them. Not thread-safe: one driver thread owns it.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(TimePoint start = from_millis(1'700'000'000'000));

  TimePoint now() const override { return now_; }
  bool sleep_until(TimePoint deadline, std::stop_token stop = {}) override;
  TimerId schedule_at(TimePoint when, std::function<void()> fn) override;
  void cancel(TimerId id) override;

  /// Jumps to the earliest pending timer and runs everything due then.
  /// Returns false when nothing is pending.
  bool advance_to_next();
  std::size_t pending() const { return timers_.size(); }

 private:
  void run_due(TimePoint upto);

  TimePoint now_;
  std::map<std::pair<TimePoint, TimerId>, std::function<void()>> timers_;
  TimerId next_id_ = 1;
  bool in_dispatch_ = false;
};

}  // namespace amafia
