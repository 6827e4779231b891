// SPDX-License-Identifier: Apache-2.0
#include "amafia/clock.hpp"

#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace amafia {

std::string format_hms(TimePoint t, std::chrono::minutes utc_offset) {
  using namespace std::chrono;
  auto shifted = t + duration_cast<Duration>(utc_offset);
  auto day = floor<days>(shifted);
  hh_mm_ss hms{floor<seconds>(shifted - day)};
  char buf[16];
  std::snprintf(buf, sizeof buf, "[%02d:%02d:%02d]", static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
  return buf;
}

std::chrono::minutes local_utc_offset(TimePoint at) {
  std::time_t tt = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::time_point{at.time_since_epoch()});
  std::tm local{};
  localtime_r(&tt, &local);
  return std::chrono::minutes{local.tm_gmtoff / 60};
}

// ---- SystemClock ----

SystemClock::SystemClock() : worker_([this](std::stop_token st) { run(st); }) {}

SystemClock::~SystemClock() {
  worker_.request_stop();
  cv_.notify_all();
}

TimePoint SystemClock::now() const {
  return std::chrono::floor<Duration>(std::chrono::system_clock::now());
}

bool SystemClock::sleep_until(TimePoint deadline, std::stop_token stop) {
  std::mutex local;
  std::condition_variable_any cv;
  std::unique_lock lock(local);
  auto until = std::chrono::system_clock::time_point{deadline.time_since_epoch()};
  return !cv.wait_until(lock, stop, until, [] { return false; }) && !stop.stop_requested();
}

TimerId SystemClock::schedule_at(TimePoint when, std::function<void()> fn) {
  std::lock_guard lock(mu_);
  TimerId id = next_id_++;
  timers_.emplace(std::pair{when, id}, std::move(fn));
  cv_.notify_all();
  return id;
}

void SystemClock::cancel(TimerId id) {
  std::lock_guard lock(mu_);
  for (auto it = timers_.begin(); it != timers_.end(); ++it) {
    if (it->first.second == id) {
      timers_.erase(it);
      return;
    }
  }
}

void SystemClock::run(std::stop_token stop) {
  std::unique_lock lock(mu_);
  while (!stop.stop_requested()) {
    if (timers_.empty()) {
      cv_.wait(lock, stop, [this] { return !timers_.empty(); });
      continue;
    }
    auto due = timers_.begin()->first.first;
    if (now() < due) {
      auto until = std::chrono::system_clock::time_point{due.time_since_epoch()};
      cv_.wait_until(lock, stop, until, [this, due] {
        return !timers_.empty() && timers_.begin()->first.first < due;
      });
      continue;
    }
    auto fn = std::move(timers_.begin()->second);
    timers_.erase(timers_.begin());
    lock.unlock();
    fn();
    lock.lock();
  }
}

// ---- VirtualClock ----

VirtualClock::VirtualClock(TimePoint start) : now_(start) {}

bool VirtualClock::sleep_until(TimePoint deadline, std::stop_token stop) {
  if (in_dispatch_) throw std::logic_error("VirtualClock: sleep inside a timer callback");
  if (deadline > now_) {
    run_due(deadline);
    now_ = deadline;
  } else {
    run_due(now_);
  }
  return !stop.stop_requested();
}

TimerId VirtualClock::schedule_at(TimePoint when, std::function<void()> fn) {
  TimerId id = next_id_++;
  timers_.emplace(std::pair{std::max(when, now_), id}, std::move(fn));
  return id;
}

void VirtualClock::cancel(TimerId id) {
  for (auto it = timers_.begin(); it != timers_.end(); ++it) {
    if (it->first.second == id) {
      timers_.erase(it);
      return;
    }
  }
}

bool VirtualClock::advance_to_next() {
  if (in_dispatch_) throw std::logic_error("VirtualClock: advance inside a timer callback");
  if (timers_.empty()) return false;
  run_due(timers_.begin()->first.first);
  return true;
}

void VirtualClock::run_due(TimePoint upto) {
  while (!timers_.empty() && timers_.begin()->first.first <= upto) {
    auto node = timers_.extract(timers_.begin());
    now_ = node.key().first;
    in_dispatch_ = true;
    try {
      node.mapped()();
    } catch (...) {
      in_dispatch_ = false;
      throw;
    }
    in_dispatch_ = false;
  }
}

}  // namespace amafia
