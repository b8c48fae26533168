// Copyright 2026 The Bubble Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BUBBLE_AUDIT_CLOCK_H_
#define BUBBLE_AUDIT_CLOCK_H_

#include <atomic>
#include <chrono>
#include <memory>

#include "bubble_audit/run_config.h"

namespace bubble_audit {

// Time source for waits and timestamps. Times are offsets from the clock's
// own epoch (construction), so virtual logs replay byte-identically.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::seconds Now() const = 0;
  virtual void Sleep(std::chrono::seconds duration) = 0;
};

// Sleeping advances time instantly. Thread-safe.
class VirtualClock : public Clock {
 public:
  VirtualClock() = default;
  explicit VirtualClock(std::chrono::seconds start) : now_(start.count()) {}

  std::chrono::seconds Now() const override {
    return std::chrono::seconds(now_.load(std::memory_order_acquire));
  }
  void Sleep(std::chrono::seconds duration) override { Advance(duration); }
  void Advance(std::chrono::seconds duration) {
    now_.fetch_add(duration.count(), std::memory_order_acq_rel);
  }

 private:
  std::atomic<int64_t> now_{0};
};

class RealClock : public Clock {
 public:
  RealClock();
  std::chrono::seconds Now() const override;
  void Sleep(std::chrono::seconds duration) override;

 private:
  std::chrono::steady_clock::time_point epoch_;
};

std::unique_ptr<Clock> MakeClock(ClockMode mode);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_CLOCK_H_
