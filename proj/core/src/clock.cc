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

#include "bubble_audit/clock.h"

#include <thread>

namespace bubble_audit {

RealClock::RealClock() : epoch_(std::chrono::steady_clock::now()) {}

std::chrono::seconds RealClock::Now() const {
  return std::chrono::duration_cast<std::chrono::seconds>(
      std::chrono::steady_clock::now() - epoch_);
}

void RealClock::Sleep(std::chrono::seconds duration) {
  std::this_thread::sleep_for(duration);
}

std::unique_ptr<Clock> MakeClock(ClockMode mode) {
  if (mode == ClockMode::kVirtual) return std::make_unique<VirtualClock>();
  return std::make_unique<RealClock>();
}

}  // namespace bubble_audit
