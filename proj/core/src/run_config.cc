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

#include "bubble_audit/run_config.h"

namespace bubble_audit {

std::string_view ClockModeName(ClockMode mode) {
  return mode == ClockMode::kVirtual ? "virtual" : "real";
}

absl::Status RunConfig::Validate() const {
  if (topic_id.empty()) return absl::InvalidArgumentError("topic_id is empty");
  struct Count {
    const char* name;
    int value;
  };
  for (const Count& c : {Count{"n_prom", n_prom}, Count{"n_deb", n_deb},
                         Count{"n_q", n_q}, Count{"f_q", f_q},
                         Count{"agents", agents},
                         Count{"collect_min", collect_min}}) {
    if (c.value < 1) {
      return absl::InvalidArgumentError(std::string(c.name) +
                                        " must be >= 1, got " +
                                        std::to_string(c.value));
    }
  }
  if (t_watch.count() <= 0) {
    return absl::InvalidArgumentError("t_watch must be positive");
  }
  if (t_wait.count() <= 0) {
    return absl::InvalidArgumentError("t_wait must be positive");
  }
  if (reset_probe_min_overlap < 0.0 || reset_probe_min_overlap > 1.0) {
    return absl::InvalidArgumentError(
        "reset_probe_min_overlap must be in [0, 1]");
  }
  return absl::OkStatus();
}

std::string RunConfig::EffectiveRunId() const {
  if (!run_id.empty()) return run_id;
  return topic_id + "-seed" + std::to_string(seed);
}

}  // namespace bubble_audit
