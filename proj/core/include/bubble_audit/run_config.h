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

#ifndef BUBBLE_AUDIT_RUN_CONFIG_H_
#define BUBBLE_AUDIT_RUN_CONFIG_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"

namespace bubble_audit {

enum class ClockMode { kVirtual, kReal };

std::string_view ClockModeName(ClockMode mode);

// Process parameters of one audit run. Defaults are the parameters used by
// the original YouTube audit.
struct RunConfig {
  std::string topic_id;
  // Empty means "<topic_id>-seed<seed>".
  std::string run_id;
  uint64_t seed = 0;
  // Seed handed to simulated platforms; defaults to `seed`.
  std::optional<uint64_t> adapter_seed;

  int n_prom = 40;
  int n_deb = 40;
  std::chrono::seconds t_watch = std::chrono::minutes(30);
  int n_q = 5;
  std::chrono::seconds t_wait = std::chrono::minutes(20);
  int f_q = 2;
  int agents = 10;
  int collect_min = 20;
  ClockMode clock_mode = ClockMode::kVirtual;

  // Minimum Jaccard overlap between the pre-run and post-reset probe
  // searches for the reset to count as clean.
  double reset_probe_min_overlap = 0.5;

  absl::Status Validate() const;

  std::string EffectiveRunId() const;
  uint64_t EffectiveAdapterSeed() const { return adapter_seed.value_or(seed); }

  int TotalWatches() const { return n_prom + n_deb; }
  // Baseline search phase plus one after every f_q-th watch.
  int ExpectedSearchPhases() const { return 1 + TotalWatches() / f_q; }
  int ExpectedQueryYields() const { return n_q * ExpectedSearchPhases(); }
  // Baseline snapshot plus one per watch.
  int ExpectedHomepageSnapshots() const { return 1 + TotalWatches(); }
};

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_RUN_CONFIG_H_
