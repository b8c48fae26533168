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

// Plain-text run configuration: one `key = value` per line, `#` comments.
//
// RunConfig keys: topic_id, run_id, seed, adapter_seed, n_prom, n_deb,
// t_watch, n_q, t_wait, f_q, agents, collect_min, clock_mode,
// reset_probe_min_overlap. Durations accept a unit suffix (s, m, h) and
// default to seconds.
//
// Simulator keys: sim.lambda, sim.w, sim.w_search, sim.noise_eps,
// sim.rec_count.
//
// Input files: catalog, topics, seed_sets. Relative paths resolve against
// the directory of the config file.

#ifndef BUBBLE_AUDIT_CONFIG_FILE_H_
#define BUBBLE_AUDIT_CONFIG_FILE_H_

#include <chrono>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "bubble_audit/run_config.h"
#include "bubble_audit/sim_platform.h"

namespace bubble_audit {

struct ConfigFile {
  RunConfig run;
  SimParams sim;
  std::string catalog_path;
  std::string topics_path;
  std::string seed_sets_path;
};

absl::StatusOr<std::chrono::seconds> ParseDuration(std::string_view text);

// `base_dir` anchors relative input paths; empty leaves them as written.
absl::StatusOr<ConfigFile> ParseConfigFile(std::string_view text,
                                           const std::string& base_dir = "");
absl::StatusOr<ConfigFile> LoadConfigFile(const std::string& path);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_CONFIG_FILE_H_
