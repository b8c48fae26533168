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

// The four-phase sockpuppet protocol.
//
//   Phase 0  login, consent, baseline homepage snapshot, baseline search phase
//   Phase 1  watch a seeded permutation of the promoting seed videos
//   Phase 2  watch a seeded permutation of the debunking seed videos
//   Phase 3  clear the watch history and probe that it is clean
//
// Every watch saves the sidebar recommendations and then one homepage
// snapshot. A search phase runs after every f_q-th watch attempt, counted
// across phases 1 and 2, so watch ordinals 2, 4, ... are followed by one.

#ifndef BUBBLE_AUDIT_SCENARIO_H_
#define BUBBLE_AUDIT_SCENARIO_H_

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bubble_audit/clock.h"
#include "bubble_audit/domain.h"
#include "bubble_audit/observation_store.h"
#include "bubble_audit/platform.h"
#include "bubble_audit/random.h"
#include "bubble_audit/run_config.h"

namespace bubble_audit {

struct ScenarioInputs {
  RunConfig config;
  Topic topic;
  SeedSet promoting;
  SeedSet debunking;
};

// Checks the config, the topic's query count and both seed sets.
absl::Status ValidateScenarioInputs(const ScenarioInputs& inputs);

struct ScenarioOptions {
  // Recorded in the manifest.
  std::string adapter_name = "sim";
  std::map<std::string, std::string> adapter_params;
  // One clock per agent. Defaults to MakeClock(config.clock_mode).
  std::function<std::unique_ptr<Clock>()> clock_factory;
  // ISO-8601 wall time for the manifest. Defaults to the system clock.
  std::function<std::string()> wall_time;
};

struct AgentState {
  std::string agent_id;
  std::string account_id;
  Phase phase = Phase::kInit;
  int watch_ordinal = 0;
  // Watch attempts since the last search phase.
  int watches_since_search = 0;
  Rng rng{0};
};

// "agent-07" style id; width grows past 99 agents.
std::string AgentId(int index, int agents);

// One sockpuppet. Owns its adapter session and clock; only the store and the
// abort flag are shared with other agents.
class Agent {
 public:
  Agent(const ScenarioInputs& inputs, std::string run_id, int index,
        std::unique_ptr<PlatformAdapter> adapter, std::unique_ptr<Clock> clock,
        ObservationStore& store, std::atomic<bool>& abort);

  // Login, consent and baseline homepage snapshot.
  absl::Status Initialize();
  // Runs every query once in seeded order, waiting t_wait after each. Query
  // failures become gaps. Fails only when the store fails.
  absl::Status SearchPhase();
  // Watches for min(t_watch, length), then saves recommendations and the
  // homepage. An unavailable video is skipped and recorded. Fails on store
  // failure or a platform error that leaves the session unusable.
  absl::Status WatchStep(const SeedVideo& video);
  // Resets the history and compares a post-reset probe search against the
  // baseline results of the first query. Quarantines the account when the
  // reset fails or the probe overlap is below the configured minimum.
  void Teardown();

  // Full protocol, including teardown after an early stop.
  AgentStatus Run();

  const AgentState& state() const { return state_; }
  const AgentStatus& status() const { return status_; }

 private:
  absl::Status SaveList(ListKind kind, const std::string& source,
                        const std::vector<ListEntry>& entries);
  absl::Status SaveHomepage();
  absl::Status RecordStoreFailure(absl::Status status);
  void AddGap(const std::string& kind, const std::string& source,
              const absl::Status& error);
  bool Aborted() const { return abort_.load(std::memory_order_acquire); }

  const ScenarioInputs& inputs_;
  const RunConfig& config_;
  std::string run_id_;
  std::unique_ptr<PlatformAdapter> adapter_;
  std::unique_ptr<Clock> clock_;
  ObservationStore& store_;
  std::atomic<bool>& abort_;

  AgentState state_;
  AgentStatus status_;
  std::vector<std::string> baseline_probe_;
  bool baseline_probe_seen_ = false;
  bool store_failed_ = false;
  bool logged_in_ = false;
};

// Runs all agents concurrently, one thread each. Returns the manifest, which
// is marked partial when any agent stopped early, was quarantined, or broke
// an accounting identity. Errors are reserved for invalid inputs.
absl::StatusOr<RunManifest> RunScenario(const ScenarioInputs& inputs,
                                        const AdapterFactory& factory,
                                        ObservationStore& store,
                                        const ScenarioOptions& options = {});

// Per-agent accounting a complete agent must match exactly.
AgentAccounting ExpectedAgentAccounting(const RunConfig& config);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_SCENARIO_H_
