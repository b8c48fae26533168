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

#include "bubble_audit/scenario.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <thread>
#include <utility>

#include "bubble_audit/metrics.h"

namespace bubble_audit {

namespace {

std::string SystemWallTime() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> Ids(const std::vector<ListEntry>& entries) {
  std::vector<std::string> ids;
  ids.reserve(entries.size());
  for (const ListEntry& e : entries) ids.push_back(e.video_id);
  return ids;
}

std::vector<std::string> SeedIds(const SeedSet& set) {
  std::vector<std::string> ids;
  ids.reserve(set.videos.size());
  for (const SeedVideo& v : set.videos) ids.push_back(v.video_id);
  return ids;
}

}  // namespace

absl::Status ValidateScenarioInputs(const ScenarioInputs& inputs) {
  if (absl::Status s = inputs.config.Validate(); !s.ok()) return s;
  if (inputs.topic.id != inputs.config.topic_id) {
    return absl::InvalidArgumentError("topic '" + inputs.topic.id +
                                      "' does not match config topic '" +
                                      inputs.config.topic_id + "'");
  }
  if (absl::Status s = ValidateTopic(inputs.topic, inputs.config.n_q);
      !s.ok()) {
    return s;
  }
  const std::pair<const SeedSet*, SeedKind> sets[] = {
      {&inputs.promoting, SeedKind::kPromoting},
      {&inputs.debunking, SeedKind::kDebunking}};
  for (const auto& [set, kind] : sets) {
    if (set->kind != kind || set->topic_id != inputs.topic.id) {
      return absl::InvalidArgumentError(
          std::string("expected the ") + std::string(SeedKindName(kind)) +
          " seed set of topic '" + inputs.topic.id + "'");
    }
    SeedSetReport report = ValidateSeedSet(*set, inputs.config);
    if (!report.ok()) {
      return absl::InvalidArgumentError(std::string(SeedKindName(kind)) +
                                        " seed set: " + report.Summary());
    }
  }
  return absl::OkStatus();
}

std::string AgentId(int index, int agents) {
  const size_t width = std::max<size_t>(2, std::to_string(agents - 1).size());
  std::string digits = std::to_string(index);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "agent-" + digits;
}

AgentAccounting ExpectedAgentAccounting(const RunConfig& config) {
  AgentAccounting a;
  a.watch_attempts = config.TotalWatches();
  a.watches = config.TotalWatches();
  a.search_phases = config.ExpectedSearchPhases();
  a.query_attempts = config.ExpectedQueryYields();
  a.query_yields = config.ExpectedQueryYields();
  a.homepage_snapshots = config.ExpectedHomepageSnapshots();
  a.recommendation_lists = config.TotalWatches();
  return a;
}

Agent::Agent(const ScenarioInputs& inputs, std::string run_id, int index,
             std::unique_ptr<PlatformAdapter> adapter,
             std::unique_ptr<Clock> clock, ObservationStore& store,
             std::atomic<bool>& abort)
    : inputs_(inputs),
      config_(inputs.config),
      run_id_(std::move(run_id)),
      adapter_(std::move(adapter)),
      clock_(std::move(clock)),
      store_(store),
      abort_(abort) {
  state_.agent_id = AgentId(index, config_.agents);
  state_.account_id = run_id_ + "-" + state_.agent_id;
  const uint64_t seed =
      DeriveSeed(config_.seed, static_cast<uint64_t>(index) + 1);
  state_.rng = Rng(seed);

  status_.agent_id = state_.agent_id;
  status_.account_id = state_.account_id;
  status_.agent_seed = seed;
  // Both permutations are drawn up front so they do not depend on how the
  // run goes.
  status_.promoting_order = SeedIds(inputs_.promoting);
  status_.debunking_order = SeedIds(inputs_.debunking);
  state_.rng.Shuffle(std::span<std::string>(status_.promoting_order));
  state_.rng.Shuffle(std::span<std::string>(status_.debunking_order));
}

void Agent::AddGap(const std::string& kind, const std::string& source,
                   const absl::Status& error) {
  status_.gaps.push_back(GapRecord{kind, state_.watch_ordinal, source,
                                   error.ToString()});
}

absl::Status Agent::RecordStoreFailure(absl::Status status) {
  store_failed_ = true;
  abort_.store(true, std::memory_order_release);
  AddGap("store", "", status);
  return status;
}

absl::Status Agent::SaveList(ListKind kind, const std::string& source,
                             const std::vector<ListEntry>& entries) {
  Observation obs;
  obs.run_id = run_id_;
  obs.agent_id = state_.agent_id;
  obs.phase = state_.phase;
  obs.watch_ordinal = state_.watch_ordinal;
  obs.list_kind = kind;
  obs.source = source;
  obs.virtual_ts = clock_->Now();
  for (size_t i = 0; i < entries.size(); ++i) {
    obs.rank = static_cast<int>(i) + 1;
    obs.video_id = entries[i].video_id;
    obs.warning_flag = entries[i].warning;
    if (absl::Status s = store_.Append(obs); !s.ok()) {
      return RecordStoreFailure(std::move(s));
    }
  }
  if (kind != ListKind::kRecommendation &&
      static_cast<int>(entries.size()) < config_.collect_min) {
    ++status_.accounting.short_lists;
    AddGap("short_list", source,
           absl::OutOfRangeError(std::to_string(entries.size()) +
                                 " items, expected at least " +
                                 std::to_string(config_.collect_min)));
  }
  return absl::OkStatus();
}

absl::Status Agent::SaveHomepage() {
  absl::StatusOr<std::vector<ListEntry>> home = adapter_->Homepage();
  if (!home.ok()) {
    AddGap("homepage", std::string(kHomepageSource), home.status());
    return absl::OkStatus();
  }
  if (absl::Status s =
          SaveList(ListKind::kHomepage, std::string(kHomepageSource), *home);
      !s.ok()) {
    return s;
  }
  ++status_.accounting.homepage_snapshots;
  return absl::OkStatus();
}

absl::Status Agent::Initialize() {
  Account account;
  account.id = state_.account_id;
  account.display_name = state_.agent_id;
  if (absl::Status s = adapter_->Login(account); !s.ok()) {
    AddGap("login", "", s);
    return s;
  }
  logged_in_ = true;
  if (absl::Status s = adapter_->AcceptConsent(); !s.ok()) {
    AddGap("consent", "", s);
    return s;
  }
  return SaveHomepage();
}

absl::Status Agent::SearchPhase() {
  std::vector<int> order(inputs_.topic.queries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  state_.rng.Shuffle(std::span<int>(order));
  ++status_.accounting.search_phases;
  state_.watches_since_search = 0;
  for (int qi : order) {
    if (Aborted()) return absl::AbortedError("run aborted");
    const std::string& query = inputs_.topic.queries[qi];
    ++status_.accounting.query_attempts;
    absl::StatusOr<std::vector<ListEntry>> results = adapter_->Search(query);
    if (!results.ok()) {
      AddGap("search", query, results.status());
    } else {
      if (absl::Status s = SaveList(ListKind::kSearch, query, *results);
          !s.ok()) {
        return s;
      }
      ++status_.accounting.query_yields;
      if (qi == 0 && state_.watch_ordinal == 0 && !baseline_probe_seen_) {
        baseline_probe_ = Ids(*results);
        baseline_probe_seen_ = true;
      }
    }
    clock_->Sleep(config_.t_wait);
  }
  return absl::OkStatus();
}

absl::Status Agent::WatchStep(const SeedVideo& video) {
  ++state_.watch_ordinal;
  ++state_.watches_since_search;
  ++status_.accounting.watch_attempts;

  absl::StatusOr<VideoInfo> info = adapter_->Lookup(video.video_id);
  if (!info.ok() && !absl::IsNotFound(info.status())) {
    AddGap("watch", video.video_id, info.status());
    return info.status();
  }
  if (!info.ok() || !info->available) {
    ++status_.accounting.skipped_videos;
    AddGap("watch", video.video_id,
           info.ok() ? absl::NotFoundError("video unavailable")
                     : info.status());
    return absl::OkStatus();
  }

  const std::chrono::seconds duration = std::min(config_.t_watch, info->length);
  if (absl::Status s = adapter_->Watch(video.video_id, duration); !s.ok()) {
    if (absl::IsNotFound(s)) {
      ++status_.accounting.skipped_videos;
      AddGap("watch", video.video_id, s);
      return absl::OkStatus();
    }
    AddGap("watch", video.video_id, s);
    return s;
  }
  clock_->Sleep(duration);
  ++status_.accounting.watches;

  absl::StatusOr<std::vector<ListEntry>> recs =
      adapter_->RecommendationsCurrent();
  if (!recs.ok()) {
    AddGap("recommendation", video.video_id, recs.status());
  } else {
    std::vector<ListEntry> entries = *std::move(recs);
    if (entries.size() > kMaxRecommendations) {
      AddGap("recommendation", video.video_id,
             absl::OutOfRangeError("platform returned " +
                                   std::to_string(entries.size()) +
                                   " recommendations; kept the first 20"));
      entries.resize(kMaxRecommendations);
    }
    if (absl::Status s =
            SaveList(ListKind::kRecommendation, video.video_id, entries);
        !s.ok()) {
      return s;
    }
    ++status_.accounting.recommendation_lists;
  }
  return SaveHomepage();
}

void Agent::Teardown() {
  state_.phase = Phase::kTeardown;
  if (absl::Status s = adapter_->ResetHistory(); !s.ok()) {
    AddGap("reset", "", s);
    status_.outcome = AgentOutcome::kQuarantined;
    status_.reset_verified = false;
    return;
  }
  if (!baseline_probe_seen_) {
    AddGap("reset", inputs_.topic.queries.front(),
           absl::FailedPreconditionError(
               "no baseline results to verify the reset against"));
    return;
  }
  const std::string& query = inputs_.topic.queries.front();
  absl::StatusOr<std::vector<ListEntry>> probe = adapter_->Search(query);
  if (!probe.ok()) {
    AddGap("reset", query, probe.status());
    status_.outcome = AgentOutcome::kQuarantined;
    return;
  }
  const std::vector<std::string> after = Ids(*probe);
  status_.reset_probe_overlap = ListOverlap(baseline_probe_, after).value;
  status_.reset_probe_distance = RankDistance(baseline_probe_, after);
  status_.reset_verified =
      status_.reset_probe_overlap >= config_.reset_probe_min_overlap;
  if (!status_.reset_verified) {
    status_.outcome = AgentOutcome::kQuarantined;
    AddGap("reset", query,
           absl::FailedPreconditionError(
               "post-reset probe overlap " +
               std::to_string(status_.reset_probe_overlap) +
               " below the minimum"));
  }
}

AgentStatus Agent::Run() {
  const std::chrono::seconds start = clock_->Now();
  auto stop = [&](const absl::Status& s) {
    status_.outcome = AgentOutcome::kPartial;
    status_.resume_cursor = state_.watch_ordinal;
    status_.error = (store_failed_ ? "store: " : "") + s.ToString();
  };

  absl::Status s = Initialize();
  if (s.ok()) s = SearchPhase();
  const std::pair<Phase, const SeedSet*> phases[] = {
      {Phase::kPromoting, &inputs_.promoting},
      {Phase::kDebunking, &inputs_.debunking}};
  for (const auto& [phase, set] : phases) {
    if (!s.ok()) break;
    state_.phase = phase;
    const std::vector<std::string>& order = phase == Phase::kPromoting
                                                ? status_.promoting_order
                                                : status_.debunking_order;
    for (const std::string& id : order) {
      if (Aborted()) {
        s = absl::AbortedError("run aborted by another agent's store failure");
        break;
      }
      auto it = std::find_if(set->videos.begin(), set->videos.end(),
                             [&](const SeedVideo& v) { return v.video_id == id; });
      s = WatchStep(*it);
      if (s.ok() && state_.watches_since_search == config_.f_q) {
        s = SearchPhase();
      }
      if (!s.ok()) break;
    }
  }
  if (!s.ok()) stop(s);
  // Without a session there is no history to clear.
  if (logged_in_) Teardown();
  state_.phase = Phase::kDone;
  status_.virtual_duration = clock_->Now() - start;
  return status_;
}

namespace {

// Returns a description of the first violated identity, or empty.
std::string AccountingViolation(const AgentAccounting& got,
                                const RunConfig& config) {
  const AgentAccounting want = ExpectedAgentAccounting(config);
  auto check = [](const char* name, int g, int w) -> std::string {
    if (g == w) return "";
    return std::string(name) + " " + std::to_string(g) + " != expected " +
           std::to_string(w);
  };
  for (const std::string& v :
       {check("watch attempts", got.watch_attempts, want.watch_attempts),
        check("search phases", got.search_phases, want.search_phases),
        check("query yields", got.query_yields, want.query_yields),
        check("homepage snapshots", got.homepage_snapshots,
              1 + got.watches),
        check("recommendation lists", got.recommendation_lists,
              got.watches)}) {
    if (!v.empty()) return v;
  }
  return "";
}

}  // namespace

absl::StatusOr<RunManifest> RunScenario(const ScenarioInputs& inputs,
                                        const AdapterFactory& factory,
                                        ObservationStore& store,
                                        const ScenarioOptions& options) {
  if (absl::Status s = ValidateScenarioInputs(inputs); !s.ok()) return s;
  const RunConfig& config = inputs.config;
  auto wall_time = options.wall_time ? options.wall_time : SystemWallTime;
  auto make_clock = options.clock_factory
                        ? options.clock_factory
                        : [mode = config.clock_mode] { return MakeClock(mode); };

  RunManifest manifest;
  manifest.run_id = config.EffectiveRunId();
  manifest.config = config;
  manifest.config.run_id = manifest.run_id;
  manifest.adapter = options.adapter_name;
  manifest.adapter_params = options.adapter_params;
  manifest.started_at = wall_time();

  std::atomic<bool> abort{false};
  std::vector<AgentStatus> statuses(config.agents);
  std::vector<std::thread> threads;
  threads.reserve(config.agents);
  for (int i = 0; i < config.agents; ++i) {
    threads.emplace_back([&, i] {
      absl::StatusOr<std::unique_ptr<PlatformAdapter>> adapter = factory(i);
      if (!adapter.ok()) {
        AgentStatus& st = statuses[i];
        st.agent_id = AgentId(i, config.agents);
        st.outcome = AgentOutcome::kPartial;
        st.resume_cursor = 0;
        st.error = adapter.status().ToString();
        return;
      }
      Agent agent(inputs, manifest.run_id, i, *std::move(adapter),
                  make_clock(), store, abort);
      statuses[i] = agent.Run();
    });
  }
  for (std::thread& t : threads) t.join();

  for (AgentStatus& st : statuses) {
    manifest.totals += st.accounting;
    if (st.outcome == AgentOutcome::kComplete) {
      const std::string violation = AccountingViolation(st.accounting, config);
      if (!violation.empty()) {
        st.outcome = AgentOutcome::kPartial;
        manifest.notes.push_back(st.agent_id +
                                 ": accounting identity violated: " +
                                 violation);
      }
    }
    if (st.outcome != AgentOutcome::kComplete) manifest.partial = true;
    if (st.accounting.skipped_videos > 0) {
      manifest.notes.push_back(st.agent_id + ": skipped " +
                               std::to_string(st.accounting.skipped_videos) +
                               " unavailable seed videos");
    }
  }
  if (abort.load()) {
    manifest.notes.push_back("run aborted after an observation store failure");
  }
  manifest.agents = std::move(statuses);
  manifest.finished_at = wall_time();
  return manifest;
}

}  // namespace bubble_audit
