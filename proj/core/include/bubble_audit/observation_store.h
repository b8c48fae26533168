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

// Append-only persistence for observations, run manifests and annotation
// records.
//
// Data directory layout:
//
//   <data-dir>/runs/<run-id>/manifest.json
//   <data-dir>/runs/<run-id>/observations/<agent-id>.jsonl
//   <data-dir>/annotations.jsonl
//
// Observations are written to one log per agent. Agents run concurrently,
// and a shared file would interleave them nondeterministically; the run log
// is the concatenation of the agent logs in agent-id order.

#ifndef BUBBLE_AUDIT_OBSERVATION_STORE_H_
#define BUBBLE_AUDIT_OBSERVATION_STORE_H_

#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bubble_audit/domain.h"
#include "bubble_audit/observation.h"
#include "bubble_audit/run_config.h"

namespace bubble_audit {

inline constexpr int kDatasetSchemaVersion = 1;

class ObservationStore {
 public:
  virtual ~ObservationStore() = default;
  // Rejects invalid observations. Safe to call from many agents at once;
  // records of one agent keep their call order.
  virtual absl::Status Append(const Observation& obs) = 0;
};

class MemoryObservationStore : public ObservationStore {
 public:
  absl::Status Append(const Observation& obs) override;

  // All records grouped by agent id (ascending), each agent in append order.
  std::vector<Observation> Snapshot() const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<Observation>> by_agent_;
};

class FileObservationStore : public ObservationStore {
 public:
  explicit FileObservationStore(std::string run_dir);
  ~FileObservationStore() override;

  FileObservationStore(const FileObservationStore&) = delete;
  FileObservationStore& operator=(const FileObservationStore&) = delete;

  // Each record is flushed before Append returns.
  absl::Status Append(const Observation& obs) override;

 private:
  struct Writer {
    std::mutex mu;
    std::FILE* file = nullptr;
  };
  absl::StatusOr<Writer*> WriterFor(const std::string& agent_id);

  std::string dir_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<Writer>> writers_;
};

std::string RunDirectory(const std::string& data_dir, const std::string& run_id);

// Concatenation of the agent logs in agent-id order.
absl::StatusOr<std::vector<Observation>> ReadRunObservations(
    const std::string& run_dir);
absl::StatusOr<std::string> ReadRunLogText(const std::string& run_dir);

enum class AgentOutcome { kComplete, kPartial, kQuarantined };
std::string_view AgentOutcomeName(AgentOutcome outcome);

// Something the agent could not collect or do.
struct GapRecord {
  // "search", "watch", "recommendation", "homepage", "reset", "store".
  std::string kind;
  int watch_ordinal = 0;
  std::string source;
  std::string error;

  friend bool operator==(const GapRecord&, const GapRecord&) = default;
};

struct AgentAccounting {
  int watch_attempts = 0;
  int watches = 0;
  int skipped_videos = 0;
  int search_phases = 0;
  int query_attempts = 0;
  int query_yields = 0;
  int homepage_snapshots = 0;
  int recommendation_lists = 0;
  // SEARCH/HOMEPAGE lists shorter than collect_min.
  int short_lists = 0;

  AgentAccounting& operator+=(const AgentAccounting& other);
  friend bool operator==(const AgentAccounting&,
                         const AgentAccounting&) = default;
};

struct AgentStatus {
  std::string agent_id;
  std::string account_id;
  uint64_t agent_seed = 0;
  AgentOutcome outcome = AgentOutcome::kComplete;
  AgentAccounting accounting;
  std::vector<GapRecord> gaps;
  // Watch ordinal to resume from when the agent stopped early.
  std::optional<int> resume_cursor;
  std::vector<std::string> promoting_order;
  std::vector<std::string> debunking_order;
  bool reset_verified = false;
  double reset_probe_overlap = 0.0;
  int reset_probe_distance = 0;
  std::chrono::seconds virtual_duration{0};
  std::string error;
};

struct RunManifest {
  int schema_version = kDatasetSchemaVersion;
  std::string run_id;
  RunConfig config;
  std::string adapter;
  // Adapter parameters echoed for reproducibility, e.g. sim.lambda.
  std::map<std::string, std::string> adapter_params;
  // Wall-clock ISO-8601 times; the only nondeterministic fields.
  std::string started_at;
  std::string finished_at;
  std::vector<AgentStatus> agents;
  AgentAccounting totals;
  bool partial = false;
  std::vector<std::string> notes;
};

std::string ManifestToJson(const RunManifest& manifest);
absl::StatusOr<RunManifest> ManifestFromJson(std::string_view text);
absl::Status WriteManifest(const std::string& path, const RunManifest& manifest);
absl::StatusOr<RunManifest> ReadManifest(const std::string& path);

struct RunData {
  RunManifest manifest;
  std::vector<Observation> observations;
};

absl::StatusOr<RunData> LoadRun(const std::string& data_dir,
                                const std::string& run_id);
// Run ids under <data-dir>/runs, sorted.
std::vector<std::string> ListRuns(const std::string& data_dir);

enum class BackcheckStatus { kNone, kPending, kResolved };
std::string_view BackcheckStatusName(BackcheckStatus status);
absl::StatusOr<BackcheckStatus> ParseBackcheckStatus(std::string_view text);

struct AnnotationRecord {
  std::string video_id;
  std::string annotator_id;
  AnnotationCode code;
  bool hesitation = false;
  std::string comment;
  BackcheckStatus backcheck_status = BackcheckStatus::kNone;
  // Present iff backcheck_status == kResolved.
  std::optional<AnnotationCode> resolved_code;
  std::string resolver_id;
  // Order of first submission; assigned by AnnotationStore.
  int64_t sequence = 0;

  AnnotationCode EffectiveCode() const {
    return resolved_code.value_or(code);
  }
  // A hesitation still waiting for its back-check does not feed metrics.
  bool Usable() const { return backcheck_status != BackcheckStatus::kPending; }

  absl::Status Validate() const;
  friend bool operator==(const AnnotationRecord&,
                         const AnnotationRecord&) = default;
};

std::string AnnotationToLine(const AnnotationRecord& record);
absl::StatusOr<AnnotationRecord> AnnotationFromLine(std::string_view line);

// Thread-safe store of annotation records keyed by (video, annotator). Every
// change appends the full record to the backing log, if any; on load the
// last line per key wins.
class AnnotationStore {
 public:
  AnnotationStore() = default;
  static absl::StatusOr<std::unique_ptr<AnnotationStore>> Open(
      const std::string& path);

  absl::Status Put(AnnotationRecord record);
  std::vector<AnnotationRecord> ForVideo(std::string_view video_id) const;
  std::optional<AnnotationRecord> Get(std::string_view video_id,
                                      std::string_view annotator_id) const;
  // Ordered by sequence.
  std::vector<AnnotationRecord> All() const;

  // Effective code of the first usable record per video. Videos whose first
  // record awaits back-check are absent.
  std::map<std::string, AnnotationCode> EffectiveCodes() const;

 private:
  mutable std::mutex mu_;
  std::string path_;
  std::map<std::pair<std::string, std::string>, AnnotationRecord> records_;
  int64_t next_sequence_ = 1;
};

// Columns: video_id, effective_code, annotator_id, hesitation,
// backcheck_status.
std::string ExportAnnotationsCsv(std::span<const AnnotationRecord> records);

struct ListContext {
  ListKind kind = ListKind::kSearch;
  std::string source;
  int rank = 0;
};

struct QueueEntry {
  std::string video_id;
  int appearance_count = 0;
  // Up to a few places the video was seen.
  std::vector<ListContext> contexts;
};

// Everything needing annotation: all SEARCH results plus RECOMMENDATION lists
// collected in the S1, E1 and E2 windows. HOMEPAGE lists are never queued.
// Deduplicated and ordered by appearance count (descending), then video id.
std::vector<QueueEntry> SelectAnnotationQueue(std::span<const RunData> runs);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_OBSERVATION_STORE_H_
