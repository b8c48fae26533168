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

#include "bubble_audit/observation_store.h"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include "record_io.h"

namespace bubble_audit {

namespace fs = std::filesystem;
using internal::Json;

absl::Status MemoryObservationStore::Append(const Observation& obs) {
  if (absl::Status s = ValidateObservation(obs); !s.ok()) return s;
  std::lock_guard<std::mutex> lock(mu_);
  by_agent_[obs.agent_id].push_back(obs);
  return absl::OkStatus();
}

std::vector<Observation> MemoryObservationStore::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<Observation> out;
  for (const auto& [agent, records] : by_agent_) {
    out.insert(out.end(), records.begin(), records.end());
  }
  return out;
}

size_t MemoryObservationStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  size_t n = 0;
  for (const auto& [agent, records] : by_agent_) n += records.size();
  return n;
}

FileObservationStore::FileObservationStore(std::string run_dir)
    : dir_(std::move(run_dir)) {}

FileObservationStore::~FileObservationStore() {
  for (auto& [agent, writer] : writers_) {
    if (writer->file != nullptr) std::fclose(writer->file);
  }
}

absl::StatusOr<FileObservationStore::Writer*> FileObservationStore::WriterFor(
    const std::string& agent_id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = writers_.find(agent_id);
  if (it != writers_.end()) return it->second.get();
  const fs::path dir = fs::path(dir_) / "observations";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError("cannot create " + dir.string() + ": " +
                                  ec.message());
  }
  const fs::path path = dir / (agent_id + ".jsonl");
  auto writer = std::make_unique<Writer>();
  writer->file = std::fopen(path.c_str(), "ab");
  if (writer->file == nullptr) {
    return absl::UnavailableError("cannot open " + path.string() + ": " +
                                  std::strerror(errno));
  }
  Writer* raw = writer.get();
  writers_.emplace(agent_id, std::move(writer));
  return raw;
}

absl::Status FileObservationStore::Append(const Observation& obs) {
  if (absl::Status s = ValidateObservation(obs); !s.ok()) return s;
  absl::StatusOr<Writer*> writer = WriterFor(obs.agent_id);
  if (!writer.ok()) return writer.status();
  std::string line = ObservationToLine(obs);
  line += '\n';
  std::lock_guard<std::mutex> lock((*writer)->mu);
  if (std::fwrite(line.data(), 1, line.size(), (*writer)->file) !=
          line.size() ||
      std::fflush((*writer)->file) != 0) {
    return absl::DataLossError("append failed for agent " + obs.agent_id +
                               ": " + std::strerror(errno));
  }
  return absl::OkStatus();
}

std::string RunDirectory(const std::string& data_dir,
                         const std::string& run_id) {
  return (fs::path(data_dir) / "runs" / run_id).string();
}

namespace {

std::vector<fs::path> AgentLogs(const std::string& run_dir) {
  std::vector<fs::path> logs;
  std::error_code ec;
  const fs::path dir = fs::path(run_dir) / "observations";
  if (!fs::is_directory(dir, ec)) return logs;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      logs.push_back(entry.path());
    }
  }
  std::sort(logs.begin(), logs.end());
  return logs;
}

}  // namespace

absl::StatusOr<std::vector<Observation>> ReadRunObservations(
    const std::string& run_dir) {
  std::vector<Observation> out;
  for (const fs::path& log : AgentLogs(run_dir)) {
    std::ifstream in(log);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      absl::StatusOr<Observation> obs = ObservationFromLine(line);
      if (!obs.ok()) {
        return absl::DataLossError(log.string() + ":" +
                                   std::to_string(line_no) + ": " +
                                   std::string(obs.status().message()));
      }
      out.push_back(*std::move(obs));
    }
  }
  return out;
}

absl::StatusOr<std::string> ReadRunLogText(const std::string& run_dir) {
  std::string out;
  for (const fs::path& log : AgentLogs(run_dir)) {
    absl::StatusOr<std::string> text = internal::ReadFile(log.string());
    if (!text.ok()) return text.status();
    out += *text;
  }
  return out;
}

std::string_view AgentOutcomeName(AgentOutcome outcome) {
  switch (outcome) {
    case AgentOutcome::kComplete:
      return "complete";
    case AgentOutcome::kPartial:
      return "partial";
    case AgentOutcome::kQuarantined:
      return "quarantined";
  }
  return "?";
}

AgentAccounting& AgentAccounting::operator+=(const AgentAccounting& o) {
  watch_attempts += o.watch_attempts;
  watches += o.watches;
  skipped_videos += o.skipped_videos;
  search_phases += o.search_phases;
  query_attempts += o.query_attempts;
  query_yields += o.query_yields;
  homepage_snapshots += o.homepage_snapshots;
  recommendation_lists += o.recommendation_lists;
  short_lists += o.short_lists;
  return *this;
}

namespace {

Json AccountingToJson(const AgentAccounting& a) {
  Json j;
  j["watch_attempts"] = a.watch_attempts;
  j["watches"] = a.watches;
  j["skipped_videos"] = a.skipped_videos;
  j["search_phases"] = a.search_phases;
  j["query_attempts"] = a.query_attempts;
  j["query_yields"] = a.query_yields;
  j["homepage_snapshots"] = a.homepage_snapshots;
  j["recommendation_lists"] = a.recommendation_lists;
  j["short_lists"] = a.short_lists;
  return j;
}

AgentAccounting AccountingFromJson(const Json& j) {
  AgentAccounting a;
  a.watch_attempts = j.value("watch_attempts", 0);
  a.watches = j.value("watches", 0);
  a.skipped_videos = j.value("skipped_videos", 0);
  a.search_phases = j.value("search_phases", 0);
  a.query_attempts = j.value("query_attempts", 0);
  a.query_yields = j.value("query_yields", 0);
  a.homepage_snapshots = j.value("homepage_snapshots", 0);
  a.recommendation_lists = j.value("recommendation_lists", 0);
  a.short_lists = j.value("short_lists", 0);
  return a;
}

Json ConfigToJson(const RunConfig& c) {
  Json j;
  j["topic_id"] = c.topic_id;
  j["run_id"] = c.run_id;
  j["seed"] = c.seed;
  j["adapter_seed"] = c.EffectiveAdapterSeed();
  j["n_prom"] = c.n_prom;
  j["n_deb"] = c.n_deb;
  j["t_watch_s"] = c.t_watch.count();
  j["n_q"] = c.n_q;
  j["t_wait_s"] = c.t_wait.count();
  j["f_q"] = c.f_q;
  j["agents"] = c.agents;
  j["collect_min"] = c.collect_min;
  j["clock_mode"] = std::string(ClockModeName(c.clock_mode));
  j["reset_probe_min_overlap"] = c.reset_probe_min_overlap;
  return j;
}

RunConfig ConfigFromJson(const Json& j) {
  RunConfig c;
  c.topic_id = j.value("topic_id", "");
  c.run_id = j.value("run_id", "");
  c.seed = j.value("seed", uint64_t{0});
  if (j.contains("adapter_seed")) {
    c.adapter_seed = j["adapter_seed"].get<uint64_t>();
  }
  c.n_prom = j.value("n_prom", c.n_prom);
  c.n_deb = j.value("n_deb", c.n_deb);
  c.t_watch = std::chrono::seconds(j.value("t_watch_s", c.t_watch.count()));
  c.n_q = j.value("n_q", c.n_q);
  c.t_wait = std::chrono::seconds(j.value("t_wait_s", c.t_wait.count()));
  c.f_q = j.value("f_q", c.f_q);
  c.agents = j.value("agents", c.agents);
  c.collect_min = j.value("collect_min", c.collect_min);
  c.clock_mode = j.value("clock_mode", std::string("virtual")) == "real"
                     ? ClockMode::kReal
                     : ClockMode::kVirtual;
  c.reset_probe_min_overlap =
      j.value("reset_probe_min_overlap", c.reset_probe_min_overlap);
  return c;
}

}  // namespace

std::string ManifestToJson(const RunManifest& m) {
  Json j;
  j["schema_version"] = m.schema_version;
  j["run_id"] = m.run_id;
  j["status"] = m.partial ? "partial" : "complete";
  j["config"] = ConfigToJson(m.config);
  j["adapter"] = m.adapter;
  Json params = Json::object();
  for (const auto& [k, v] : m.adapter_params) params[k] = v;
  j["adapter_params"] = std::move(params);
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["totals"] = AccountingToJson(m.totals);
  Json agents = Json::array();
  for (const AgentStatus& a : m.agents) {
    Json ja;
    ja["agent_id"] = a.agent_id;
    ja["account_id"] = a.account_id;
    ja["agent_seed"] = a.agent_seed;
    ja["outcome"] = std::string(AgentOutcomeName(a.outcome));
    ja["accounting"] = AccountingToJson(a.accounting);
    Json gaps = Json::array();
    for (const GapRecord& g : a.gaps) {
      gaps.push_back(Json{{"kind", g.kind},
                          {"watch_ordinal", g.watch_ordinal},
                          {"source", g.source},
                          {"error", g.error}});
    }
    ja["gaps"] = std::move(gaps);
    ja["resume_cursor"] =
        a.resume_cursor ? Json(*a.resume_cursor) : Json(nullptr);
    ja["promoting_order"] = a.promoting_order;
    ja["debunking_order"] = a.debunking_order;
    ja["reset_verified"] = a.reset_verified;
    ja["reset_probe_overlap"] = a.reset_probe_overlap;
    ja["reset_probe_distance"] = a.reset_probe_distance;
    ja["virtual_duration_s"] = a.virtual_duration.count();
    ja["error"] = a.error;
    agents.push_back(std::move(ja));
  }
  j["agents"] = std::move(agents);
  j["notes"] = m.notes;
  return j.dump(2) + "\n";
}

absl::StatusOr<RunManifest> ManifestFromJson(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    return absl::DataLossError(std::string("malformed manifest: ") + e.what());
  }
  RunManifest m;
  try {
    m.schema_version = j.value("schema_version", 0);
    if (m.schema_version != kDatasetSchemaVersion) {
      return absl::FailedPreconditionError(
          "unsupported manifest schema version " +
          std::to_string(m.schema_version));
    }
    m.run_id = j.at("run_id").get<std::string>();
    m.partial = j.value("status", "complete") != "complete";
    m.config = ConfigFromJson(j.at("config"));
    m.adapter = j.value("adapter", "");
    if (auto p = j.find("adapter_params"); p != j.end()) {
      for (auto it = p->begin(); it != p->end(); ++it) {
        m.adapter_params[it.key()] = it.value().get<std::string>();
      }
    }
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    m.totals = AccountingFromJson(j.at("totals"));
    for (const Json& ja : j.at("agents")) {
      AgentStatus a;
      a.agent_id = ja.at("agent_id").get<std::string>();
      a.account_id = ja.value("account_id", "");
      a.agent_seed = ja.value("agent_seed", uint64_t{0});
      const std::string outcome = ja.value("outcome", "complete");
      a.outcome = outcome == "partial"       ? AgentOutcome::kPartial
                  : outcome == "quarantined" ? AgentOutcome::kQuarantined
                                             : AgentOutcome::kComplete;
      a.accounting = AccountingFromJson(ja.at("accounting"));
      for (const Json& g : ja.value("gaps", Json::array())) {
        a.gaps.push_back(GapRecord{g.value("kind", ""),
                                   g.value("watch_ordinal", 0),
                                   g.value("source", ""), g.value("error", "")});
      }
      if (auto rc = ja.find("resume_cursor");
          rc != ja.end() && !rc->is_null()) {
        a.resume_cursor = rc->get<int>();
      }
      a.promoting_order =
          ja.value("promoting_order", std::vector<std::string>{});
      a.debunking_order =
          ja.value("debunking_order", std::vector<std::string>{});
      a.reset_verified = ja.value("reset_verified", false);
      a.reset_probe_overlap = ja.value("reset_probe_overlap", 0.0);
      a.reset_probe_distance = ja.value("reset_probe_distance", 0);
      a.virtual_duration =
          std::chrono::seconds(ja.value("virtual_duration_s", int64_t{0}));
      a.error = ja.value("error", "");
      m.agents.push_back(std::move(a));
    }
    m.notes = j.value("notes", std::vector<std::string>{});
  } catch (const Json::exception& e) {
    return absl::DataLossError(std::string("invalid manifest: ") + e.what());
  }
  return m;
}

absl::Status WriteManifest(const std::string& path,
                           const RunManifest& manifest) {
  // Write-then-rename so a crash never leaves a truncated manifest.
  const std::string tmp = path + ".tmp";
  if (absl::Status s = internal::WriteFile(tmp, ManifestToJson(manifest));
      !s.ok()) {
    return s;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) return absl::UnavailableError("cannot rename manifest: " + ec.message());
  return absl::OkStatus();
}

absl::StatusOr<RunManifest> ReadManifest(const std::string& path) {
  absl::StatusOr<std::string> text = internal::ReadFile(path);
  if (!text.ok()) return text.status();
  return ManifestFromJson(*text);
}

absl::StatusOr<RunData> LoadRun(const std::string& data_dir,
                                const std::string& run_id) {
  const std::string dir = RunDirectory(data_dir, run_id);
  absl::StatusOr<RunManifest> manifest =
      ReadManifest((fs::path(dir) / "manifest.json").string());
  if (!manifest.ok()) return manifest.status();
  absl::StatusOr<std::vector<Observation>> obs = ReadRunObservations(dir);
  if (!obs.ok()) return obs.status();
  return RunData{*std::move(manifest), *std::move(obs)};
}

std::vector<std::string> ListRuns(const std::string& data_dir) {
  std::vector<std::string> runs;
  std::error_code ec;
  const fs::path dir = fs::path(data_dir) / "runs";
  if (!fs::is_directory(dir, ec)) return runs;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_directory() &&
        fs::exists(entry.path() / "manifest.json", ec)) {
      runs.push_back(entry.path().filename().string());
    }
  }
  std::sort(runs.begin(), runs.end());
  return runs;
}

std::string_view BackcheckStatusName(BackcheckStatus status) {
  switch (status) {
    case BackcheckStatus::kNone:
      return "none";
    case BackcheckStatus::kPending:
      return "pending";
    case BackcheckStatus::kResolved:
      return "resolved";
  }
  return "?";
}

absl::StatusOr<BackcheckStatus> ParseBackcheckStatus(std::string_view text) {
  if (text == "none") return BackcheckStatus::kNone;
  if (text == "pending") return BackcheckStatus::kPending;
  if (text == "resolved") return BackcheckStatus::kResolved;
  return absl::InvalidArgumentError("unknown backcheck status '" +
                                    std::string(text) + "'");
}

absl::Status AnnotationRecord::Validate() const {
  if (video_id.empty()) return absl::InvalidArgumentError("empty video id");
  if (annotator_id.empty()) {
    return absl::InvalidArgumentError("empty annotator id");
  }
  const bool resolved = backcheck_status == BackcheckStatus::kResolved;
  if (resolved != resolved_code.has_value()) {
    return absl::InvalidArgumentError(
        "resolved_code must be present exactly when the back-check is "
        "resolved (video " + video_id + ")");
  }
  return absl::OkStatus();
}

std::string AnnotationToLine(const AnnotationRecord& r) {
  Json j;
  j["video_id"] = r.video_id;
  j["annotator_id"] = r.annotator_id;
  j["code"] = r.code.value();
  j["hesitation"] = r.hesitation;
  j["comment"] = r.comment;
  j["backcheck_status"] = std::string(BackcheckStatusName(r.backcheck_status));
  j["resolved_code"] =
      r.resolved_code ? Json(r.resolved_code->value()) : Json(nullptr);
  j["resolver_id"] = r.resolver_id;
  j["sequence"] = r.sequence;
  return j.dump();
}

absl::StatusOr<AnnotationRecord> AnnotationFromLine(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    return absl::DataLossError(std::string("malformed annotation: ") +
                               e.what());
  }
  AnnotationRecord r;
  absl::StatusOr<std::string> video = internal::GetString(j, "video_id");
  absl::StatusOr<std::string> annotator =
      internal::GetString(j, "annotator_id");
  absl::StatusOr<int64_t> code = internal::GetInt(j, "code");
  for (const absl::Status& s : {video.status(), annotator.status(),
                                code.status()}) {
    if (!s.ok()) return s;
  }
  r.video_id = *video;
  r.annotator_id = *annotator;
  absl::StatusOr<AnnotationCode> c =
      AnnotationCode::Create(static_cast<int>(*code), r.video_id);
  if (!c.ok()) return c.status();
  r.code = *c;
  r.hesitation = j.value("hesitation", false);
  r.comment = j.value("comment", "");
  absl::StatusOr<BackcheckStatus> status =
      ParseBackcheckStatus(j.value("backcheck_status", "none"));
  if (!status.ok()) return status.status();
  r.backcheck_status = *status;
  if (auto rc = j.find("resolved_code"); rc != j.end() && !rc->is_null()) {
    absl::StatusOr<AnnotationCode> resolved =
        AnnotationCode::Create(rc->get<int>(), r.video_id);
    if (!resolved.ok()) return resolved.status();
    r.resolved_code = *resolved;
  }
  r.resolver_id = j.value("resolver_id", "");
  r.sequence = j.value("sequence", int64_t{0});
  if (absl::Status s = r.Validate(); !s.ok()) return s;
  return r;
}

absl::StatusOr<std::unique_ptr<AnnotationStore>> AnnotationStore::Open(
    const std::string& path) {
  auto store = std::make_unique<AnnotationStore>();
  store->path_ = path;
  std::error_code ec;
  if (!fs::exists(path, ec)) return store;
  std::ifstream in(path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    absl::StatusOr<AnnotationRecord> r = AnnotationFromLine(line);
    if (!r.ok()) {
      return absl::DataLossError(path + ":" + std::to_string(line_no) + ": " +
                                 std::string(r.status().message()));
    }
    store->next_sequence_ = std::max(store->next_sequence_, r->sequence + 1);
    store->records_[{r->video_id, r->annotator_id}] = *std::move(r);
  }
  return store;
}

absl::Status AnnotationStore::Put(AnnotationRecord record) {
  if (absl::Status s = record.Validate(); !s.ok()) return s;
  std::lock_guard<std::mutex> lock(mu_);
  const auto key = std::make_pair(record.video_id, record.annotator_id);
  auto it = records_.find(key);
  record.sequence =
      it != records_.end() ? it->second.sequence : next_sequence_++;
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    out << AnnotationToLine(record) << '\n';
    out.flush();
    if (!out) return absl::DataLossError("cannot append to " + path_);
  }
  records_[key] = std::move(record);
  return absl::OkStatus();
}

std::vector<AnnotationRecord> AnnotationStore::ForVideo(
    std::string_view video_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<AnnotationRecord> out;
  for (auto it = records_.lower_bound({std::string(video_id), std::string()});
       it != records_.end() && it->first.first == video_id; ++it) {
    out.push_back(it->second);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.sequence < b.sequence;
  });
  return out;
}

std::optional<AnnotationRecord> AnnotationStore::Get(
    std::string_view video_id, std::string_view annotator_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = records_.find({std::string(video_id), std::string(annotator_id)});
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<AnnotationRecord> AnnotationStore::All() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<AnnotationRecord> out;
  out.reserve(records_.size());
  for (const auto& [key, r] : records_) out.push_back(r);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.sequence < b.sequence;
  });
  return out;
}

std::map<std::string, AnnotationCode> AnnotationStore::EffectiveCodes() const {
  std::map<std::string, AnnotationCode> out;
  std::set<std::string> decided;
  for (const AnnotationRecord& r : All()) {
    if (!decided.insert(r.video_id).second) continue;
    if (r.Usable()) out.emplace(r.video_id, r.EffectiveCode());
  }
  return out;
}

std::string ExportAnnotationsCsv(std::span<const AnnotationRecord> records) {
  std::string out = internal::CsvLine({"video_id", "effective_code",
                                       "annotator_id", "hesitation",
                                       "backcheck_status"});
  for (const AnnotationRecord& r : records) {
    out += internal::CsvLine(
        {r.video_id, std::to_string(r.EffectiveCode().value()),
         r.annotator_id, r.hesitation ? "true" : "false",
         std::string(BackcheckStatusName(r.backcheck_status))});
  }
  return out;
}

std::vector<QueueEntry> SelectAnnotationQueue(std::span<const RunData> runs) {
  constexpr size_t kMaxContexts = 5;
  std::map<std::string, QueueEntry> by_id;
  for (const RunData& run : runs) {
    const int n_prom = run.manifest.config.n_prom;
    const int n_deb = run.manifest.config.n_deb;
    for (const Observation& obs : run.observations) {
      bool include = false;
      if (obs.list_kind == ListKind::kSearch) {
        include = true;
      } else if (obs.list_kind == ListKind::kRecommendation) {
        for (PhasePoint point : kAllPhasePoints) {
          include = include || InPhasePointWindow(point, obs.watch_ordinal,
                                                  n_prom, n_deb);
        }
      }
      if (!include) continue;
      QueueEntry& entry = by_id[obs.video_id];
      entry.video_id = obs.video_id;
      ++entry.appearance_count;
      if (entry.contexts.size() < kMaxContexts) {
        entry.contexts.push_back({obs.list_kind, obs.source, obs.rank});
      }
    }
  }
  std::vector<QueueEntry> queue;
  queue.reserve(by_id.size());
  for (auto& [id, entry] : by_id) queue.push_back(std::move(entry));
  std::stable_sort(queue.begin(), queue.end(),
                   [](const QueueEntry& a, const QueueEntry& b) {
                     return a.appearance_count > b.appearance_count;
                   });
  return queue;
}

}  // namespace bubble_audit
