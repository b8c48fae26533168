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

#include <filesystem>
#include <map>
#include <thread>
#include <vector>

#include "bubble_audit/observation.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace bubble_audit {
namespace {

using ::bubble_audit::testing::ReadFileOrEmpty;
using ::bubble_audit::testing::TempDir;
using ::bubble_audit::testing::WriteFileOrDie;

Observation Obs(const std::string& agent, int ordinal, int rank,
                ListKind kind = ListKind::kSearch) {
  Observation o;
  o.run_id = "run-1";
  o.agent_id = agent;
  o.phase = ordinal == 0 ? Phase::kInit : Phase::kPromoting;
  o.watch_ordinal = ordinal;
  o.list_kind = kind;
  o.source = kind == ListKind::kHomepage ? std::string(kHomepageSource)
                                         : "query, \"quoted\"";
  o.rank = rank;
  o.video_id = "vid-" + std::to_string(rank);
  o.warning_flag = rank % 2 == 0;
  o.virtual_ts = std::chrono::seconds(60 * ordinal + rank);
  return o;
}

TEST(ObservationTest, LineRoundTrip) {
  const Observation o = Obs("agent-01", 3, 2, ListKind::kRecommendation);
  const std::string line = ObservationToLine(o);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  // Fixed field order keeps logs diffable.
  EXPECT_EQ(line.rfind("{\"run_id\":", 0), 0u);
  ASSERT_OK_AND_ASSIGN(Observation back, ObservationFromLine(line));
  EXPECT_EQ(back, o);
}

TEST(ObservationTest, RejectsInvalidRecords) {
  Observation o = Obs("agent-01", 0, 1);
  o.rank = 0;
  EXPECT_FALSE(ValidateObservation(o).ok());
  o = Obs("", 0, 1);
  EXPECT_FALSE(ValidateObservation(o).ok());
  EXPECT_FALSE(ObservationFromLine("{\"run_id\": 1}").ok());
  EXPECT_FALSE(ObservationFromLine("not json").ok());
}

TEST(MemoryObservationStoreTest, GroupsByAgent) {
  MemoryObservationStore store;
  ASSERT_OK(store.Append(Obs("agent-02", 0, 1)));
  ASSERT_OK(store.Append(Obs("agent-01", 0, 1)));
  ASSERT_OK(store.Append(Obs("agent-02", 0, 2)));
  const std::vector<Observation> all = store.Snapshot();
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].agent_id, "agent-01");
  EXPECT_EQ(all[1].rank, 1);
  EXPECT_EQ(all[2].rank, 2);
  EXPECT_EQ(store.size(), 3u);
  Observation bad = Obs("agent-01", 0, 1);
  bad.video_id.clear();
  EXPECT_FALSE(store.Append(bad).ok());
}

TEST(FileObservationStoreTest, ConcurrentAppendsLoseNothing) {
  TempDir dir;
  constexpr int kAgents = 10;
  constexpr int kPerAgent = 100;
  {
    FileObservationStore store(dir.path());
    std::vector<std::thread> threads;
    for (int a = 0; a < kAgents; ++a) {
      threads.emplace_back([&store, a] {
        const std::string agent = "agent-" + std::to_string(10 + a);
        for (int i = 1; i <= kPerAgent; ++i) {
          ASSERT_OK(store.Append(Obs(agent, i / 10, i)));
        }
      });
    }
    for (std::thread& t : threads) t.join();
  }
  ASSERT_OK_AND_ASSIGN(std::vector<Observation> back,
                       ReadRunObservations(dir.path()));
  ASSERT_EQ(back.size(), static_cast<size_t>(kAgents * kPerAgent));
  std::map<std::string, int> last_rank;
  for (const Observation& o : back) {
    // Every agent's records stay in append order.
    EXPECT_EQ(o.rank, last_rank[o.agent_id] + 1);
    last_rank[o.agent_id] = o.rank;
  }
  EXPECT_EQ(last_rank.size(), static_cast<size_t>(kAgents));
}

TEST(FileObservationStoreTest, LogTextIsAgentOrdered) {
  TempDir dir;
  {
    FileObservationStore store(dir.path());
    ASSERT_OK(store.Append(Obs("agent-02", 0, 1)));
    ASSERT_OK(store.Append(Obs("agent-01", 0, 1)));
  }
  ASSERT_OK_AND_ASSIGN(std::string text, ReadRunLogText(dir.path()));
  EXPECT_EQ(text, ObservationToLine(Obs("agent-01", 0, 1)) + "\n" +
                      ObservationToLine(Obs("agent-02", 0, 1)) + "\n");
}

TEST(ReadRunObservationsTest, CorruptLineIsReported) {
  TempDir dir;
  WriteFileOrDie(dir.File("observations/agent-01.jsonl"),
                 ObservationToLine(Obs("agent-01", 0, 1)) + "\n{broken\n");
  absl::StatusOr<std::vector<Observation>> r = ReadRunObservations(dir.path());
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.status().message().find("agent-01"), std::string::npos)
      << r.status();
}

RunManifest SampleManifest() {
  RunManifest m;
  m.run_id = "moon-seed3";
  m.config.topic_id = "moon";
  m.config.seed = 3;
  m.config.adapter_seed = 9;
  m.config.n_prom = 4;
  m.config.n_deb = 5;
  m.config.t_watch = std::chrono::minutes(12);
  m.config.agents = 2;
  m.adapter = "sim";
  m.adapter_params = {{"sim.lambda", "0.15"}, {"sim.w", "0.8"}};
  m.started_at = "2026-01-01T00:00:00Z";
  m.finished_at = "2026-01-01T00:00:01Z";
  AgentStatus a;
  a.agent_id = "agent-01";
  a.account_id = "moon-seed3-agent-01";
  a.agent_seed = 1234567890123ULL;
  a.outcome = AgentOutcome::kPartial;
  a.accounting.watches = 3;
  a.accounting.watch_attempts = 4;
  a.accounting.skipped_videos = 1;
  a.gaps.push_back({"watch", 2, "vid-9", "unavailable"});
  a.resume_cursor = 4;
  a.promoting_order = {"p1", "p2"};
  a.debunking_order = {"d1"};
  a.reset_verified = true;
  a.reset_probe_overlap = 0.75;
  a.reset_probe_distance = 3;
  a.virtual_duration = std::chrono::seconds(3600);
  a.error = "platform: boom";
  m.agents.push_back(a);
  m.totals = a.accounting;
  m.partial = true;
  m.notes = {"agent-01 partial"};
  return m;
}

TEST(ManifestTest, JsonRoundTrip) {
  const RunManifest m = SampleManifest();
  const std::string json = ManifestToJson(m);
  ASSERT_OK_AND_ASSIGN(RunManifest back, ManifestFromJson(json));
  EXPECT_EQ(ManifestToJson(back), json);
  EXPECT_EQ(back.config.adapter_seed, 9u);
  EXPECT_EQ(back.agents[0].gaps[0], m.agents[0].gaps[0]);
  EXPECT_EQ(back.agents[0].resume_cursor, 4);
  EXPECT_EQ(back.agents[0].accounting, m.agents[0].accounting);
  EXPECT_EQ(back.agents[0].outcome, AgentOutcome::kPartial);
  EXPECT_TRUE(back.partial);
}

TEST(ManifestTest, RejectsOtherSchemaVersions) {
  RunManifest m = SampleManifest();
  m.schema_version = 999;
  EXPECT_FALSE(ManifestFromJson(ManifestToJson(m)).ok());
  EXPECT_FALSE(ManifestFromJson("[]").ok());
}

TEST(RunDirectoryTest, WriteLoadAndList) {
  TempDir data;
  const RunManifest m = SampleManifest();
  const std::string run_dir = RunDirectory(data.path(), m.run_id);
  {
    FileObservationStore store(run_dir);
    ASSERT_OK(store.Append(Obs("agent-01", 0, 1)));
  }
  ASSERT_OK(WriteManifest(run_dir + "/manifest.json", m));
  // A directory without a manifest is not a run.
  std::filesystem::create_directories(RunDirectory(data.path(), "half"));
  EXPECT_EQ(ListRuns(data.path()), std::vector<std::string>{"moon-seed3"});
  ASSERT_OK_AND_ASSIGN(RunData run, LoadRun(data.path(), "moon-seed3"));
  EXPECT_EQ(run.manifest.run_id, "moon-seed3");
  EXPECT_EQ(run.observations.size(), 1u);
  EXPECT_EQ(LoadRun(data.path(), "nope").status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_TRUE(ListRuns(data.File("missing")).empty());
}

AnnotationRecord Record(const std::string& video, const std::string& annotator,
                        int code, bool hesitation = false) {
  AnnotationRecord r;
  r.video_id = video;
  r.annotator_id = annotator;
  r.code = *AnnotationCode::Create(code);
  r.hesitation = hesitation;
  r.backcheck_status =
      hesitation ? BackcheckStatus::kPending : BackcheckStatus::kNone;
  return r;
}

TEST(AnnotationRecordTest, Validation) {
  AnnotationRecord r = Record("v", "ann", 1);
  EXPECT_OK(r.Validate());
  r.resolved_code = *AnnotationCode::Create(-1);
  EXPECT_FALSE(r.Validate().ok());
  r.backcheck_status = BackcheckStatus::kResolved;
  r.resolver_id = "rev";
  EXPECT_OK(r.Validate());
  EXPECT_EQ(r.EffectiveCode().value(), -1);
  ASSERT_OK_AND_ASSIGN(AnnotationRecord back,
                       AnnotationFromLine(AnnotationToLine(r)));
  EXPECT_EQ(back, r);
  EXPECT_FALSE(AnnotationFromLine(R"({"video_id":"v","annotator_id":"a","code":11})").ok());
}

TEST(AnnotationStoreTest, PersistsAndReloadsLastVersion) {
  TempDir dir;
  const std::string path = dir.File("annotations.jsonl");
  {
    ASSERT_OK_AND_ASSIGN(std::unique_ptr<AnnotationStore> store,
                         AnnotationStore::Open(path));
    ASSERT_OK(store->Put(Record("v1", "ann-a", 1, /*hesitation=*/true)));
    ASSERT_OK(store->Put(Record("v2", "ann-a", 0)));
    AnnotationRecord resolved = *store->Get("v1", "ann-a");
    resolved.backcheck_status = BackcheckStatus::kResolved;
    resolved.resolved_code = *AnnotationCode::Create(-1);
    resolved.resolver_id = "ann-b";
    ASSERT_OK(store->Put(resolved));
  }
  // Three lines appended, two records after reload.
  std::string text = ReadFileOrEmpty(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  ASSERT_OK_AND_ASSIGN(std::unique_ptr<AnnotationStore> store,
                       AnnotationStore::Open(path));
  const std::vector<AnnotationRecord> all = store->All();
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].video_id, "v1");
  EXPECT_EQ(all[0].sequence, 1);
  EXPECT_EQ(all[0].EffectiveCode().value(), -1);
  EXPECT_EQ(all[1].sequence, 2);
  // New records continue the sequence.
  ASSERT_OK(store->Put(Record("v3", "ann-a", 4)));
  EXPECT_EQ(store->Get("v3", "ann-a")->sequence, 3);
}

TEST(AnnotationStoreTest, EffectiveCodesFirstRecordDecides) {
  AnnotationStore store;
  ASSERT_OK(store.Put(Record("v1", "ann-a", 1)));
  ASSERT_OK(store.Put(Record("v1", "ann-b", -1)));
  ASSERT_OK(store.Put(Record("v2", "ann-a", 3, /*hesitation=*/true)));
  ASSERT_OK(store.Put(Record("v2", "ann-b", 0)));
  const auto codes = store.EffectiveCodes();
  ASSERT_EQ(codes.size(), 1u);
  EXPECT_EQ(codes.at("v1").value(), 1);
  // v2 waits for its back-check.
  EXPECT_EQ(codes.count("v2"), 0u);
  EXPECT_EQ(store.ForVideo("v1").size(), 2u);
}

TEST(AnnotationStoreTest, RejectsInvalidRecordsAndCorruptFiles) {
  AnnotationStore store;
  EXPECT_FALSE(store.Put(Record("", "ann", 1)).ok());
  TempDir dir;
  WriteFileOrDie(dir.File("a.jsonl"), "{\"video_id\": \"v\"}\n");
  EXPECT_FALSE(AnnotationStore::Open(dir.File("a.jsonl")).ok());
}

TEST(ExportAnnotationsCsvTest, Columns) {
  AnnotationRecord r = Record("v,1", "ann", 7, true);
  const std::vector<AnnotationRecord> records = {r};
  EXPECT_EQ(ExportAnnotationsCsv(records),
            "video_id,effective_code,annotator_id,hesitation,backcheck_status\n"
            "\"v,1\",7,ann,true,pending\n");
}

TEST(SelectAnnotationQueueTest, SearchAndWindowedRecommendations) {
  RunData run;
  run.manifest.config.n_prom = 4;
  run.manifest.config.n_deb = 4;
  auto add = [&run](ListKind kind, int ordinal, const std::string& video) {
    Observation o = Obs("agent-01", ordinal, 1, kind);
    o.video_id = video;
    if (kind == ListKind::kRecommendation) o.source = "seed";
    run.observations.push_back(o);
  };
  add(ListKind::kSearch, 0, "s-only");
  add(ListKind::kSearch, 5, "both");
  add(ListKind::kRecommendation, 1, "both");  // S1
  add(ListKind::kRecommendation, 4, "both");  // E1
  add(ListKind::kRecommendation, 5, "mid");   // outside every window
  add(ListKind::kRecommendation, 8, "late");  // E2
  add(ListKind::kHomepage, 0, "home-only");
  const std::vector<QueueEntry> q = SelectAnnotationQueue({&run, 1});
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q[0].video_id, "both");
  EXPECT_EQ(q[0].appearance_count, 3);
  EXPECT_EQ(q[0].contexts.size(), 3u);
  EXPECT_EQ(q[1].video_id, "late");
  EXPECT_EQ(q[2].video_id, "s-only");
}

}  // namespace
}  // namespace bubble_audit
