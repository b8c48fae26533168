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

// Acceptance suite. Prints one PASS, FAIL or SKIP line per criterion and
// exits non-zero when any criterion fails. Every check compares the library
// against an oracle written here from first principles.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <unistd.h>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bubble_audit/analysis.h"
#include "bubble_audit/annotation_server.h"
#include "bubble_audit/annotation_service.h"
#include "bubble_audit/clock.h"
#include "bubble_audit/metrics.h"
#include "bubble_audit/observation_store.h"
#include "bubble_audit/reference_dataset.h"
#include "bubble_audit/report.h"
#include "bubble_audit/sim_platform.h"
#include "bubble_audit/stats.h"
#include "commands.h"
#include "httplib.h"
#include "json.hpp"

namespace bubble_audit::acceptance {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

Outcome Pass(std::string detail) { return {Status::kPass, std::move(detail)}; }
Outcome Fail(std::string detail) { return {Status::kFail, std::move(detail)}; }
Outcome Skip(std::string detail) { return {Status::kSkip, std::move(detail)}; }

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Scratch directory removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name) {
    path_ = (std::filesystem::temp_directory_path() /
             ("bubble_audit_acceptance_" + name + "_" +
              std::to_string(::getpid())))
                .string();
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::string& path() const { return path_; }
  std::string File(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) return absl::InternalError("cannot write " + path);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
  return absl::OkStatus();
}

std::string ReadText(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) return "";
  std::string text;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, n);
  std::fclose(f);
  return text;
}

// Runs one CLI command in process; on failure the captured stderr is kept.
struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult RunCli(const std::function<int(std::ostream&, std::ostream&)>& fn) {
  std::ostringstream out, err;
  CliResult r;
  r.code = fn(out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Builds the simulator catalog and runs one audit from `config_text` inside
// `data_dir`. Returns the run id or an error message.
absl::StatusOr<std::string> SimulatedAudit(const std::string& data_dir,
                                           const std::string& config_text) {
  cli::GlobalOptions g;
  g.data_dir = data_dir;
  if (!std::filesystem::exists(data_dir + "/catalog.jsonl")) {
    cli::CatalogBuildOptions catalog;
    catalog.spec_path = std::string(BUBBLE_AUDIT_SOURCE_DATA_DIR) +
                        "/catalog_spec.jsonl";
    CliResult r = RunCli([&](std::ostream& out, std::ostream& err) {
      return cli::CatalogBuild(g, catalog, out, err);
    });
    if (r.code != cli::kExitOk) {
      return absl::InternalError("catalog build failed: " + r.err);
    }
  }
  const std::string config_path = data_dir + "/audit.conf";
  if (absl::Status s = WriteText(config_path, config_text); !s.ok()) return s;
  CliResult r = RunCli([&](std::ostream& out, std::ostream& err) {
    return cli::AuditRun(g, cli::AuditRunOptions{config_path, false}, out, err);
  });
  if (r.code != cli::kExitOk) {
    return absl::InternalError("audit run exited " + std::to_string(r.code) +
                               ": " + r.err);
  }
  const std::vector<std::string> runs = ListRuns(data_dir);
  if (runs.empty()) return absl::InternalError("no run directory written");
  return runs.back();
}

// ---------------------------------------------------------------------------
// 1. Metric oracle equivalence.

double BruteSerpMs(const std::vector<int>& x) {
  const size_t n = x.size();
  double num = 0.0;
  double den = 0.0;
  for (size_t r = 1; r <= n; ++r) {
    num += x[r - 1] * static_cast<double>(n - r + 1);
    den += static_cast<double>(r);
  }
  return num / den;
}

double BruteNormalized(const std::vector<int>& x) {
  double sum = 0.0;
  for (int v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

Outcome MetricOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20210302);
  std::uniform_int_distribution<int> length(1, 20);
  std::uniform_int_distribution<int> stance(-1, 1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<int> x(static_cast<size_t>(length(rng)));
    for (int& v : x) v = stance(rng);
    absl::StatusOr<double> serp = SerpMs(x);
    absl::StatusOr<double> norm = NormalizedScore(x);
    if (!serp.ok() || !norm.ok()) {
      return Fail(Fmt("list %d rejected: %s", i,
                      std::string((serp.ok() ? norm : serp).status().message())
                          .c_str()));
    }
    worst = std::max({worst, std::abs(*serp - BruteSerpMs(x)),
                      std::abs(*norm - BruteNormalized(x))});
  }
  const double elapsed = Seconds(start);
  const std::string detail =
      Fmt("1000 lists, max abs error %.3g, %.3f s", worst, elapsed);
  if (worst > 1e-12) return Fail(detail + " (tolerance 1e-12)");
  if (elapsed >= 1.0) return Fail(detail + " (limit 1 s)");
  return Pass(detail);
}

// ---------------------------------------------------------------------------
// 2. Exact Mann-Whitney p against full enumeration.

// U of the sample marked by `mask` when position i holds the i-th smallest
// value: for each member, the non-members below it.
int MaskU(uint32_t mask, int n) {
  int u = 0;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) {
      u += below;
    } else {
      ++below;
    }
  }
  return u;
}

Outcome ExactTestOracle() {
  // Distinct, unevenly spaced values so no pair of samples ties.
  std::vector<double> grid;
  for (int i = 0; i < 14; ++i) grid.push_back(-1.0 + 0.13 * i + 0.001 * i * i);

  int checked = 0;
  double worst = 0.0;
  for (int n_a = 1; n_a <= 7; ++n_a) {
    for (int n_b = 1; n_b <= 7; ++n_b) {
      const int n = n_a + n_b;
      // Null distribution by enumerating every subset of size n_a.
      std::map<int, int64_t> hist;
      int64_t total = 0;
      std::vector<uint32_t> masks;
      for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != n_a) continue;
        ++hist[MaskU(mask, n)];
        ++total;
        masks.push_back(mask);
      }
      const int center2 = n_a * n_b;  // twice the null mean of U
      for (uint32_t mask : masks) {
        std::vector<double> a, b;
        for (int i = 0; i < n; ++i) {
          ((mask & (1u << i)) ? a : b).push_back(grid[static_cast<size_t>(i)]);
        }
        // Present the samples unsorted.
        std::reverse(a.begin(), a.end());
        std::rotate(b.begin(), b.begin() + (b.size() / 2), b.end());

        const int dist = std::abs(2 * MaskU(mask, n) - center2);
        int64_t extreme = 0;
        for (const auto& [u, count] : hist) {
          if (std::abs(2 * u - center2) >= dist) extreme += count;
        }
        const double oracle =
            static_cast<double>(extreme) / static_cast<double>(total);

        absl::StatusOr<MannWhitneyResult> r = MannWhitneyU(a, b);
        if (!r.ok()) {
          return Fail(Fmt("n_a=%d n_b=%d rejected: %s", n_a, n_b,
                          std::string(r.status().message()).c_str()));
        }
        if (r->mode != TestMode::kExact) {
          return Fail(Fmt("n_a=%d n_b=%d used mode %s", n_a, n_b,
                          std::string(TestModeName(r->mode)).c_str()));
        }
        worst = std::max(worst, std::abs(r->p - oracle));
        ++checked;
      }
    }
  }
  const std::string detail =
      Fmt("%d tie-free sample pairs, max abs error %.3g", checked, worst);
  if (worst > 1e-9) return Fail(detail + " (tolerance 1e-9)");
  return Pass(detail);
}

// ---------------------------------------------------------------------------
// 3. Bubble creation and bursting end to end.

const ComparisonRow* FindPooled(const PhaseReport& report,
                                const std::string& metric,
                                const std::string& from,
                                const std::string& to) {
  for (const ReportTable& t : report.tables) {
    if (t.metric != metric) continue;
    for (const ComparisonRow& row : t.rows) {
      if (row.pooled && row.a.point == from && row.b.point == to) return &row;
    }
  }
  return nullptr;
}

Outcome BubbleEndToEnd() {
  const auto start = Clock::now();
  ScratchDir dir("bubble");
  const std::string data = dir.File("data");
  absl::StatusOr<std::string> run_id = SimulatedAudit(data,
                                                      "topic_id = flat-earth\n"
                                                      "seed = 1\n"
                                                      "agents = 10\n"
                                                      "n_prom = 20\n"
                                                      "n_deb = 20\n"
                                                      "clock_mode = virtual\n"
                                                      "sim.w = 0.8\n"
                                                      "sim.lambda = 0.15\n"
                                                      "sim.noise_eps = 0\n");
  if (!run_id.ok()) return Fail(std::string(run_id.status().message()));

  // The comparison command itself must succeed in oracle mode.
  cli::GlobalOptions g;
  g.data_dir = data;
  g.oracle = true;
  CliResult compare = RunCli([&](std::ostream& out, std::ostream& err) {
    return cli::Compare(g, cli::CompareOptions{}, out, err);
  });
  if (compare.code != cli::kExitOk) {
    return Fail("compare exited " + std::to_string(compare.code) + ": " +
                compare.err);
  }

  absl::StatusOr<RunData> run = LoadRun(data, *run_id);
  absl::StatusOr<Catalog> catalog =
      Catalog::Load(data + "/catalog.jsonl", data + "/topics.jsonl");
  if (!run.ok()) return Fail(std::string(run.status().message()));
  if (!catalog.ok()) return Fail(std::string(catalog.status().message()));
  const OracleStanceSource oracle(*catalog);
  const std::vector<RunData> runs = {*run};
  const std::vector<MetricView> views = {MetricView::kSearchSerpMsTop10,
                                         MetricView::kRecommendationTop10};
  const PhaseReport report = BuildPhaseReport(runs, oracle, views);
  const double elapsed = Seconds(start);

  const ComparisonRow* rec_s1e1 =
      FindPooled(report, "recommendation-top10", "S1", "E1");
  const ComparisonRow* rec_e1e2 =
      FindPooled(report, "recommendation-top10", "E1", "E2");
  const ComparisonRow* search_s1e1 =
      FindPooled(report, "search-serp-ms-top10", "S1", "E1");
  if (rec_s1e1 == nullptr || rec_e1e2 == nullptr || search_s1e1 == nullptr) {
    return Fail("phase comparison rows missing");
  }
  auto verdict = [](const ComparisonRow* row) {
    return row->verdict ? std::string(VerdictName(*row->verdict))
                        : "none (" + row->gap_note + ")";
  };
  const std::string detail = Fmt(
      "recommendations S1->E1 %s (p=%.3g), E1->E2 %s (p=%.3g); search S1->E1 "
      "%s (p=%.3g); %.1f s",
      verdict(rec_s1e1).c_str(), rec_s1e1->p_value, verdict(rec_e1e2).c_str(),
      rec_e1e2->p_value, verdict(search_s1e1).c_str(), search_s1e1->p_value,
      elapsed);
  const bool ok = rec_s1e1->verdict == Verdict::kWorse &&
                  rec_s1e1->p_value < 0.01 &&
                  rec_e1e2->verdict == Verdict::kBetter &&
                  rec_e1e2->p_value < 0.01 &&
                  search_s1e1->verdict == Verdict::kNsd && elapsed < 120.0;
  return ok ? Pass(detail) : Fail(detail);
}

// ---------------------------------------------------------------------------
// 4. Protocol accounting.

Outcome ProtocolAccounting() {
  constexpr int kNProm = 40, kNDeb = 40, kFq = 2, kNq = 5;
  constexpr int kWatches = 80, kSearchPhases = 41, kQueryYields = 205,
                kHomepage = 81;

  ScratchDir dir("accounting");
  const std::string data = dir.File("data");
  absl::StatusOr<std::string> run_id = SimulatedAudit(
      data, Fmt("topic_id = flat-earth\nseed = 7\nagents = 1\nn_prom = %d\n"
                "n_deb = %d\nf_q = %d\nn_q = %d\nclock_mode = virtual\n",
                kNProm, kNDeb, kFq, kNq));
  if (!run_id.ok()) return Fail(std::string(run_id.status().message()));
  absl::StatusOr<RunData> run = LoadRun(data, *run_id);
  if (!run.ok()) return Fail(std::string(run.status().message()));
  if (run->manifest.agents.size() != 1) return Fail("expected one agent");
  const AgentAccounting& m = run->manifest.agents[0].accounting;

  // Recount from the observation log itself.
  std::set<int> rec_ordinals, search_ordinals, home_ordinals;
  std::set<std::pair<int, std::string>> queries;
  for (const Observation& o : run->observations) {
    switch (o.list_kind) {
      case ListKind::kRecommendation:
        rec_ordinals.insert(o.watch_ordinal);
        break;
      case ListKind::kSearch:
        search_ordinals.insert(o.watch_ordinal);
        queries.insert({o.watch_ordinal, o.source});
        break;
      case ListKind::kHomepage:
        home_ordinals.insert(o.watch_ordinal);
        break;
    }
  }
  const std::string counts = Fmt(
      "manifest %d/%d/%d/%d, log %zu/%zu/%zu/%zu (watches/search "
      "phases/query yields/homepage)",
      m.watches, m.search_phases, m.query_yields, m.homepage_snapshots,
      rec_ordinals.size(), search_ordinals.size(), queries.size(),
      home_ordinals.size());
  if (m.watches != kWatches || m.search_phases != kSearchPhases ||
      m.query_yields != kQueryYields || m.homepage_snapshots != kHomepage ||
      rec_ordinals.size() != size_t{kWatches} ||
      search_ordinals.size() != size_t{kSearchPhases} ||
      queries.size() != size_t{kQueryYields} ||
      home_ordinals.size() != size_t{kHomepage}) {
    return Fail(counts);
  }

  // Totals reported for the original 50-run audit. Runs there lost a few
  // watches, queries and homepage visits to platform failures, so each total
  // may fall short of the protocol's expectation but never exceed it. The
  // largest reported shortfall is 1.7% (queries); 2% is the allowed slack.
  constexpr int kRuns = 50;
  const std::tuple<const char*, int, int> totals[] = {
      {"watches", kRuns * kWatches, 3951},
      {"queries", kRuns * kQueryYields, 10075},
      {"homepage visits", kRuns * kHomepage, 3990}};
  std::string cross;
  for (const auto& [name, expected, reported] : totals) {
    const double shortfall =
        static_cast<double>(expected - reported) / expected;
    cross += Fmt("; %s %d expected vs %d reported (%.1f%% short)", name,
                 expected, reported, 100.0 * shortfall);
    if (reported > expected || shortfall > 0.02) return Fail(counts + cross);
  }
  return Pass(counts + cross);
}

// ---------------------------------------------------------------------------
// 5. Determinism.

// Manifest JSON without its wall-clock fields and without the catalog paths,
// which name the data directory.
std::string NormalizedManifest(const std::string& path) {
  json j = json::parse(ReadText(path), nullptr, false);
  if (j.is_discarded()) return "";
  j.erase("started_at");
  j.erase("finished_at");
  if (j.contains("config")) j["config"].erase("catalog");
  if (j.contains("adapter_params")) j["adapter_params"].erase("catalog");
  return j.dump();
}

Outcome Determinism() {
  constexpr char kConfig[] =
      "topic_id = flat-earth\nseed = %d\nagents = 3\nn_prom = 10\n"
      "n_deb = 10\nclock_mode = virtual\nsim.noise_eps = 0.05\n";
  ScratchDir dir("determinism");
  std::vector<std::string> logs, manifests;
  int index = 0;
  for (int seed : {11, 11, 12}) {
    const std::string data = dir.File("data" + std::to_string(index++));
    absl::StatusOr<std::string> run_id =
        SimulatedAudit(data, Fmt(kConfig, seed));
    if (!run_id.ok()) return Fail(std::string(run_id.status().message()));
    const std::string run_dir = RunDirectory(data, *run_id);
    absl::StatusOr<std::string> log = ReadRunLogText(run_dir);
    if (!log.ok()) return Fail(std::string(log.status().message()));
    logs.push_back(*log);
    manifests.push_back(NormalizedManifest(run_dir + "/manifest.json"));
  }
  const std::string detail = Fmt("%zu log bytes per run", logs[0].size());
  if (logs[0].empty()) return Fail("empty observation log");
  if (logs[0] != logs[1]) return Fail(detail + "; same seed, logs differ");
  if (manifests[0].empty() || manifests[0] != manifests[1]) {
    return Fail(detail + "; same seed, normalized manifests differ");
  }
  // Guards against a comparison that cannot fail.
  if (logs[0] == logs[2]) return Fail(detail + "; different seed, same log");
  return Pass(detail + ", identical for equal seeds, different for another");
}

// ---------------------------------------------------------------------------
// 6. Reference recomputation on the published dataset.

std::string TopicKey(const std::string& topic) {
  std::string key;
  for (char c : topic) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (key == "vaccines" || key == "antivax" || key == "vaccination") {
    return "antivaccination";
  }
  if (key == "911conspiracy" || key == "september11") return "911";
  return key;
}

Outcome ReferenceRecomputation() {
  const char* dataset_dir = std::getenv("BUBBLE_AUDIT_REFERENCE_DATASET");
  if (dataset_dir == nullptr || *dataset_dir == '\0') {
    return Skip("BUBBLE_AUDIT_REFERENCE_DATASET not set");
  }
  if (!std::filesystem::is_directory(dataset_dir)) {
    return Skip(std::string(dataset_dir) + " is not a directory");
  }
  absl::StatusOr<ReferenceDataset> dataset =
      ImportReferenceDataset(dataset_dir);
  if (!dataset.ok()) return Fail(std::string(dataset.status().message()));
  if (!dataset->report.all_loaded()) {
    return Fail("dataset import incomplete: " + dataset->report.Summary());
  }

  // Mean top-10 SERP-MS of the 2021 search results per topic, over the
  // queries shared with the reference data.
  const std::map<std::string, double> expected = {
      {"911", -0.06},         {"chemtrails", -0.47},
      {"flatearth", -0.41},   {"moonlanding", -0.59},
      {"antivaccination", -0.63}};
  const ReferenceSamples samples = ComputeReferenceSamples(
      *dataset, MetricView::kSearchSerpMsTop10, /*shared_queries_only=*/true);

  std::vector<double> all;
  std::map<std::string, double> got;
  for (const MetricSample& s : samples.samples) {
    if (s.label.point != kOursTag) continue;
    got[TopicKey(s.label.topic)] = Summarize(s.values).mean;
    all.insert(all.end(), s.values.begin(), s.values.end());
  }
  std::string detail;
  bool ok = true;
  for (const auto& [topic, want] : expected) {
    auto it = got.find(topic);
    if (it == got.end()) {
      detail += "; " + topic + " missing";
      ok = false;
      continue;
    }
    detail += Fmt("; %s %.3f (want %.2f)", topic.c_str(), it->second, want);
    ok = ok && std::abs(it->second - want) <= 0.01 + 1e-12;
  }
  if (all.empty()) return Fail("no search lists tagged " + std::string(kOursTag));
  const SummaryStats overall = Summarize(all);
  detail = Fmt("overall mean %.3f std %.3f (want -0.42, 0.3)", overall.mean,
               overall.std) +
           detail;
  // The overall standard deviation is only known to one decimal.
  ok = ok && std::abs(overall.mean + 0.42) <= 0.01 + 1e-12 &&
       std::abs(overall.std - 0.3) <= 0.05 + 1e-12;
  if (samples.incomplete_lists > 0) {
    detail += Fmt("; %d lists left out", samples.incomplete_lists);
  }
  return ok ? Pass(detail) : Fail(detail);
}

// ---------------------------------------------------------------------------
// 7. Kappa.

// Cohen's kappa from the confusion matrix.
double OracleKappa(const std::vector<std::pair<int, int>>& pairs) {
  std::map<int, double> row, col;
  double agree = 0.0;
  for (const auto& [x, y] : pairs) {
    row[x] += 1.0;
    col[y] += 1.0;
    if (x == y) agree += 1.0;
  }
  const double n = static_cast<double>(pairs.size());
  double chance = 0.0;
  for (const auto& [label, count] : row) {
    auto it = col.find(label);
    if (it != col.end()) chance += (count / n) * (it->second / n);
  }
  return (agree / n - chance) / (1.0 - chance);
}

// Two annotators code six videos through the HTTP API so that their stance
// confusion matrix is [[2,1],[1,2]]. Returns the served stance kappa.
absl::StatusOr<double> KappaOverHttp() {
  const std::map<std::string, std::pair<int, int>> codes = {
      {"v0", {1, 1}},   {"v1", {4, 1}},  {"v2", {1, -1}},
      {"v3", {2, 4}},   {"v4", {-1, 2}}, {"v5", {9, -1}}};
  std::vector<QueueEntry> queue;
  for (const auto& [id, unused] : codes) {
    QueueEntry e;
    e.video_id = id;
    e.appearance_count = 1;
    queue.push_back(e);
  }
  AnnotationStore store;
  VirtualClock clock;
  AnnotationService service(queue, {}, store, clock,
                            AnnotationServiceOptions{std::chrono::minutes(30), 2});
  AnnotationServer server(service);
  if (absl::Status s = server.Start("127.0.0.1", 0); !s.ok()) return s;
  httplib::Client client("127.0.0.1", server.port());

  for (int who = 0; who < 2; ++who) {
    const std::string annotator = who == 0 ? "alice" : "bob";
    for (int guard = 0; guard < 20; ++guard) {
      auto next = client.Get("/api/queue/next?annotator=" + annotator);
      if (!next || next->status != 200) {
        server.Stop();
        return absl::InternalError("queue/next failed for " + annotator);
      }
      const json body = json::parse(next->body);
      if (body["empty"].get<bool>()) break;
      const std::string video = body["item"]["video_id"];
      const auto& pair = codes.at(video);
      const json submission = {{"annotator_id", annotator},
                               {"video_id", video},
                               {"code", who == 0 ? pair.first : pair.second}};
      auto posted =
          client.Post("/api/annotations", submission.dump(), "application/json");
      if (!posted || posted->status != 200) {
        server.Stop();
        return absl::InternalError("annotation rejected for " + video);
      }
    }
  }
  auto agreement = client.Get("/api/agreement");
  server.Stop();
  if (!agreement || agreement->status != 200) {
    return absl::InternalError("agreement request failed");
  }
  const json body = json::parse(agreement->body);
  if (body["paired_videos"] != 6 || body["stance"].is_null()) {
    return absl::InternalError("agreement did not pair six videos: " +
                               agreement->body);
  }
  return body["stance"]["kappa"].get<double>();
}

Outcome KappaVectors() {
  struct Case {
    const char* name;
    std::vector<std::pair<int, int>> pairs;
    double want;
  };
  const std::vector<Case> cases = {
      {"perfect", {{1, 1}, {0, 0}, {-1, -1}, {1, 1}}, 1.0},
      {"[[2,1],[1,2]]", {{1, 1}, {1, 1}, {1, 0}, {0, 1}, {0, 0}, {0, 0}}, 1.0 / 3},
      {"total disagreement", {{1, 0}, {0, 1}, {1, 0}, {0, 1}}, -1.0}};
  std::string detail;
  bool ok = true;
  for (const Case& c : cases) {
    absl::StatusOr<KappaResult> k = CohensKappa(c.pairs);
    if (!k.ok()) return Fail(std::string(c.name) + " rejected");
    const double oracle = OracleKappa(c.pairs);
    detail += Fmt("%s%s %.4f", detail.empty() ? "" : ", ", c.name, k->kappa);
    ok = ok && std::abs(k->kappa - c.want) <= 1e-9 &&
         std::abs(oracle - c.want) <= 1e-9;
  }
  absl::StatusOr<double> served = KappaOverHttp();
  if (!served.ok()) return Fail(detail + "; " + served.status().ToString());
  detail += Fmt("; HTTP agreement %.4f", *served);
  ok = ok && std::abs(*served - 1.0 / 3) <= 1e-9;
  return ok ? Pass(detail) : Fail(detail);
}

int RunAll() {
  struct Criterion {
    int number;
    const char* name;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "metric oracle equivalence", MetricOracle},
      {2, "exact Mann-Whitney p vs enumeration", ExactTestOracle},
      {3, "bubble creation and bursting end to end", BubbleEndToEnd},
      {4, "protocol accounting", ProtocolAccounting},
      {5, "determinism", Determinism},
      {6, "reference dataset recomputation", ReferenceRecomputation},
      {7, "kappa test vectors", KappaVectors},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const Outcome o = c.fn();
    const char* tag = o.status == Status::kPass   ? "PASS"
                      : o.status == Status::kSkip ? "SKIP"
                                                  : "FAIL";
    if (o.status == Status::kFail) ++failures;
    std::cout << tag << " criterion " << c.number << " (" << c.name
              << "): " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace bubble_audit::acceptance

int main() { return bubble_audit::acceptance::RunAll(); }
