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

#include "commands.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bubble_audit/analysis.h"
#include "bubble_audit/annotation_server.h"
#include "bubble_audit/annotation_service.h"
#include "bubble_audit/clock.h"
#include "bubble_audit/config_file.h"
#include "bubble_audit/observation_store.h"
#include "bubble_audit/reference_dataset.h"
#include "bubble_audit/report.h"
#include "bubble_audit/scenario.h"
#include "bubble_audit/sim_platform.h"
#include "json.hpp"

namespace bubble_audit::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr char kTableIndex[] = "tables.json";

std::string DataPath(const GlobalOptions& g, const std::string& name) {
  return (fs::path(g.data_dir) / name).string();
}

int Fail(std::ostream& err, const absl::Status& status,
         int code = kExitError) {
  err << "error: " << status.message() << "\n";
  return code;
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) return absl::UnavailableError("cannot write " + path);
  f << text;
  f.close();
  if (!f) return absl::DataLossError("short write to " + path);
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadText(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return absl::NotFoundError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

absl::StatusOr<Catalog> LoadDataCatalog(const GlobalOptions& g) {
  const std::string items = DataPath(g, "catalog.jsonl");
  if (!fs::exists(items)) {
    return absl::NotFoundError("no catalog at " + items +
                               "; run `catalog build` first");
  }
  return Catalog::Load(items, DataPath(g, "topics.jsonl"));
}

absl::StatusOr<std::vector<RunData>> LoadRuns(
    const GlobalOptions& g, const std::vector<std::string>& ids) {
  std::vector<std::string> run_ids = ids;
  if (run_ids.empty()) run_ids = ListRuns(g.data_dir);
  if (run_ids.empty()) {
    return absl::NotFoundError("no runs under " + DataPath(g, "runs"));
  }
  std::vector<RunData> runs;
  for (const std::string& id : run_ids) {
    absl::StatusOr<RunData> run = LoadRun(g.data_dir, id);
    if (!run.ok()) return run.status();
    runs.push_back(std::move(*run));
  }
  return runs;
}

// Stance judgments: the simulator's ground truth under --oracle, otherwise
// the effective annotation codes.
struct Judgments {
  std::unique_ptr<Catalog> catalog;
  std::unique_ptr<StanceSource> source;
  std::string description;
};

absl::StatusOr<Judgments> LoadJudgments(const GlobalOptions& g) {
  Judgments j;
  if (g.oracle) {
    absl::StatusOr<Catalog> catalog = LoadDataCatalog(g);
    if (!catalog.ok()) return catalog.status();
    j.catalog = std::make_unique<Catalog>(std::move(*catalog));
    j.source = std::make_unique<OracleStanceSource>(*j.catalog);
    j.description = "oracle mode: simulator ground-truth stances";
    return j;
  }
  const std::string path = DataPath(g, "annotations.jsonl");
  absl::StatusOr<std::unique_ptr<AnnotationStore>> store =
      AnnotationStore::Open(path);
  if (!store.ok()) return store.status();
  std::map<std::string, AnnotationCode> codes = (*store)->EffectiveCodes();
  j.description = "human annotations: " + std::to_string(codes.size()) +
                  " videos with an effective code";
  j.source = std::make_unique<AnnotationStanceSource>(std::move(codes));
  return j;
}

void PrintGaps(std::ostream& err, int incomplete_lists,
               const std::vector<std::string>& missing_ids) {
  err << "gap: " << incomplete_lists
      << " lists left out because these videos have no usable annotation ("
      << missing_ids.size() << "):\n";
  for (const std::string& id : missing_ids) err << "  " << id << "\n";
}

absl::Status WriteTables(const std::string& dir, const std::string& prefix,
                         const std::vector<ReportTable>& tables,
                         std::ostream& out) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return absl::UnavailableError("cannot create " + dir);
  Json index = Json::array();
  for (const ReportTable& t : tables) {
    const std::string file = prefix + "-" + t.metric + ".csv";
    if (absl::Status s = WriteText((fs::path(dir) / file).string(),
                                   RenderTableCsv(t));
        !s.ok()) {
      return s;
    }
    index.push_back(
        Json{{"file", file}, {"title", t.title}, {"footnotes", t.footnotes}});
    out << RenderTableText(t) << "\n";
  }
  // Keep the entries of other comparisons already in the directory.
  const std::string index_path = (fs::path(dir) / kTableIndex).string();
  if (absl::StatusOr<std::string> old = ReadText(index_path); old.ok()) {
    Json prev = Json::parse(*old, nullptr, false);
    if (prev.is_array()) {
      for (const Json& entry : prev) {
        const std::string file = entry.value("file", "");
        if (file.rfind(prefix + "-", 0) != 0) index.push_back(entry);
      }
    }
  }
  return WriteText(index_path, index.dump(2) + "\n");
}

std::string AccountingLine(const AgentAccounting& a) {
  return "watches " + std::to_string(a.watches) + "/" +
         std::to_string(a.watch_attempts) + ", skipped " +
         std::to_string(a.skipped_videos) + ", search phases " +
         std::to_string(a.search_phases) + ", query yields " +
         std::to_string(a.query_yields) + "/" +
         std::to_string(a.query_attempts) + ", homepage " +
         std::to_string(a.homepage_snapshots) + ", recommendation lists " +
         std::to_string(a.recommendation_lists) + ", short lists " +
         std::to_string(a.short_lists);
}

std::vector<std::string> ManifestSummary(const RunManifest& m) {
  std::vector<std::string> lines;
  lines.push_back("run " + m.run_id + " (" + m.config.topic_id + ", seed " +
                  std::to_string(m.config.seed) + ", " +
                  std::to_string(m.agents.size()) + " agents, " +
                  (m.partial ? "partial" : "complete") + ")");
  lines.push_back("totals: " + AccountingLine(m.totals));
  for (const std::string& note : m.notes) lines.push_back("note: " + note);
  return lines;
}

template <typename T>
std::string FormatParam(T v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

absl::StatusOr<DataDirLock> DataDirLock::Acquire(const std::string& data_dir) {
  std::error_code ec;
  fs::create_directories(data_dir, ec);
  if (ec) {
    return absl::UnavailableError("cannot create data directory " + data_dir);
  }
  const std::string path = (fs::path(data_dir) / ".lock").string();
  const int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    return absl::UnavailableError("cannot open " + path + ": " +
                                  std::strerror(errno));
  }
  if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd);
    return absl::FailedPreconditionError(
        "another command holds " + path +
        "; commands run one at a time per data directory");
  }
  return DataDirLock(fd);
}

DataDirLock::DataDirLock(DataDirLock&& other) noexcept : fd_(other.fd_) {
  other.fd_ = -1;
}

DataDirLock& DataDirLock::operator=(DataDirLock&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

DataDirLock::~DataDirLock() {
  if (fd_ >= 0) ::close(fd_);
}

int CatalogBuild(const GlobalOptions& g, const CatalogBuildOptions& opts,
                 std::ostream& out, std::ostream& err) {
  absl::StatusOr<DataDirLock> lock = DataDirLock::Acquire(g.data_dir);
  if (!lock.ok()) return Fail(err, lock.status());
  absl::StatusOr<CatalogSpec> spec = LoadCatalogSpec(opts.spec_path);
  if (!spec.ok()) return Fail(err, spec.status());
  const uint64_t seed = g.seed.value_or(0);
  absl::StatusOr<Catalog> catalog =
      BuildCatalog(*spec, seed, opts.collect_min);
  if (!catalog.ok()) return Fail(err, catalog.status());

  std::vector<SeedSet> sets;
  for (const Topic& topic : catalog->topics()) {
    for (SeedKind kind : {SeedKind::kPromoting, SeedKind::kDebunking}) {
      absl::StatusOr<SeedSet> set =
          SelectSeedSet(*catalog, topic.id, kind, opts.seed_videos);
      if (!set.ok()) return Fail(err, set.status());
      sets.push_back(std::move(*set));
    }
  }
  if (absl::Status s = catalog->Save(DataPath(g, "catalog.jsonl"),
                                     DataPath(g, "topics.jsonl"));
      !s.ok()) {
    return Fail(err, s);
  }
  if (absl::Status s = WriteSeedSets(DataPath(g, "seed_sets.jsonl"), sets);
      !s.ok()) {
    return Fail(err, s);
  }
  out << "catalog: " << catalog->items().size() << " items, "
      << catalog->topics().size() << " topics, seed " << seed << "\n"
      << "seed sets: " << sets.size() << " x " << opts.seed_videos
      << " videos\n"
      << "wrote " << DataPath(g, "catalog.jsonl") << ", "
      << DataPath(g, "topics.jsonl") << ", "
      << DataPath(g, "seed_sets.jsonl") << "\n";
  return kExitOk;
}

int AuditRun(const GlobalOptions& g, const AuditRunOptions& opts,
             std::ostream& out, std::ostream& err) {
  absl::StatusOr<DataDirLock> lock = DataDirLock::Acquire(g.data_dir);
  if (!lock.ok()) return Fail(err, lock.status());
  absl::StatusOr<ConfigFile> config = LoadConfigFile(opts.config_path);
  if (!config.ok()) return Fail(err, config.status());
  RunConfig& rc = config->run;
  if (g.seed) rc.seed = *g.seed;
  if (g.virtual_clock) rc.clock_mode = ClockMode::kVirtual;
  config->sim.seed = rc.EffectiveAdapterSeed();
  config->sim.collect_min = rc.collect_min;
  if (absl::Status s = rc.Validate(); !s.ok()) return Fail(err, s);

  const std::string catalog_path = config->catalog_path.empty()
                                       ? DataPath(g, "catalog.jsonl")
                                       : config->catalog_path;
  const std::string topics_path = config->topics_path.empty()
                                      ? DataPath(g, "topics.jsonl")
                                      : config->topics_path;
  const std::string seeds_path = config->seed_sets_path.empty()
                                     ? DataPath(g, "seed_sets.jsonl")
                                     : config->seed_sets_path;
  if (!fs::exists(catalog_path)) {
    return Fail(err, absl::NotFoundError(
                         "catalog not found at " + catalog_path +
                         "; run `catalog build` or set `catalog` in the "
                         "config"));
  }
  absl::StatusOr<Catalog> loaded = Catalog::Load(catalog_path, topics_path);
  if (!loaded.ok()) return Fail(err, loaded.status());
  auto catalog = std::make_shared<const Catalog>(std::move(*loaded));
  const Topic* topic = catalog->FindTopic(rc.topic_id);
  if (topic == nullptr) {
    return Fail(err, absl::NotFoundError("topic '" + rc.topic_id +
                                         "' is not in the catalog"));
  }
  absl::StatusOr<std::vector<SeedSet>> sets = ReadSeedSets(seeds_path);
  if (!sets.ok()) return Fail(err, sets.status());

  ScenarioInputs inputs;
  inputs.config = rc;
  inputs.topic = *topic;
  bool have_prom = false;
  bool have_deb = false;
  for (const SeedSet& set : *sets) {
    if (set.topic_id != rc.topic_id) continue;
    const bool prom = set.kind == SeedKind::kPromoting;
    SeedSet& dest = prom ? inputs.promoting : inputs.debunking;
    dest = set;
    // Seed files list videos by priority; a shorter sequence uses the head.
    const size_t want = static_cast<size_t>(prom ? rc.n_prom : rc.n_deb);
    if (dest.videos.size() > want) dest.videos.resize(want);
    (prom ? have_prom : have_deb) = true;
  }
  if (!have_prom || !have_deb) {
    return Fail(err, absl::NotFoundError("seed sets for topic '" +
                                         rc.topic_id + "' missing in " +
                                         seeds_path));
  }

  const std::string run_dir = RunDirectory(g.data_dir, rc.EffectiveRunId());
  if (fs::exists(run_dir)) {
    return Fail(err, absl::AlreadyExistsError(
                         "run directory " + run_dir +
                         " already exists; choose another run_id or seed"));
  }
  std::error_code ec;
  fs::create_directories(run_dir, ec);
  if (ec) return Fail(err, absl::UnavailableError("cannot create " + run_dir));

  ScenarioOptions options;
  options.adapter_name = "sim";
  options.adapter_params = {
      {"sim.lambda", FormatParam(config->sim.lambda)},
      {"sim.w", FormatParam(config->sim.w)},
      {"sim.w_search", FormatParam(config->sim.SearchWeight())},
      {"sim.noise_eps", FormatParam(config->sim.noise_eps)},
      {"sim.rec_count", FormatParam(config->sim.rec_count)},
      {"catalog", catalog_path},
  };
  FileObservationStore store(run_dir);
  absl::StatusOr<RunManifest> manifest = RunScenario(
      inputs, MakeSimAdapterFactory(catalog, config->sim), store, options);
  if (!manifest.ok()) return Fail(err, manifest.status());
  const std::string manifest_path =
      (fs::path(run_dir) / "manifest.json").string();
  if (absl::Status s = WriteManifest(manifest_path, *manifest); !s.ok()) {
    return Fail(err, s);
  }

  for (const std::string& line : ManifestSummary(*manifest)) {
    out << line << "\n";
  }
  const AgentAccounting expected = ExpectedAgentAccounting(rc);
  out << "expected per agent: " << AccountingLine(expected) << "\n";
  for (const AgentStatus& a : manifest->agents) {
    out << "  " << a.agent_id << " " << AgentOutcomeName(a.outcome) << ": "
        << AccountingLine(a.accounting);
    if (!a.gaps.empty()) out << ", gaps " << a.gaps.size();
    if (!a.error.empty()) out << ", error: " << a.error;
    out << "\n";
  }
  out << "manifest: " << manifest_path << "\n";
  if (manifest->partial && !opts.allow_partial) {
    err << "error: run is partial; rerun with --allow-partial to accept it\n";
    return kExitPartial;
  }
  return kExitOk;
}

int MetricsCompute(const GlobalOptions& g, const MetricsComputeOptions& opts,
                   std::ostream& out, std::ostream& err) {
  absl::StatusOr<DataDirLock> lock = DataDirLock::Acquire(g.data_dir);
  if (!lock.ok()) return Fail(err, lock.status());
  std::vector<MetricView> views;
  for (const std::string& name : opts.views) {
    absl::StatusOr<MetricView> v = ParseMetricView(name);
    if (!v.ok()) return Fail(err, v.status(), kExitUsage);
    views.push_back(*v);
  }
  if (views.empty()) {
    views = {MetricView::kSearchSerpMsTop10, MetricView::kSearchSerpMsFull,
             MetricView::kRecommendationTop10, MetricView::kRecommendationTop6,
             MetricView::kRecommendationFull};
  }
  absl::StatusOr<std::vector<RunData>> runs = LoadRuns(g, opts.run_ids);
  if (!runs.ok()) return Fail(err, runs.status());
  absl::StatusOr<Judgments> judgments = LoadJudgments(g);
  if (!judgments.ok()) return Fail(err, judgments.status());

  std::ostringstream csv;
  csv << "run_id,agent_id,list_kind,phase,watch_ordinal,source,view,items,"
         "value\n";
  int incomplete = 0;
  std::set<std::string> missing;
  for (const RunData& run : *runs) {
    AnnotationOutcome annotated =
        AnnotateLists(GroupLists(run.observations), *judgments->source);
    incomplete += annotated.incomplete_lists;
    missing.insert(annotated.missing_ids.begin(), annotated.missing_ids.end());
    for (const AnnotatedList& list : annotated.lists) {
      for (MetricView view : views) {
        if (MetricViewKind(view) != list.kind) continue;
        absl::StatusOr<double> value = ApplyView(list, view);
        const ListProvenance& p = list.provenance;
        const Phase phase = p.phase_ordinal == 0 ? Phase::kInit
                            : p.phase_ordinal <= run.manifest.config.n_prom
                                ? Phase::kPromoting
                                : Phase::kDebunking;
        std::ostringstream value_text;
        if (value.ok()) {
          value_text.precision(6);
          value_text << std::fixed << *value;
        }
        std::string source = p.source;
        if (source.find_first_of(",\"\n") != std::string::npos) {
          std::string quoted = "\"";
          for (char c : source) {
            if (c == '"') quoted += '"';
            quoted += c;
          }
          source = quoted + "\"";
        }
        csv << p.run_id << "," << p.agent_id << "," << ListKindName(list.kind)
            << "," << PhaseName(phase) << "," << p.phase_ordinal << ","
            << source << "," << MetricViewName(view) << "," << list.size()
            << "," << value_text.str() << "\n";
      }
    }
  }
  if (opts.out_path.empty()) {
    out << csv.str();
  } else if (absl::Status s = WriteText(opts.out_path, csv.str()); !s.ok()) {
    return Fail(err, s);
  }
  if (incomplete > 0) {
    PrintGaps(err, incomplete, {missing.begin(), missing.end()});
    return kExitPartial;
  }
  return kExitOk;
}

int Compare(const GlobalOptions& g, const CompareOptions& opts,
            std::ostream& out, std::ostream& err) {
  absl::StatusOr<DataDirLock> lock = DataDirLock::Acquire(g.data_dir);
  if (!lock.ok()) return Fail(err, lock.status());
  const std::string out_dir =
      opts.out_dir.empty() ? DataPath(g, "tables") : opts.out_dir;

  if (!opts.dataset_dir.empty()) {
    absl::StatusOr<ReferenceDataset> dataset =
        ImportReferenceDataset(opts.dataset_dir);
    if (!dataset.ok()) return Fail(err, dataset.status());
    if (!dataset->report.all_loaded()) err << dataset->report.Summary();
    std::vector<ReportTable> tables;
    int incomplete = 0;
    std::set<std::string> missing;
    for (MetricView view :
         {MetricView::kSearchSerpMsTop10, MetricView::kRecommendationTop10,
          MetricView::kRecommendationTop6}) {
      ReferenceSamples samples =
          ComputeReferenceSamples(*dataset, view, opts.shared_queries_only);
      incomplete = std::max(incomplete, samples.incomplete_lists);
      missing.insert(samples.missing_ids.begin(), samples.missing_ids.end());
      ReportTable t;
      t.title = std::string(kReferenceTag) + " vs " + std::string(kOursTag) +
                ". " + std::string(MetricViewTitle(view));
      t.metric = std::string(MetricViewName(view));
      t.rows = CompareTags(samples.samples, kReferenceTag, kOursTag);
      if (opts.shared_queries_only && MetricViewKind(view) == ListKind::kSearch) {
        t.footnotes.push_back("search lists restricted to shared queries");
      }
      tables.push_back(std::move(t));
    }
    if (absl::Status s = WriteTables(out_dir, "reference", tables, out);
        !s.ok()) {
      return Fail(err, s);
    }
    if (incomplete > 0) {
      PrintGaps(err, incomplete, {missing.begin(), missing.end()});
      return kExitPartial;
    }
    return kExitOk;
  }

  absl::StatusOr<std::vector<RunData>> runs = LoadRuns(g, opts.run_ids);
  if (!runs.ok()) return Fail(err, runs.status());
  absl::StatusOr<Judgments> judgments = LoadJudgments(g);
  if (!judgments.ok()) return Fail(err, judgments.status());
  const std::vector<MetricView> views = {
      MetricView::kSearchSerpMsTop10, MetricView::kRecommendationTop10,
      MetricView::kSearchSerpMsFull, MetricView::kRecommendationFull};
  PhaseReport report = BuildPhaseReport(*runs, *judgments->source, views);
  for (ReportTable& t : report.tables) {
    t.footnotes.push_back(judgments->description);
  }
  if (absl::Status s = WriteTables(out_dir, "phase", report.tables, out);
      !s.ok()) {
    return Fail(err, s);
  }
  if (report.incomplete_lists > 0) {
    PrintGaps(err, report.incomplete_lists, report.missing_ids);
    return kExitPartial;
  }
  return kExitOk;
}

int Report(const GlobalOptions& g, const ReportOptions& opts,
           std::ostream& out, std::ostream& err) {
  absl::StatusOr<DataDirLock> lock = DataDirLock::Acquire(g.data_dir);
  if (!lock.ok()) return Fail(err, lock.status());
  const std::string dir =
      opts.tables_dir.empty() ? DataPath(g, "tables") : opts.tables_dir;

  std::vector<std::string> header = {"Filter bubble audit report"};
  if (!opts.manifest_path.empty()) {
    absl::StatusOr<RunManifest> m = ReadManifest(opts.manifest_path);
    if (!m.ok()) return Fail(err, m.status());
    for (const std::string& line : ManifestSummary(*m)) {
      header.push_back(line);
    }
  }

  // Titles and footnotes come from the index `compare` writes; bare CSVs
  // are titled by file name.
  std::vector<std::pair<std::string, Json>> entries;
  const std::string index_path = (fs::path(dir) / kTableIndex).string();
  if (absl::StatusOr<std::string> text = ReadText(index_path); text.ok()) {
    Json index = Json::parse(*text, nullptr, false);
    if (!index.is_array()) {
      return Fail(err, absl::DataLossError(index_path + " is not an array"));
    }
    for (const Json& e : index) entries.emplace_back(e.value("file", ""), e);
  } else if (fs::is_directory(dir)) {
    std::vector<std::string> files;
    for (const auto& f : fs::directory_iterator(dir)) {
      if (f.path().extension() == ".csv") {
        files.push_back(f.path().filename().string());
      }
    }
    std::sort(files.begin(), files.end());
    for (const std::string& f : files) entries.emplace_back(f, Json::object());
  }

  std::vector<ReportTable> tables;
  for (const auto& [file, meta] : entries) {
    absl::StatusOr<std::string> csv = ReadText((fs::path(dir) / file).string());
    if (!csv.ok()) return Fail(err, csv.status());
    const std::string title =
        meta.value("title", fs::path(file).stem().string());
    absl::StatusOr<ReportTable> table = ParseTableCsv(*csv, title);
    if (!table.ok()) return Fail(err, table.status());
    if (auto f = meta.find("footnotes"); f != meta.end() && f->is_array()) {
      table->footnotes = f->get<std::vector<std::string>>();
    }
    tables.push_back(std::move(*table));
  }
  const std::string text = RenderReport(header, tables);
  if (opts.out_path.empty()) {
    out << text;
  } else if (absl::Status s = WriteText(opts.out_path, text); !s.ok()) {
    return Fail(err, s);
  }
  return kExitOk;
}

int AnnotateServe(const GlobalOptions& g, const AnnotateServeOptions& opts,
                  std::ostream& out, std::ostream& err) {
  absl::StatusOr<DataDirLock> lock = DataDirLock::Acquire(g.data_dir);
  if (!lock.ok()) return Fail(err, lock.status());
  absl::StatusOr<std::vector<RunData>> runs = LoadRuns(g, opts.run_ids);
  if (!runs.ok()) return Fail(err, runs.status());
  std::vector<QueueEntry> queue = SelectAnnotationQueue(*runs);

  std::map<std::string, VideoMeta> metadata;
  if (absl::StatusOr<Catalog> catalog = LoadDataCatalog(g); catalog.ok()) {
    for (const CatalogItem& item : catalog->items()) {
      metadata[item.video_id] = VideoMeta{item.title, item.channel_id};
    }
  } else {
    err << "warning: " << catalog.status().message()
        << "; serving without titles\n";
  }
  absl::StatusOr<std::unique_ptr<AnnotationStore>> store =
      AnnotationStore::Open(DataPath(g, "annotations.jsonl"));
  if (!store.ok()) return Fail(err, store.status());

  std::unique_ptr<Clock> clock = MakeClock(ClockMode::kReal);
  AnnotationServiceOptions service_opts;
  service_opts.lease_timeout = std::chrono::minutes(opts.lease_minutes);
  service_opts.annotations_per_video = opts.annotations_per_video;
  AnnotationService service(std::move(queue), std::move(metadata), **store,
                            *clock, service_opts);
  AnnotationServer server(service);
  out << "serving " << service.queue_size() << " queued videos on http://"
      << opts.host << ":" << opts.port << "\n"
      << std::flush;
  if (absl::Status s = server.Run(opts.host, opts.port); !s.ok()) {
    return Fail(err, s);
  }
  return kExitOk;
}

int DatasetImport(const GlobalOptions& g, const DatasetImportOptions& opts,
                  std::ostream& out, std::ostream& err) {
  absl::StatusOr<DataDirLock> lock = DataDirLock::Acquire(g.data_dir);
  if (!lock.ok()) return Fail(err, lock.status());
  absl::StatusOr<ReferenceDataset> dataset =
      ImportReferenceDataset(opts.dataset_dir);
  if (!dataset.ok()) return Fail(err, dataset.status());
  out << dataset->report.Summary();
  std::map<std::pair<std::string, std::string>, int> counts;
  for (const ImportedList& l : dataset->lists) {
    ++counts[{l.tag, std::string(ListKindName(l.list.kind))}];
  }
  out << "annotated videos: " << dataset->codes.size() << "\n";
  for (const auto& [key, n] : counts) {
    out << "lists " << key.first << " " << key.second << ": " << n << "\n";
  }
  return dataset->report.all_loaded() ? kExitOk : kExitPartial;
}

int Main(int argc, char** argv) {
  GlobalOptions g;
  uint64_t seed = 0;
  CLI::App app{"Sockpuppet audit of misinformation filter bubbles"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--data-dir", g.data_dir, "Data directory")
      ->capture_default_str();
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "Override the configured seed");
  app.add_flag("--virtual-clock", g.virtual_clock,
               "Simulate waits instead of sleeping");
  app.add_flag("--oracle", g.oracle,
               "Use simulator ground truth instead of annotations");

  CatalogBuildOptions catalog_opts;
  CLI::App* catalog = app.add_subcommand("catalog", "Simulator catalogs");
  catalog->require_subcommand(1);
  CLI::App* build = catalog->add_subcommand("build", "Build a sim catalog");
  build->add_option("--spec", catalog_opts.spec_path, "Catalog spec JSONL")
      ->required();
  build->add_option("--seed-videos", catalog_opts.seed_videos,
                    "Videos per seed set")
      ->capture_default_str();
  build->add_option("--collect-min", catalog_opts.collect_min,
                    "Minimum results per query")
      ->capture_default_str();

  AuditRunOptions run_opts;
  CLI::App* audit = app.add_subcommand("audit", "Audit runs");
  audit->require_subcommand(1);
  CLI::App* run = audit->add_subcommand("run", "Run all agents of a config");
  run->add_option("config", run_opts.config_path, "Run config file")
      ->required();
  run->add_flag("--allow-partial", run_opts.allow_partial,
                "Exit 0 even when the run is partial");

  MetricsComputeOptions metrics_opts;
  CLI::App* metrics = app.add_subcommand("metrics", "Per-list metrics");
  metrics->require_subcommand(1);
  CLI::App* compute = metrics->add_subcommand("compute", "Metric per list");
  compute->add_option("--run", metrics_opts.run_ids, "Run ids (default all)");
  compute->add_option("--view", metrics_opts.views, "Metric views");
  compute->add_option("--out", metrics_opts.out_path, "CSV output file");

  CompareOptions compare_opts;
  CLI::App* compare =
      app.add_subcommand("compare", "Phase or reference comparisons");
  compare->add_option("--run", compare_opts.run_ids, "Run ids (default all)");
  compare->add_option("--dataset", compare_opts.dataset_dir,
                      "Reference dataset directory");
  compare->add_flag("--shared-queries", compare_opts.shared_queries_only,
                    "Only search queries present under both tags");
  compare->add_option("--out", compare_opts.out_dir,
                      "Table directory (default <data>/tables)");

  ReportOptions report_opts;
  CLI::App* report = app.add_subcommand("report", "Render a report");
  report->add_option("--tables", report_opts.tables_dir,
                     "Table directory (default <data>/tables)");
  report->add_option("--manifest", report_opts.manifest_path,
                     "Run manifest to summarize");
  report->add_option("--out", report_opts.out_path, "Output file");

  AnnotateServeOptions serve_opts;
  CLI::App* annotate = app.add_subcommand("annotate", "Annotation service");
  annotate->require_subcommand(1);
  CLI::App* serve = annotate->add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--run", serve_opts.run_ids, "Run ids (default all)");
  serve->add_option("--host", serve_opts.host)->capture_default_str();
  serve->add_option("--port", serve_opts.port)->capture_default_str();
  serve->add_option("--lease-minutes", serve_opts.lease_minutes)
      ->capture_default_str();
  serve->add_option("--annotations-per-video",
                    serve_opts.annotations_per_video)
      ->capture_default_str();

  DatasetImportOptions dataset_opts;
  CLI::App* dataset = app.add_subcommand("dataset", "Reference datasets");
  dataset->require_subcommand(1);
  CLI::App* import = dataset->add_subcommand("import", "Validate a dataset");
  import->add_option("dir", dataset_opts.dataset_dir, "Dataset directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  if (*build) return CatalogBuild(g, catalog_opts, out, err);
  if (*run) return AuditRun(g, run_opts, out, err);
  if (*compute) return MetricsCompute(g, metrics_opts, out, err);
  if (*compare) return Compare(g, compare_opts, out, err);
  if (*report) return Report(g, report_opts, out, err);
  if (*serve) return AnnotateServe(g, serve_opts, out, err);
  if (*import) return DatasetImport(g, dataset_opts, out, err);
  return kExitUsage;
}

}  // namespace bubble_audit::cli
