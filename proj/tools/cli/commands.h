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

// Subcommands of the `bubble-audit` tool. Each returns a process exit code
// and writes its output to the given streams, so they can be driven
// in-process by tests.
//
// Data directory layout:
//
//   <data>/catalog.jsonl, topics.jsonl, seed_sets.jsonl   from `catalog build`
//   <data>/runs/<run_id>/manifest.json, observations/*.jsonl
//   <data>/annotations.jsonl
//   <data>/.lock                                          held per command

#ifndef BUBBLE_AUDIT_TOOLS_CLI_COMMANDS_H_
#define BUBBLE_AUDIT_TOOLS_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace bubble_audit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPartial = 3;

struct GlobalOptions {
  std::string data_dir = "audit-data";
  std::optional<uint64_t> seed;
  bool virtual_clock = false;
  bool oracle = false;
};

// Exclusive advisory lock on <data>/.lock, released on destruction.
class DataDirLock {
 public:
  static absl::StatusOr<DataDirLock> Acquire(const std::string& data_dir);

  DataDirLock(DataDirLock&& other) noexcept;
  DataDirLock& operator=(DataDirLock&& other) noexcept;
  DataDirLock(const DataDirLock&) = delete;
  DataDirLock& operator=(const DataDirLock&) = delete;
  ~DataDirLock();

 private:
  explicit DataDirLock(int fd) : fd_(fd) {}
  int fd_ = -1;
};

struct CatalogBuildOptions {
  std::string spec_path;
  // Videos per seed set.
  int seed_videos = 40;
  int collect_min = 20;
};
int CatalogBuild(const GlobalOptions& global, const CatalogBuildOptions& opts,
                 std::ostream& out, std::ostream& err);

struct AuditRunOptions {
  std::string config_path;
  bool allow_partial = false;
};
int AuditRun(const GlobalOptions& global, const AuditRunOptions& opts,
             std::ostream& out, std::ostream& err);

struct MetricsComputeOptions {
  std::vector<std::string> run_ids;
  // Metric view names; all views when empty.
  std::vector<std::string> views;
  // CSV destination; stdout when empty.
  std::string out_path;
};
int MetricsCompute(const GlobalOptions& global,
                   const MetricsComputeOptions& opts, std::ostream& out,
                   std::ostream& err);

struct CompareOptions {
  // Phase comparison over these runs, or every run when empty and no
  // dataset is given.
  std::vector<std::string> run_ids;
  // Reference comparison over an imported dataset directory instead.
  std::string dataset_dir;
  bool shared_queries_only = false;
  // Where table CSVs go; <data>/tables when empty.
  std::string out_dir;
};
int Compare(const GlobalOptions& global, const CompareOptions& opts,
            std::ostream& out, std::ostream& err);

struct ReportOptions {
  // Directory of table CSVs written by `compare`.
  std::string tables_dir;
  // Optional manifest whose summary heads the report.
  std::string manifest_path;
  // Report destination; stdout when empty.
  std::string out_path;
};
int Report(const GlobalOptions& global, const ReportOptions& opts,
           std::ostream& out, std::ostream& err);

struct AnnotateServeOptions {
  std::vector<std::string> run_ids;
  std::string host = "127.0.0.1";
  int port = 8080;
  int lease_minutes = 30;
  int annotations_per_video = 1;
};
int AnnotateServe(const GlobalOptions& global,
                  const AnnotateServeOptions& opts, std::ostream& out,
                  std::ostream& err);

struct DatasetImportOptions {
  std::string dataset_dir;
};
int DatasetImport(const GlobalOptions& global,
                  const DatasetImportOptions& opts, std::ostream& out,
                  std::ostream& err);

// Parses argv and dispatches.
int Main(int argc, char** argv);

}  // namespace bubble_audit::cli

#endif  // BUBBLE_AUDIT_TOOLS_CLI_COMMANDS_H_
