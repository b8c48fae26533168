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

// Import of an externally published audit dataset given as CSV files.
//
// The external layout is described by an adapter table rather than assumed
// to match ours. Each table row names a file, its role and the tag its lists
// are filed under, plus the accepted header names for each logical column.
// The default table is
//
//   annotations.csv                annotations   (video_id, code)
//   reference_search.csv           search        tag "reference"
//   reference_recommendations.csv  recommendations tag "reference"
//   ours_search.csv                search        tag "ours-2021"
//   ours_recommendations.csv       recommendations tag "ours-2021"
//
// List files need topic, list id, rank and video id columns; search files
// may carry a query column. A `dataset_adapter.json` in the directory
// replaces the default table.
//
// Every file is loaded or rejected as a whole and the report says which and
// why. Nothing is dropped silently.

#ifndef BUBBLE_AUDIT_REFERENCE_DATASET_H_
#define BUBBLE_AUDIT_REFERENCE_DATASET_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bubble_audit/analysis.h"
#include "bubble_audit/metrics.h"
#include "bubble_audit/stats.h"

namespace bubble_audit {

inline constexpr std::string_view kReferenceTag = "reference";
inline constexpr std::string_view kOursTag = "ours-2021";

enum class DatasetFileRole { kAnnotations, kSearch, kRecommendations };

struct DatasetColumns {
  std::vector<std::string> video_id = {"video_id", "youtube_id", "id"};
  std::vector<std::string> code = {"code", "annotation", "label"};
  std::vector<std::string> topic = {"topic", "topic_id"};
  std::vector<std::string> list_id = {"list_id", "serp_id", "run_id"};
  std::vector<std::string> rank = {"rank", "position"};
  std::vector<std::string> query = {"query", "search_term"};
};

struct DatasetFileSpec {
  std::string file_name;
  DatasetFileRole role = DatasetFileRole::kAnnotations;
  // Empty for annotation files.
  std::string tag;
};

struct DatasetAdapter {
  std::vector<DatasetFileSpec> files;
  DatasetColumns columns;
};

DatasetAdapter DefaultDatasetAdapter();

// {"files": [{"file": ..., "role": "annotations"|"search"|"recommendations",
//   "tag": ...}], "columns": {"video_id": [...], ...}}. Missing column keys
// keep their defaults.
absl::StatusOr<DatasetAdapter> ParseDatasetAdapter(std::string_view json);

struct FileDiagnostic {
  std::string file_name;
  bool loaded = false;
  int rows = 0;
  std::vector<std::string> messages;
};

struct ImportReport {
  std::vector<FileDiagnostic> files;

  bool all_loaded() const;
  std::string Summary() const;
};

struct ImportedList {
  std::string tag;
  std::string topic;
  std::string query;
  CollectedList list;
};

struct ReferenceDataset {
  ImportReport report;
  std::map<std::string, AnnotationCode> codes;
  std::vector<ImportedList> lists;
};

// Fails when the directory is missing or no file could be loaded; the
// message then carries the report. Otherwise rejected files are listed in
// the report and everything else is imported.
absl::StatusOr<ReferenceDataset> ImportReferenceDataset(
    const std::string& directory);
absl::StatusOr<ReferenceDataset> ImportReferenceDataset(
    const std::string& directory, const DatasetAdapter& adapter);

struct ReferenceSamples {
  // Per (topic, tag); the label's `point` holds the tag.
  std::vector<MetricSample> samples;
  int incomplete_lists = 0;
  std::vector<std::string> missing_ids;
};

// One metric value per imported list of the view's kind. When
// `shared_queries_only` is set, search lists whose query occurs under only
// one tag are left out.
ReferenceSamples ComputeReferenceSamples(const ReferenceDataset& dataset,
                                         MetricView view,
                                         bool shared_queries_only);

// Per-topic rows tag_a -> tag_b at Bonferroni(0.05, topic count), then one
// pooled row at 0.05. Topics missing either tag get a gap row.
std::vector<ComparisonRow> CompareTags(std::span<const MetricSample> samples,
                                       std::string_view tag_a,
                                       std::string_view tag_b);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_REFERENCE_DATASET_H_
