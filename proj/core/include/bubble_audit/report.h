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

// Comparison tables and the hypothesis summary built on top of them.
//
// CSV renderings use six decimals (p-values twelve significant digits) and
// are byte-stable for identical input; text renderings round to two decimals.

#ifndef BUBBLE_AUDIT_REPORT_H_
#define BUBBLE_AUDIT_REPORT_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "bubble_audit/analysis.h"
#include "bubble_audit/domain.h"
#include "bubble_audit/observation_store.h"
#include "bubble_audit/stats.h"

namespace bubble_audit {

struct ReportTable {
  std::string title;
  // Metric view name, e.g. "search-serp-ms-top10".
  std::string metric;
  std::vector<ComparisonRow> rows;
  // Machine-computed change summary per row; empty or rows.size() long.
  std::vector<std::string> inspection;
  // Modelling choices that affected the numbers.
  std::vector<std::string> footnotes;
};

// Columns: metric, topic_a, point_a, topic_b, point_b, list_kind, pooled,
// n_a, n_b, mean_a, std_a, mean_b, std_b, u, p, alpha, mode, verdict, note,
// inspection.
std::string RenderTableCsv(const ReportTable& table);
absl::StatusOr<ReportTable> ParseTableCsv(std::string_view csv,
                                          std::string title);

std::string RenderTableText(const ReportTable& table);

enum class HypothesisOutcome { kSupported, kNotSupported, kNoData };
std::string_view HypothesisOutcomeName(HypothesisOutcome outcome);

struct HypothesisVerdict {
  // "H1.1", "H2.0", "H2.1" or "H2.2".
  std::string id;
  ListKind kind = ListKind::kSearch;
  HypothesisOutcome outcome = HypothesisOutcome::kNoData;
  std::string statement;
  // The pooled row the verdict rests on.
  std::string evidence;
};

// Evaluated on the pooled rows:
//   H1.1  reference -> ours is BETTER
//   H2.0  S1 -> E1 is WORSE
//   H2.1  E1 -> E2 is BETTER
//   H2.2  S1 -> E2 is BETTER
// once for search and once for recommendations.
std::vector<HypothesisVerdict> EvaluateHypotheses(
    std::span<const ReportTable> tables);

struct PhaseReport {
  std::vector<ReportTable> tables;
  // Lists left out because an item had no usable judgment.
  int incomplete_lists = 0;
  std::vector<std::string> missing_ids;
};

// Regroups, annotates and compares the S1/E1/E2 windows of every run, one
// table per view. Runs of the same topic are pooled into one sample.
PhaseReport BuildPhaseReport(std::span<const RunData> runs,
                             const StanceSource& source,
                             std::span<const MetricView> views);

// Full plain-text report: one section per table (or an explicit "no data"
// section), then the hypothesis summary. `header` lines come first.
std::string RenderReport(std::span<const std::string> header,
                         std::span<const ReportTable> tables);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_REPORT_H_
