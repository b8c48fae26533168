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

// From raw observations to metric samples: regroup the log into lists,
// attach stances from annotations (or from the simulator's ground truth in
// oracle mode), and collect one metric value per list for each measurement
// point.

#ifndef BUBBLE_AUDIT_ANALYSIS_H_
#define BUBBLE_AUDIT_ANALYSIS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bubble_audit/domain.h"
#include "bubble_audit/metrics.h"
#include "bubble_audit/observation.h"
#include "bubble_audit/sim_platform.h"
#include "bubble_audit/stats.h"

namespace bubble_audit {

class StanceSource {
 public:
  virtual ~StanceSource() = default;
  // nullopt when no usable judgment exists yet.
  virtual std::optional<StanceScore> Lookup(std::string_view video_id) const = 0;
};

// Ground-truth stances of the simulator catalog.
class OracleStanceSource : public StanceSource {
 public:
  explicit OracleStanceSource(const Catalog& catalog) : catalog_(catalog) {}
  std::optional<StanceScore> Lookup(std::string_view video_id) const override;

 private:
  const Catalog& catalog_;
};

// Effective annotation codes, e.g. AnnotationStore::EffectiveCodes().
class AnnotationStanceSource : public StanceSource {
 public:
  explicit AnnotationStanceSource(std::map<std::string, AnnotationCode> codes)
      : codes_(codes.begin(), codes.end()) {}
  std::optional<StanceScore> Lookup(std::string_view video_id) const override;

 private:
  std::map<std::string, AnnotationCode, std::less<>> codes_;
};

// One list as collected, before stance mapping.
struct CollectedList {
  ListKind kind = ListKind::kSearch;
  Phase phase = Phase::kInit;
  ListProvenance provenance;
  std::vector<std::string> video_ids;
};

// Regroups observations into lists. A list is a run of observations of one
// agent with the same kind, ordinal and source whose ranks count up from 1.
std::vector<CollectedList> GroupLists(std::span<const Observation> observations);

struct AnnotationOutcome {
  std::vector<AnnotatedList> lists;
  // Lists left out because at least one item has no usable judgment.
  int incomplete_lists = 0;
  // Ids lacking a judgment, sorted and unique.
  std::vector<std::string> missing_ids;
};

// Maps every list through `source` and compacts excluded items. Lists with
// unjudged items are dropped and reported, never scored partially.
AnnotationOutcome AnnotateLists(std::span<const CollectedList> lists,
                                const StanceSource& source);

// How a list becomes one metric value.
enum class MetricView {
  // SERP-MS of the top 10 search results.
  kSearchSerpMsTop10,
  // Normalized score of the top 10 recommendations.
  kRecommendationTop10,
  // Normalized score of up-next plus the following five recommendations,
  // the view used when comparing against the reference study.
  kRecommendationTop6,
  // Full-list variants, reported for diagnostics.
  kSearchSerpMsFull,
  kRecommendationFull,
};

std::string_view MetricViewName(MetricView view);
absl::StatusOr<MetricView> ParseMetricView(std::string_view text);
// Human-readable table title, e.g. "Search results: SERP-MS, top-10".
std::string_view MetricViewTitle(MetricView view);
ListKind MetricViewKind(MetricView view);
absl::StatusOr<double> ApplyView(const AnnotatedList& list, MetricView view);

struct PhaseSampleSet {
  PhaseSamples samples;
  // Lists that produced no value (empty after compaction).
  int empty_lists = 0;
};

// One value per list of the view's kind whose ordinal falls inside a
// measurement window.
PhaseSampleSet CollectPhaseSamples(std::span<const AnnotatedList> lists,
                                   const std::string& topic, int n_prom,
                                   int n_deb, MetricView view);

// All values of the view's kind regardless of ordinal, labelled with `label`.
MetricSample CollectSample(std::span<const AnnotatedList> lists,
                           const SampleLabel& label, MetricView view);

// Share of each stance among the items of all lists in a sample window; the
// machine-computed replacement for a prose "inspection" column.
struct StanceShares {
  double debunking = 0.0;
  double neutral = 0.0;
  double promoting = 0.0;
  int items = 0;
};
StanceShares ComputeStanceShares(std::span<const AnnotatedList> lists,
                                 ListKind kind, std::optional<PhasePoint> point,
                                 int n_prom, int n_deb, size_t top_n);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_ANALYSIS_H_
