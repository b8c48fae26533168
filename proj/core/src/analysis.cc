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

#include "bubble_audit/analysis.h"

#include <algorithm>
#include <set>

namespace bubble_audit {

std::optional<StanceScore> OracleStanceSource::Lookup(
    std::string_view video_id) const {
  const CatalogItem* item = catalog_.Find(video_id);
  if (item == nullptr) return std::nullopt;
  return StanceScore::Of(item->true_stance);
}

std::optional<StanceScore> AnnotationStanceSource::Lookup(
    std::string_view video_id) const {
  auto it = codes_.find(video_id);
  if (it == codes_.end()) return std::nullopt;
  return CodeToStance(it->second);
}

std::vector<CollectedList> GroupLists(
    std::span<const Observation> observations) {
  std::vector<CollectedList> lists;
  const Observation* prev = nullptr;
  for (const Observation& obs : observations) {
    const bool continues =
        prev != nullptr && obs.rank == prev->rank + 1 &&
        obs.agent_id == prev->agent_id && obs.list_kind == prev->list_kind &&
        obs.watch_ordinal == prev->watch_ordinal && obs.source == prev->source &&
        obs.run_id == prev->run_id;
    if (!continues) {
      CollectedList list;
      list.kind = obs.list_kind;
      list.phase = obs.phase;
      list.provenance = {obs.run_id, obs.agent_id, obs.watch_ordinal,
                         obs.source};
      lists.push_back(std::move(list));
    }
    lists.back().video_ids.push_back(obs.video_id);
    prev = &obs;
  }
  return lists;
}

AnnotationOutcome AnnotateLists(std::span<const CollectedList> lists,
                                const StanceSource& source) {
  AnnotationOutcome out;
  std::set<std::string> missing;
  for (const CollectedList& list : lists) {
    std::vector<StanceEntry> entries;
    entries.reserve(list.video_ids.size());
    bool complete = true;
    for (const std::string& id : list.video_ids) {
      std::optional<StanceScore> score = source.Lookup(id);
      if (!score) {
        complete = false;
        missing.insert(id);
        continue;
      }
      entries.push_back({id, *score});
    }
    if (!complete) {
      ++out.incomplete_lists;
      continue;
    }
    out.lists.push_back(
        AnnotatedList{list.kind, CompactStances(entries), list.provenance});
  }
  out.missing_ids.assign(missing.begin(), missing.end());
  return out;
}

std::string_view MetricViewName(MetricView view) {
  switch (view) {
    case MetricView::kSearchSerpMsTop10:
      return "search-serp-ms-top10";
    case MetricView::kRecommendationTop10:
      return "recommendation-top10";
    case MetricView::kRecommendationTop6:
      return "recommendation-top6";
    case MetricView::kSearchSerpMsFull:
      return "search-serp-ms-full";
    case MetricView::kRecommendationFull:
      return "recommendation-full";
  }
  return "?";
}

std::string_view MetricViewTitle(MetricView view) {
  switch (view) {
    case MetricView::kSearchSerpMsTop10:
      return "Search results: SERP-MS, top-10";
    case MetricView::kSearchSerpMsFull:
      return "Search results: SERP-MS, full list";
    case MetricView::kRecommendationTop10:
      return "Recommendations: normalized score, top-10";
    case MetricView::kRecommendationTop6:
      return "Recommendations: normalized score, up-next + top-5";
    case MetricView::kRecommendationFull:
      return "Recommendations: normalized score, full list";
  }
  return "?";
}

absl::StatusOr<MetricView> ParseMetricView(std::string_view text) {
  for (MetricView v :
       {MetricView::kSearchSerpMsTop10, MetricView::kRecommendationTop10,
        MetricView::kRecommendationTop6, MetricView::kSearchSerpMsFull,
        MetricView::kRecommendationFull}) {
    if (MetricViewName(v) == text) return v;
  }
  return absl::InvalidArgumentError("unknown metric view '" +
                                    std::string(text) + "'");
}

ListKind MetricViewKind(MetricView view) {
  switch (view) {
    case MetricView::kSearchSerpMsTop10:
    case MetricView::kSearchSerpMsFull:
      return ListKind::kSearch;
    default:
      return ListKind::kRecommendation;
  }
}

absl::StatusOr<double> ApplyView(const AnnotatedList& list, MetricView view) {
  if (list.kind != MetricViewKind(view)) {
    return absl::InvalidArgumentError(
        std::string("view ") + std::string(MetricViewName(view)) +
        " does not apply to " + std::string(ListKindName(list.kind)) +
        " lists");
  }
  switch (view) {
    case MetricView::kSearchSerpMsTop10:
      return SerpMs(TopN(list, 10));
    case MetricView::kSearchSerpMsFull:
      return SerpMs(list);
    case MetricView::kRecommendationTop10:
      return NormalizedScore(TopN(list, 10));
    case MetricView::kRecommendationTop6:
      return NormalizedScore(TopN(list, 6));
    case MetricView::kRecommendationFull:
      return NormalizedScore(list);
  }
  return absl::InternalError("unhandled view");
}

PhaseSampleSet CollectPhaseSamples(std::span<const AnnotatedList> lists,
                                   const std::string& topic, int n_prom,
                                   int n_deb, MetricView view) {
  PhaseSampleSet out;
  const ListKind kind = MetricViewKind(view);
  for (PhasePoint point : kAllPhasePoints) {
    const std::vector<int> window = PhasePointWindow(point, n_prom, n_deb);
    MetricSample sample;
    sample.label = {topic, std::string(PhasePointName(point)), kind};
    for (const AnnotatedList& list : lists) {
      if (list.kind != kind ||
          std::find(window.begin(), window.end(),
                    list.provenance.phase_ordinal) == window.end()) {
        continue;
      }
      absl::StatusOr<double> value = ApplyView(list, view);
      if (!value.ok()) {
        ++out.empty_lists;
        continue;
      }
      sample.values.push_back(*value);
    }
    if (!sample.values.empty()) {
      out.samples.emplace(PhaseSampleKey{topic, point}, std::move(sample));
    }
  }
  return out;
}

MetricSample CollectSample(std::span<const AnnotatedList> lists,
                           const SampleLabel& label, MetricView view) {
  MetricSample sample{label, {}};
  for (const AnnotatedList& list : lists) {
    if (list.kind != MetricViewKind(view)) continue;
    absl::StatusOr<double> value = ApplyView(list, view);
    if (value.ok()) sample.values.push_back(*value);
  }
  return sample;
}

StanceShares ComputeStanceShares(std::span<const AnnotatedList> lists,
                                 ListKind kind, std::optional<PhasePoint> point,
                                 int n_prom, int n_deb, size_t top_n) {
  StanceShares shares;
  int counts[3] = {0, 0, 0};
  for (const AnnotatedList& list : lists) {
    if (list.kind != kind) continue;
    if (point && !InPhasePointWindow(*point, list.provenance.phase_ordinal,
                                     n_prom, n_deb)) {
      continue;
    }
    const size_t n = std::min(top_n, list.items.size());
    for (size_t i = 0; i < n; ++i) ++counts[list.items[i].stance + 1];
  }
  shares.items = counts[0] + counts[1] + counts[2];
  if (shares.items > 0) {
    shares.debunking = static_cast<double>(counts[0]) / shares.items;
    shares.neutral = static_cast<double>(counts[1]) / shares.items;
    shares.promoting = static_cast<double>(counts[2]) / shares.items;
  }
  return shares;
}

}  // namespace bubble_audit
