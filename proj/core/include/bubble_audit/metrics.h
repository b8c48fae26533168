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

// Stance metrics over annotated lists, plus the list-similarity measures used
// to size the experiment (overlap and rank distance between repeated runs).

#ifndef BUBBLE_AUDIT_METRICS_H_
#define BUBBLE_AUDIT_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "bubble_audit/domain.h"

namespace bubble_audit {

struct ListProvenance {
  std::string run_id;
  std::string agent_id;
  // Watch ordinal the list was collected at (0 = baseline).
  int phase_ordinal = 0;
  // Query string for SEARCH, watched video id for RECOMMENDATION.
  std::string source;
};

// An ordered list after stance mapping and compaction: items[i] has rank i+1.
struct AnnotatedList {
  ListKind kind = ListKind::kSearch;
  std::vector<ScoredItem> items;
  ListProvenance provenance;

  size_t size() const { return items.size(); }
};

// Mean of the stance values. Empty input is an error, never 0, and so is any
// value outside {-1, 0, 1}.
absl::StatusOr<double> NormalizedScore(std::span<const int> stances);
absl::StatusOr<double> NormalizedScore(const AnnotatedList& list);

// Rank-weighted misinformation score:
//   sum_r x_r * (n - r + 1) / (n (n + 1) / 2)
// so rank 1 carries weight n and rank n weight 1.
absl::StatusOr<double> SerpMs(std::span<const int> stances);
absl::StatusOr<double> SerpMs(const AnnotatedList& list);

// First `n` items (fewer if the list is shorter).
AnnotatedList TopN(const AnnotatedList& list, size_t n);

// Rank 1 of a recommendation list; nullopt for other kinds or empty lists.
std::optional<ScoredItem> UpNext(const AnnotatedList& list);

struct OverlapResult {
  double value = 0.0;
  // Both inputs empty; value is 1.0 by convention.
  bool both_empty = false;
};

// Jaccard index of the two id sets.
OverlapResult ListOverlap(std::span<const std::string> a,
                          std::span<const std::string> b);

// Levenshtein distance over id sequences with unit costs.
size_t RankDistance(std::span<const std::string> a,
                    std::span<const std::string> b);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_METRICS_H_
