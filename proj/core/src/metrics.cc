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

#include "bubble_audit/metrics.h"

#include <algorithm>
#include <numeric>
#include <set>

namespace bubble_audit {
namespace {

absl::Status EmptyListError(const char* metric) {
  return absl::FailedPreconditionError(std::string(metric) +
                                       " is undefined for an empty list");
}

absl::Status CheckStances(std::span<const int> stances, const char* metric) {
  for (size_t i = 0; i < stances.size(); ++i) {
    if (stances[i] < -1 || stances[i] > 1) {
      return absl::InvalidArgumentError(
          std::string(metric) + ": stance at rank " + std::to_string(i + 1) +
          " is " + std::to_string(stances[i]) + ", expected -1, 0 or 1");
    }
  }
  return absl::OkStatus();
}

std::vector<int> Stances(const AnnotatedList& list) {
  std::vector<int> out;
  out.reserve(list.items.size());
  for (const ScoredItem& item : list.items) out.push_back(item.stance);
  return out;
}

}  // namespace

absl::StatusOr<double> NormalizedScore(std::span<const int> stances) {
  if (stances.empty()) return EmptyListError("normalized score");
  if (absl::Status s = CheckStances(stances, "normalized score"); !s.ok()) {
    return s;
  }
  const long sum = std::accumulate(stances.begin(), stances.end(), 0L);
  return static_cast<double>(sum) / static_cast<double>(stances.size());
}

absl::StatusOr<double> NormalizedScore(const AnnotatedList& list) {
  return NormalizedScore(Stances(list));
}

absl::StatusOr<double> SerpMs(std::span<const int> stances) {
  if (stances.empty()) return EmptyListError("SERP-MS");
  if (absl::Status s = CheckStances(stances, "SERP-MS"); !s.ok()) return s;
  // Weights and the numerator are integers, so the only rounding happens in
  // the final division.
  const long n = static_cast<long>(stances.size());
  long numerator = 0;
  for (long r = 1; r <= n; ++r) {
    numerator += stances[static_cast<size_t>(r - 1)] * (n - r + 1);
  }
  const long denominator = n * (n + 1) / 2;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

absl::StatusOr<double> SerpMs(const AnnotatedList& list) {
  return SerpMs(Stances(list));
}

AnnotatedList TopN(const AnnotatedList& list, size_t n) {
  AnnotatedList out;
  out.kind = list.kind;
  out.provenance = list.provenance;
  const size_t keep = std::min(n, list.items.size());
  out.items.assign(list.items.begin(),
                   list.items.begin() + static_cast<ptrdiff_t>(keep));
  return out;
}

std::optional<ScoredItem> UpNext(const AnnotatedList& list) {
  if (list.kind != ListKind::kRecommendation || list.items.empty()) {
    return std::nullopt;
  }
  return list.items.front();
}

OverlapResult ListOverlap(std::span<const std::string> a,
                          std::span<const std::string> b) {
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return {1.0, true};
  size_t common = 0;
  for (const std::string& id : sa) common += sb.count(id);
  const size_t united = sa.size() + sb.size() - common;
  return {static_cast<double>(common) / static_cast<double>(united), false};
}

size_t RankDistance(std::span<const std::string> a,
                    std::span<const std::string> b) {
  // Two-row Wagner-Fischer.
  std::vector<size_t> prev(b.size() + 1);
  std::vector<size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), size_t{0});
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace bubble_audit
