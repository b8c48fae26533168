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

// Nonparametric comparison of metric samples between measurement points and
// between datasets.

#ifndef BUBBLE_AUDIT_STATS_H_
#define BUBBLE_AUDIT_STATS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "bubble_audit/domain.h"

namespace bubble_audit {

inline constexpr double kDefaultAlpha = 0.05;
// Exact null distribution is used when both samples are at most this large
// and the pooled sample has no ties.
inline constexpr size_t kExactMaxSampleSize = 8;

struct SampleLabel {
  std::string topic;
  // "S1", "E1", "E2" or a dataset tag such as "reference".
  std::string point;
  ListKind kind = ListKind::kSearch;

  std::string ToString() const;
  friend bool operator==(const SampleLabel&, const SampleLabel&) = default;
};

struct MetricSample {
  SampleLabel label;
  std::vector<double> values;
};

enum class TestMode { kExact, kNormal, kDegenerate };
std::string_view TestModeName(TestMode mode);

struct MannWhitneyResult {
  // U of the first sample: pairs (a_i, b_j) with a_i > b_j, ties counting 1/2.
  double u = 0.0;
  // Two-sided p-value.
  double p = 1.0;
  TestMode mode = TestMode::kNormal;
  bool degenerate() const { return mode == TestMode::kDegenerate; }
};

// Two-sided Mann-Whitney U test. Average ranks for ties; exact p from the
// null distribution of U when both samples have at most kExactMaxSampleSize
// values and there are no ties, otherwise the normal approximation with
// tie-corrected variance and continuity correction. A pooled sample of
// identical values yields U = n_a n_b / 2, p = 1 and mode kDegenerate.
absl::StatusOr<MannWhitneyResult> MannWhitneyU(std::span<const double> a,
                                               std::span<const double> b);

// Number of rank subsets of size n_a out of n_a + n_b for each value of U,
// indexed by U in [0, n_a n_b].
std::vector<double> MannWhitneyNullCounts(int n_a, int n_b);

// alpha / m.
double Bonferroni(double alpha, int m);

enum class Verdict { kBetter, kWorse, kNsd };
std::string_view VerdictName(Verdict verdict);

struct ComparisonRow {
  SampleLabel a;
  SampleLabel b;
  size_t n_a = 0;
  size_t n_b = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double std_a = 0.0;
  double std_b = 0.0;
  double u_statistic = 0.0;
  double p_value = 1.0;
  double alpha_effective = kDefaultAlpha;
  TestMode mode = TestMode::kNormal;
  // Empty when a sample was missing; `gap_note` then says which.
  std::optional<Verdict> verdict;
  std::string direction_note;
  std::string gap_note;
  bool pooled = false;
};

// NSD iff p >= alpha. Otherwise a lower mean in `b` (movement toward -1, more
// debunking) is BETTER and a higher one WORSE. Equal means fall back to the
// direction of U.
Verdict DecideVerdict(double p, double alpha, double mean_a, double mean_b,
                      double u, size_t n_a, size_t n_b);

// Compares two samples at the given significance level.
ComparisonRow CompareSamples(const MetricSample& a, const MetricSample& b,
                             double alpha);

using PhaseSampleKey = std::pair<std::string, PhasePoint>;
using PhaseSamples = std::map<PhaseSampleKey, MetricSample>;
using PhasePair = std::pair<PhasePoint, PhasePoint>;

inline constexpr PhasePair kStandardPhasePairs[] = {
    {PhasePoint::kS1, PhasePoint::kE1},
    {PhasePoint::kE1, PhasePoint::kE2},
    {PhasePoint::kS1, PhasePoint::kE2},
};

// For every pair: one row per topic (alpha = Bonferroni(0.05, topic count))
// when `per_topic` is set, then one pooled row over all topics (alpha 0.05).
// A missing sample produces a row without verdict and with a gap note.
std::vector<ComparisonRow> ComparePhases(const PhaseSamples& samples,
                                         std::span<const PhasePair> pairs,
                                         bool per_topic, ListKind kind);

struct SummaryStats {
  double mean = 0.0;
  // Sample standard deviation (n - 1 denominator); 0 for a single value.
  double std = 0.0;
};
SummaryStats Summarize(std::span<const double> values);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_STATS_H_
