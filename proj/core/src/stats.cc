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

#include "bubble_audit/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "record_io.h"

namespace bubble_audit {
namespace {

// Pooled ranks (1-based, averaged over ties) and the tie term sum(t^3 - t).
struct Ranking {
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  bool has_ties = false;
};

Ranking RankPooled(std::span<const double> a, std::span<const double> b) {
  struct Entry {
    double value;
    bool from_a;
  };
  std::vector<Entry> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Entry& x, const Entry& y) { return x.value < y.value; });

  Ranking out;
  size_t i = 0;
  while (i < pooled.size()) {
    size_t j = i;
    while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
    const double t = static_cast<double>(j - i);
    const double avg_rank = (static_cast<double>(i + 1 + j)) / 2.0;
    for (size_t k = i; k < j; ++k) {
      if (pooled[k].from_a) out.rank_sum_a += avg_rank;
    }
    if (t > 1) {
      out.has_ties = true;
      out.tie_term += t * t * t - t;
    }
    i = j;
  }
  return out;
}

double SampleStd(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::string FormatMeanChange(double mean_a, double mean_b) {
  std::string note = "mean " + internal::FormatDecimal(mean_a, 2) + " -> " +
                     internal::FormatDecimal(mean_b, 2);
  // Means of the same values summed in a different order may differ in the
  // last bits.
  constexpr double kSameMean = 1e-12;
  if (mean_b < mean_a - kSameMean) {
    note += " (toward debunking)";
  } else if (mean_b > mean_a + kSameMean) {
    note += " (toward promoting)";
  } else {
    note += " (unchanged)";
  }
  return note;
}

}  // namespace

std::string SampleLabel::ToString() const {
  return topic + "/" + point + "/" + std::string(ListKindName(kind));
}

std::string_view TestModeName(TestMode mode) {
  switch (mode) {
    case TestMode::kExact:
      return "exact";
    case TestMode::kNormal:
      return "normal";
    case TestMode::kDegenerate:
      return "degenerate";
  }
  return "?";
}

std::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kBetter:
      return "BETTER";
    case Verdict::kWorse:
      return "WORSE";
    case Verdict::kNsd:
      return "NSD";
  }
  return "?";
}

std::vector<double> MannWhitneyNullCounts(int n_a, int n_b) {
  // counts[i][j][u]: rank arrangements of i values from `a` and j from `b`
  // with statistic u. The largest pooled value either belongs to `a` (and
  // beats all j values of `b`) or to `b`.
  std::vector<std::vector<std::vector<double>>> counts(
      n_a + 1, std::vector<std::vector<double>>(n_b + 1));
  for (int i = 0; i <= n_a; ++i) {
    for (int j = 0; j <= n_b; ++j) {
      std::vector<double>& c = counts[i][j];
      c.assign(static_cast<size_t>(i * j + 1), 0.0);
      if (i == 0 || j == 0) {
        c[0] = 1.0;
        continue;
      }
      const std::vector<double>& top_a = counts[i - 1][j];
      for (size_t u = 0; u < top_a.size(); ++u) c[u + j] += top_a[u];
      const std::vector<double>& top_b = counts[i][j - 1];
      for (size_t u = 0; u < top_b.size(); ++u) c[u] += top_b[u];
    }
  }
  return counts[n_a][n_b];
}

absl::StatusOr<MannWhitneyResult> MannWhitneyU(std::span<const double> a,
                                               std::span<const double> b) {
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError(
        "Mann-Whitney U needs at least one value per sample");
  }
  for (std::span<const double> s : {a, b}) {
    for (double v : s) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError("sample contains a non-finite value");
      }
    }
  }
  const double n_a = static_cast<double>(a.size());
  const double n_b = static_cast<double>(b.size());
  const double n = n_a + n_b;
  const Ranking ranking = RankPooled(a, b);

  MannWhitneyResult result;
  result.u = ranking.rank_sum_a - n_a * (n_a + 1.0) / 2.0;

  const double tie_factor = (n + 1.0) - ranking.tie_term / (n * (n - 1.0));
  if (n < 2 || tie_factor <= 1e-9) {
    result.u = n_a * n_b / 2.0;
    result.p = 1.0;
    result.mode = TestMode::kDegenerate;
    return result;
  }

  if (!ranking.has_ties && a.size() <= kExactMaxSampleSize &&
      b.size() <= kExactMaxSampleSize) {
    const std::vector<double> counts = MannWhitneyNullCounts(
        static_cast<int>(a.size()), static_cast<int>(b.size()));
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto u = static_cast<size_t>(std::llround(result.u));
    double lower = 0.0;
    for (size_t k = 0; k <= u; ++k) lower += counts[k];
    double upper = 0.0;
    for (size_t k = u; k < counts.size(); ++k) upper += counts[k];
    result.p = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    result.mode = TestMode::kExact;
    return result;
  }

  const double mu = n_a * n_b / 2.0;
  const double sigma = std::sqrt(n_a * n_b / 12.0 * tie_factor);
  const double u_big = std::max(result.u, n_a * n_b - result.u);
  const double z = (u_big - mu - 0.5) / sigma;
  result.p = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
  result.mode = TestMode::kNormal;
  return result;
}

double Bonferroni(double alpha, int m) { return alpha / m; }

SummaryStats Summarize(std::span<const double> values) {
  SummaryStats s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  s.std = SampleStd(values, s.mean);
  return s;
}

Verdict DecideVerdict(double p, double alpha, double mean_a, double mean_b,
                      double u, size_t n_a, size_t n_b) {
  if (p >= alpha) return Verdict::kNsd;
  if (mean_b < mean_a) return Verdict::kBetter;
  if (mean_b > mean_a) return Verdict::kWorse;
  // U above its null mean means `a` tends to exceed `b`.
  const double mid = static_cast<double>(n_a) * static_cast<double>(n_b) / 2;
  return u >= mid ? Verdict::kBetter : Verdict::kWorse;
}

ComparisonRow CompareSamples(const MetricSample& a, const MetricSample& b,
                             double alpha) {
  ComparisonRow row;
  row.a = a.label;
  row.b = b.label;
  row.alpha_effective = alpha;
  row.n_a = a.values.size();
  row.n_b = b.values.size();
  if (a.values.empty() || b.values.empty()) {
    row.gap_note = std::string("empty sample: ") +
                   (a.values.empty() ? a.label.ToString() : b.label.ToString());
    return row;
  }
  const SummaryStats sa = Summarize(a.values);
  const SummaryStats sb = Summarize(b.values);
  row.mean_a = sa.mean;
  row.std_a = sa.std;
  row.mean_b = sb.mean;
  row.std_b = sb.std;
  absl::StatusOr<MannWhitneyResult> test = MannWhitneyU(a.values, b.values);
  if (!test.ok()) {
    row.gap_note = std::string(test.status().message());
    return row;
  }
  row.u_statistic = test->u;
  row.p_value = test->p;
  row.mode = test->mode;
  row.verdict = DecideVerdict(row.p_value, alpha, row.mean_a, row.mean_b,
                              row.u_statistic, row.n_a, row.n_b);
  row.direction_note = FormatMeanChange(row.mean_a, row.mean_b);
  if (test->degenerate()) row.direction_note += "; degenerate (no variance)";
  return row;
}

std::vector<ComparisonRow> ComparePhases(const PhaseSamples& samples,
                                         std::span<const PhasePair> pairs,
                                         bool per_topic, ListKind kind) {
  std::set<std::string> topics;
  for (const auto& [key, sample] : samples) topics.insert(key.first);
  const int topic_count = std::max<int>(1, static_cast<int>(topics.size()));
  const double topic_alpha = Bonferroni(kDefaultAlpha, topic_count);

  auto label = [&](const std::string& topic, PhasePoint point) {
    return SampleLabel{topic, std::string(PhasePointName(point)), kind};
  };

  std::vector<ComparisonRow> rows;
  for (const auto& [pa, pb] : pairs) {
    if (per_topic) {
      for (const std::string& topic : topics) {
        auto ia = samples.find({topic, pa});
        auto ib = samples.find({topic, pb});
        if (ia == samples.end() || ib == samples.end()) {
          ComparisonRow gap;
          gap.a = label(topic, pa);
          gap.b = label(topic, pb);
          gap.alpha_effective = topic_alpha;
          gap.gap_note = "missing sample " +
                         (ia == samples.end() ? gap.a : gap.b).ToString();
          rows.push_back(std::move(gap));
          continue;
        }
        rows.push_back(CompareSamples(ia->second, ib->second, topic_alpha));
      }
    }
    MetricSample pooled_a{label("all", pa), {}};
    MetricSample pooled_b{label("all", pb), {}};
    for (const auto& [key, sample] : samples) {
      if (key.second == pa) {
        pooled_a.values.insert(pooled_a.values.end(), sample.values.begin(),
                               sample.values.end());
      }
      if (key.second == pb) {
        pooled_b.values.insert(pooled_b.values.end(), sample.values.begin(),
                               sample.values.end());
      }
    }
    ComparisonRow pooled;
    if (pooled_a.values.empty() || pooled_b.values.empty()) {
      pooled.a = pooled_a.label;
      pooled.b = pooled_b.label;
      pooled.alpha_effective = kDefaultAlpha;
      pooled.gap_note =
          "missing sample " +
          (pooled_a.values.empty() ? pooled_a.label : pooled_b.label)
              .ToString();
    } else {
      pooled = CompareSamples(pooled_a, pooled_b, kDefaultAlpha);
    }
    pooled.pooled = true;
    rows.push_back(std::move(pooled));
  }
  return rows;
}

}  // namespace bubble_audit
