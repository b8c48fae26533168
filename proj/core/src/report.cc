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

#include "bubble_audit/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>

#include "record_io.h"

namespace bubble_audit {

using internal::FormatDecimal;

namespace {

const std::vector<std::string> kCsvHeader = {
    "metric", "topic_a", "point_a", "topic_b", "point_b", "list_kind",
    "pooled", "n_a",     "n_b",     "mean_a",  "std_a",   "mean_b",
    "std_b",  "u",       "p",       "alpha",   "mode",    "verdict",
    "note",   "inspection"};

std::string RowNote(const ComparisonRow& row) {
  return row.gap_note.empty() ? row.direction_note : row.gap_note;
}

std::string Pad(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// p-values span many orders of magnitude, so they keep significant digits
// rather than a fixed number of decimals.
std::string FormatSignificant(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::optional<double> ParseDouble(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string RenderTableCsv(const ReportTable& table) {
  std::string out = internal::CsvLine(kCsvHeader);
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const ComparisonRow& r = table.rows[i];
    const bool gap = !r.verdict.has_value();
    out += internal::CsvLine({
        table.metric,
        r.a.topic,
        r.a.point,
        r.b.topic,
        r.b.point,
        std::string(ListKindName(r.a.kind)),
        r.pooled ? "true" : "false",
        std::to_string(r.n_a),
        std::to_string(r.n_b),
        gap ? "" : FormatDecimal(r.mean_a),
        gap ? "" : FormatDecimal(r.std_a),
        gap ? "" : FormatDecimal(r.mean_b),
        gap ? "" : FormatDecimal(r.std_b),
        gap ? "" : FormatDecimal(r.u_statistic),
        gap ? "" : FormatSignificant(r.p_value, 12),
        FormatDecimal(r.alpha_effective),
        gap ? "" : std::string(TestModeName(r.mode)),
        gap ? "" : std::string(VerdictName(*r.verdict)),
        RowNote(r),
        i < table.inspection.size() ? table.inspection[i] : "",
    });
  }
  return out;
}

absl::StatusOr<ReportTable> ParseTableCsv(std::string_view csv,
                                          std::string title) {
  absl::StatusOr<std::vector<std::vector<std::string>>> rows =
      internal::ParseCsv(csv);
  if (!rows.ok()) return rows.status();
  if (rows->empty() || (*rows)[0] != kCsvHeader) {
    return absl::InvalidArgumentError("table " + title +
                                      " does not have the comparison header");
  }
  ReportTable table;
  table.title = std::move(title);
  bool any_inspection = false;
  for (size_t i = 1; i < rows->size(); ++i) {
    const std::vector<std::string>& f = (*rows)[i];
    const std::string where = table.title + " row " + std::to_string(i + 1);
    if (f.size() != kCsvHeader.size()) {
      return absl::InvalidArgumentError(where + ": wrong field count");
    }
    absl::StatusOr<ListKind> kind = ParseListKind(f[5]);
    if (!kind.ok()) return kind.status();
    table.metric = f[0];
    ComparisonRow r;
    r.a = {f[1], f[2], *kind};
    r.b = {f[3], f[4], *kind};
    r.pooled = f[6] == "true";
    r.n_a = static_cast<size_t>(std::strtoull(f[7].c_str(), nullptr, 10));
    r.n_b = static_cast<size_t>(std::strtoull(f[8].c_str(), nullptr, 10));
    r.alpha_effective = ParseDouble(f[15]).value_or(kDefaultAlpha);
    if (f[17].empty()) {
      r.gap_note = f[18];
    } else {
      r.mean_a = ParseDouble(f[9]).value_or(0.0);
      r.std_a = ParseDouble(f[10]).value_or(0.0);
      r.mean_b = ParseDouble(f[11]).value_or(0.0);
      r.std_b = ParseDouble(f[12]).value_or(0.0);
      r.u_statistic = ParseDouble(f[13]).value_or(0.0);
      r.p_value = ParseDouble(f[14]).value_or(1.0);
      r.mode = f[16] == "exact"        ? TestMode::kExact
               : f[16] == "degenerate" ? TestMode::kDegenerate
                                       : TestMode::kNormal;
      if (f[17] == "BETTER") {
        r.verdict = Verdict::kBetter;
      } else if (f[17] == "WORSE") {
        r.verdict = Verdict::kWorse;
      } else if (f[17] == "NSD") {
        r.verdict = Verdict::kNsd;
      } else {
        return absl::InvalidArgumentError(where + ": unknown verdict '" +
                                          f[17] + "'");
      }
      r.direction_note = f[18];
    }
    any_inspection = any_inspection || !f[19].empty();
    table.inspection.push_back(f[19]);
    table.rows.push_back(std::move(r));
  }
  if (!any_inspection) table.inspection.clear();
  return table;
}

std::string RenderTableText(const ReportTable& table) {
  std::string out = table.title + "\n";
  if (!table.metric.empty()) out += "metric: " + table.metric + "\n";
  if (table.rows.empty()) return out + "  no data\n";
  const std::vector<std::string> head = {"topic", "pair",  "n",   "mean",
                                         "std",   "U",     "p",   "alpha",
                                         "change"};
  std::vector<std::vector<std::string>> cells = {head};
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const ComparisonRow& r = table.rows[i];
    std::vector<std::string> c;
    c.push_back(r.pooled ? "all (pooled)" : r.a.topic);
    c.push_back(r.a.point + "->" + r.b.point);
    c.push_back(std::to_string(r.n_a) + "/" + std::to_string(r.n_b));
    if (!r.verdict) {
      c.insert(c.end(), {"-", "-", "-", "-",
                         FormatDecimal(r.alpha_effective, 3),
                         "gap: " + r.gap_note});
    } else {
      c.push_back(FormatDecimal(r.mean_a, 2) + " -> " +
                  FormatDecimal(r.mean_b, 2));
      c.push_back(FormatDecimal(r.std_a, 2) + " / " +
                  FormatDecimal(r.std_b, 2));
      c.push_back(FormatDecimal(r.u_statistic, 1));
      c.push_back(FormatSignificant(r.p_value, 3));
      c.push_back(FormatDecimal(r.alpha_effective, 3));
      std::string change = std::string(VerdictName(*r.verdict));
      if (i < table.inspection.size() && !table.inspection[i].empty()) {
        change += "  " + table.inspection[i];
      }
      c.push_back(change);
    }
    cells.push_back(std::move(c));
  }
  std::vector<size_t> width(head.size(), 0);
  for (const auto& row : cells) {
    for (size_t j = 0; j + 1 < row.size(); ++j) {
      width[j] = std::max(width[j], row[j].size());
    }
  }
  for (const auto& row : cells) {
    std::string line = " ";
    for (size_t j = 0; j < row.size(); ++j) {
      line += " " + (j + 1 < row.size() ? Pad(row[j], width[j]) : row[j]);
    }
    out += line + "\n";
  }
  for (const std::string& f : table.footnotes) out += "  note: " + f + "\n";
  return out;
}

std::string_view HypothesisOutcomeName(HypothesisOutcome outcome) {
  switch (outcome) {
    case HypothesisOutcome::kSupported:
      return "SUPPORTED";
    case HypothesisOutcome::kNotSupported:
      return "NOT SUPPORTED";
    case HypothesisOutcome::kNoData:
      return "NO DATA";
  }
  return "?";
}

std::vector<HypothesisVerdict> EvaluateHypotheses(
    std::span<const ReportTable> tables) {
  struct Spec {
    const char* id;
    const char* from;
    const char* to;
    Verdict expected;
    const char* statement;
  };
  const Spec specs[] = {
      {"H1.1", "reference", "ours-2021", Verdict::kBetter,
       "after a promoting watch history, scores are better than in the "
       "reference study"},
      {"H2.0", "S1", "E1", Verdict::kWorse,
       "watching promoting videos increases their presence (metrics worsen "
       "from S1 to E1)"},
      {"H2.1", "E1", "E2", Verdict::kBetter,
       "watching debunking videos improves the metrics in comparison to the "
       "end of the promoting sequence"},
      {"H2.2", "S1", "E2", Verdict::kBetter,
       "watching debunking videos improves the metrics in comparison to the "
       "start of the experiment"},
  };
  // The top-10 views decide; other views only fill in when those are absent.
  std::vector<const ReportTable*> ordered;
  for (const ReportTable& t : tables) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ReportTable* a, const ReportTable* b) {
                     auto headline = [](const ReportTable* t) {
                       return t->metric == "search-serp-ms-top10" ||
                              t->metric == "recommendation-top10";
                     };
                     return headline(a) && !headline(b);
                   });
  std::vector<HypothesisVerdict> out;
  for (const Spec& spec : specs) {
    for (ListKind kind : {ListKind::kSearch, ListKind::kRecommendation}) {
      HypothesisVerdict v;
      v.id = spec.id;
      v.kind = kind;
      v.statement = spec.statement;
      for (const ReportTable* t : ordered) {
        for (const ComparisonRow& r : t->rows) {
          if (!r.pooled || r.a.kind != kind || r.a.point != spec.from ||
              r.b.point != spec.to || !r.verdict) {
            continue;
          }
          v.outcome = *r.verdict == spec.expected
                          ? HypothesisOutcome::kSupported
                          : HypothesisOutcome::kNotSupported;
          v.evidence = t->metric + ": " + std::string(VerdictName(*r.verdict)) +
                       " (U=" + FormatDecimal(r.u_statistic, 1) +
                       ", p=" + FormatSignificant(r.p_value, 3) + ")";
          break;
        }
        if (v.outcome != HypothesisOutcome::kNoData) break;
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::string RenderReport(std::span<const std::string> header,
                         std::span<const ReportTable> tables) {
  std::string out;
  for (const std::string& line : header) out += line + "\n";
  if (!header.empty()) out += "\n";
  if (tables.empty()) out += "Comparisons\n  no data\n\n";
  for (const ReportTable& t : tables) out += RenderTableText(t) + "\n";
  out += "Hypotheses\n";
  for (const HypothesisVerdict& v : EvaluateHypotheses(tables)) {
    out += "  " + v.id + " [" + std::string(ListKindName(v.kind)) + "] " +
           std::string(HypothesisOutcomeName(v.outcome)) + ": " + v.statement;
    if (!v.evidence.empty()) out += "; " + v.evidence;
    out += "\n";
  }
  return out;
}

namespace {

size_t ViewDepth(MetricView view) {
  switch (view) {
    case MetricView::kSearchSerpMsTop10:
    case MetricView::kRecommendationTop10:
      return 10;
    case MetricView::kRecommendationTop6:
      return 6;
    default:
      return kMaxRecommendations * 100;
  }
}

std::string Percent(double share) {
  return std::to_string(static_cast<int>(std::lround(share * 100.0))) + "%";
}

std::string ShareChange(const StanceShares& a, const StanceShares& b) {
  if (a.items == 0 || b.items == 0) return "";
  return "promoting " + Percent(a.promoting) + "->" + Percent(b.promoting) +
         ", debunking " + Percent(a.debunking) + "->" + Percent(b.debunking) +
         ", neutral " + Percent(a.neutral) + "->" + Percent(b.neutral);
}

}  // namespace

PhaseReport BuildPhaseReport(std::span<const RunData> runs,
                             const StanceSource& source,
                             std::span<const MetricView> views) {
  PhaseReport report;
  struct TopicLists {
    std::vector<AnnotatedList> lists;
    int n_prom = 0;
    int n_deb = 0;
  };
  std::map<std::string, TopicLists> by_topic;
  std::set<std::string> missing;
  for (const RunData& run : runs) {
    const std::vector<CollectedList> collected = GroupLists(run.observations);
    AnnotationOutcome annotated = AnnotateLists(collected, source);
    report.incomplete_lists += annotated.incomplete_lists;
    missing.insert(annotated.missing_ids.begin(), annotated.missing_ids.end());
    TopicLists& t = by_topic[run.manifest.config.topic_id];
    t.n_prom = run.manifest.config.n_prom;
    t.n_deb = run.manifest.config.n_deb;
    std::move(annotated.lists.begin(), annotated.lists.end(),
              std::back_inserter(t.lists));
  }
  report.missing_ids.assign(missing.begin(), missing.end());

  for (MetricView view : views) {
    ReportTable table;
    table.title = std::string(MetricViewTitle(view));
    table.metric = std::string(MetricViewName(view));
    PhaseSamples samples;
    for (const auto& [topic, t] : by_topic) {
      PhaseSampleSet set =
          CollectPhaseSamples(t.lists, topic, t.n_prom, t.n_deb, view);
      samples.merge(set.samples);
    }
    if (!samples.empty()) {
      table.rows = ComparePhases(samples, kStandardPhasePairs,
                                 /*per_topic=*/true, MetricViewKind(view));
    }
    for (const ComparisonRow& row : table.rows) {
      StanceShares share[2];
      int i = 0;
      for (const SampleLabel* label : {&row.a, &row.b}) {
        absl::StatusOr<PhasePoint> point = ParsePhasePoint(label->point);
        StanceShares total;
        int counts[3] = {0, 0, 0};
        for (const auto& [topic, t] : by_topic) {
          if (!row.pooled && topic != label->topic) continue;
          if (!point.ok()) continue;
          StanceShares s = ComputeStanceShares(t.lists, label->kind, *point,
                                               t.n_prom, t.n_deb,
                                               ViewDepth(view));
          counts[0] += static_cast<int>(std::lround(s.debunking * s.items));
          counts[1] += static_cast<int>(std::lround(s.neutral * s.items));
          counts[2] += static_cast<int>(std::lround(s.promoting * s.items));
          total.items += s.items;
        }
        if (total.items > 0) {
          total.debunking = static_cast<double>(counts[0]) / total.items;
          total.neutral = static_cast<double>(counts[1]) / total.items;
          total.promoting = static_cast<double>(counts[2]) / total.items;
        }
        share[i++] = total;
      }
      table.inspection.push_back(ShareChange(share[0], share[1]));
    }
    table.footnotes.push_back(
        "codes 6-8 (non-English, undeterminable, removed) are excluded and "
        "ranks compacted before scoring");
    if (report.incomplete_lists > 0) {
      table.footnotes.push_back(std::to_string(report.incomplete_lists) +
                                " lists left out for missing annotations");
    }
    report.tables.push_back(std::move(table));
  }
  return report;
}

}  // namespace bubble_audit
