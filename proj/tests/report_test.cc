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

#include <map>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace bubble_audit {
namespace {

using ::testing::HasSubstr;
using ::testing::Not;

ComparisonRow Row(const std::string& topic, const std::string& from,
                  const std::string& to, ListKind kind,
                  std::optional<Verdict> verdict, double p, bool pooled) {
  ComparisonRow r;
  r.a = {topic, from, kind};
  r.b = {topic, to, kind};
  r.pooled = pooled;
  r.n_a = 20;
  r.n_b = 20;
  r.alpha_effective = pooled ? 0.05 : 0.01;
  if (verdict) {
    r.verdict = verdict;
    r.mean_a = 0.123456789;
    r.mean_b = -0.5;
    r.std_a = 0.25;
    r.std_b = 1.0 / 3.0;
    r.u_statistic = 312.5;
    r.p_value = p;
    r.mode = TestMode::kNormal;
    r.direction_note = "mean -0.62 toward debunking";
  } else {
    r.gap_note = "missing sample " + topic + "/" + to;
  }
  return r;
}

ReportTable SampleTable() {
  ReportTable t;
  t.title = "Recommendations: normalized score, top-10";
  t.metric = "recommendation-top10";
  t.rows = {
      Row("moon", "S1", "E1", ListKind::kRecommendation, Verdict::kWorse,
          4.6875e-10, false),
      Row("vax", "S1", "E1", ListKind::kRecommendation, std::nullopt, 1, false),
      Row("all", "S1", "E1", ListKind::kRecommendation, Verdict::kWorse,
          1.25e-12, true),
      Row("all", "E1", "E2", ListKind::kRecommendation, Verdict::kBetter,
          0.0031, true),
      Row("all", "S1", "E2", ListKind::kRecommendation, Verdict::kNsd, 0.5,
          true)};
  t.inspection = {"promoting 10%->60%, with \"quotes\", and commas", "", "x",
                  "", ""};
  return t;
}

TEST(TableCsvTest, RoundTripIsByteStable) {
  const ReportTable t = SampleTable();
  const std::string csv = RenderTableCsv(t);
  EXPECT_EQ(csv, RenderTableCsv(t));
  ASSERT_OK_AND_ASSIGN(ReportTable back, ParseTableCsv(csv, t.title));
  EXPECT_EQ(RenderTableCsv(back), csv);
  ASSERT_EQ(back.rows.size(), 5u);
  EXPECT_EQ(back.metric, "recommendation-top10");
  EXPECT_EQ(back.rows[0].verdict, Verdict::kWorse);
  // Tiny p-values survive the text round trip.
  EXPECT_DOUBLE_EQ(back.rows[0].p_value, 4.6875e-10);
  EXPECT_DOUBLE_EQ(back.rows[2].p_value, 1.25e-12);
  EXPECT_FALSE(back.rows[1].verdict.has_value());
  EXPECT_EQ(back.rows[1].gap_note, "missing sample vax/E1");
  EXPECT_TRUE(back.rows[3].pooled);
  EXPECT_EQ(back.inspection[0], t.inspection[0]);
}

TEST(TableCsvTest, Layout) {
  const std::string csv = RenderTableCsv(SampleTable());
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "metric,topic_a,point_a,topic_b,point_b,list_kind,pooled,n_a,n_b,"
            "mean_a,std_a,mean_b,std_b,u,p,alpha,mode,verdict,note,inspection");
  EXPECT_THAT(csv, HasSubstr(",0.123457,0.250000,-0.500000,0.333333,"
                             "312.500000,4.6875e-10,0.010000,normal,WORSE,"));
  // Gap rows leave the statistics empty.
  EXPECT_THAT(csv, HasSubstr("vax,S1,vax,E1,RECOMMENDATION,false,20,20,,,,,,,"
                             "0.010000,,,missing sample vax/E1,"));
}

TEST(TableCsvTest, ParseErrors) {
  EXPECT_FALSE(ParseTableCsv("a,b\n1,2\n", "t").ok());
  std::string csv = RenderTableCsv(SampleTable());
  const std::string header = csv.substr(0, csv.find('\n') + 1);
  EXPECT_FALSE(ParseTableCsv(header + "x,y\n", "t").ok());
  std::string bad = csv;
  bad.replace(bad.find("WORSE"), 5, "MAYBE");
  absl::StatusOr<ReportTable> r = ParseTableCsv(bad, "t");
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(std::string(r.status().message()), HasSubstr("MAYBE"));
}

TEST(TableTextTest, RowsAndGaps) {
  ReportTable t = SampleTable();
  t.footnotes = {"codes 6-8 are excluded"};
  const std::string text = RenderTableText(t);
  EXPECT_THAT(text, HasSubstr("metric: recommendation-top10"));
  EXPECT_THAT(text, HasSubstr("all (pooled)"));
  EXPECT_THAT(text, HasSubstr("0.12 -> -0.50"));
  EXPECT_THAT(text, HasSubstr("4.69e-10"));
  EXPECT_THAT(text, HasSubstr("WORSE  promoting 10%->60%"));
  EXPECT_THAT(text, HasSubstr("gap: missing sample vax/E1"));
  EXPECT_THAT(text, HasSubstr("note: codes 6-8 are excluded"));

  ReportTable empty;
  empty.title = "Search results: SERP-MS, top-10";
  EXPECT_EQ(RenderTableText(empty), "Search results: SERP-MS, top-10\n  no data\n");
}

const HypothesisVerdict& Find(const std::vector<HypothesisVerdict>& all,
                              const std::string& id, ListKind kind) {
  for (const HypothesisVerdict& v : all) {
    if (v.id == id && v.kind == kind) return v;
  }
  static const HypothesisVerdict kMissing;
  ADD_FAILURE() << "no verdict " << id;
  return kMissing;
}

TEST(EvaluateHypothesesTest, UsesPooledRows) {
  const std::vector<ReportTable> tables = {SampleTable()};
  const std::vector<HypothesisVerdict> v = EvaluateHypotheses(tables);
  ASSERT_EQ(v.size(), 8u);
  const ListKind rec = ListKind::kRecommendation;
  EXPECT_EQ(Find(v, "H2.0", rec).outcome, HypothesisOutcome::kSupported);
  EXPECT_EQ(Find(v, "H2.1", rec).outcome, HypothesisOutcome::kSupported);
  EXPECT_EQ(Find(v, "H2.2", rec).outcome, HypothesisOutcome::kNotSupported);
  EXPECT_EQ(Find(v, "H1.1", rec).outcome, HypothesisOutcome::kNoData);
  EXPECT_EQ(Find(v, "H2.0", ListKind::kSearch).outcome,
            HypothesisOutcome::kNoData);
  EXPECT_EQ(Find(v, "H2.0", rec).evidence,
            "recommendation-top10: WORSE (U=312.5, p=1.25e-12)");
}

TEST(EvaluateHypothesesTest, HeadlineViewWinsOverFullList) {
  ReportTable full;
  full.metric = "recommendation-full";
  full.rows = {Row("all", "E1", "E2", ListKind::kRecommendation,
                   Verdict::kNsd, 0.4, true)};
  ReportTable top;
  top.metric = "recommendation-top10";
  top.rows = {Row("all", "E1", "E2", ListKind::kRecommendation,
                  Verdict::kBetter, 0.001, true)};
  const std::vector<ReportTable> tables = {full, top};
  EXPECT_EQ(Find(EvaluateHypotheses(tables), "H2.1", ListKind::kRecommendation)
                .outcome,
            HypothesisOutcome::kSupported);
  // Without the headline table the full-list view still answers.
  const std::vector<ReportTable> only_full = {full};
  EXPECT_EQ(
      Find(EvaluateHypotheses(only_full), "H2.1", ListKind::kRecommendation)
          .outcome,
      HypothesisOutcome::kNotSupported);
}

TEST(EvaluateHypothesesTest, ReferenceComparison) {
  ReportTable t;
  t.metric = "search-serp-ms-top10";
  t.rows = {Row("all", "reference", "ours-2021", ListKind::kSearch,
                Verdict::kBetter, 0.01, true)};
  const std::vector<ReportTable> tables = {t};
  EXPECT_EQ(Find(EvaluateHypotheses(tables), "H1.1", ListKind::kSearch).outcome,
            HypothesisOutcome::kSupported);
}

TEST(RenderReportTest, NoDataStillListsHypotheses) {
  const std::vector<std::string> header = {"Filter bubble audit report"};
  const std::string text = RenderReport(header, {});
  EXPECT_EQ(text.rfind("Filter bubble audit report\n\nComparisons\n  no data\n",
                       0),
            0u);
  EXPECT_THAT(text, HasSubstr("H2.1 [RECOMMENDATION] NO DATA"));
  EXPECT_THAT(text, Not(HasSubstr("SUPPORTED")));
}

// One topic, n_prom = n_deb = 4, three agents. Recommendations are neutral
// in S1, promoting at E1 and debunking at E2; search results stay neutral.
std::vector<RunData> SyntheticRuns() {
  RunData run;
  run.manifest.run_id = "moon-seed1";
  run.manifest.config.topic_id = "moon";
  run.manifest.config.n_prom = 4;
  run.manifest.config.n_deb = 4;
  auto add = [&run](const std::string& agent, ListKind kind, int ordinal,
                    const std::vector<std::string>& ids) {
    for (size_t i = 0; i < ids.size(); ++i) {
      Observation o;
      o.run_id = run.manifest.run_id;
      o.agent_id = agent;
      o.phase = ordinal == 0   ? Phase::kInit
                : ordinal <= 4 ? Phase::kPromoting
                               : Phase::kDebunking;
      o.watch_ordinal = ordinal;
      o.list_kind = kind;
      o.source = kind == ListKind::kSearch ? "q" : "seed";
      o.rank = static_cast<int>(i) + 1;
      o.video_id = ids[i];
      run.observations.push_back(o);
    }
  };
  for (const std::string agent : {"agent-00", "agent-01", "agent-02"}) {
    for (int ordinal = 0; ordinal <= 8; ordinal += 2) {
      add(agent, ListKind::kSearch, ordinal, {"n1", "n2"});
    }
    for (int ordinal = 1; ordinal <= 8; ++ordinal) {
      if (ordinal <= 2) add(agent, ListKind::kRecommendation, ordinal, {"n1", "n2"});
      if (ordinal == 3 || ordinal == 4) {
        add(agent, ListKind::kRecommendation, ordinal, {"p1", "p2"});
      }
      if (ordinal == 5) add(agent, ListKind::kRecommendation, ordinal, {"ghost"});
      if (ordinal >= 7) add(agent, ListKind::kRecommendation, ordinal, {"d1", "x"});
    }
  }
  return {run};
}

AnnotationStanceSource SyntheticCodes() {
  std::map<std::string, AnnotationCode> codes;
  for (const auto& [id, code] : std::map<std::string, int>{
           {"n1", 0}, {"n2", 5}, {"p1", 1}, {"p2", 4}, {"d1", -1}, {"x", 7}}) {
    codes.emplace(id, *AnnotationCode::Create(code));
  }
  return AnnotationStanceSource(std::move(codes));
}

TEST(BuildPhaseReportTest, BubbleShapeAndInspection) {
  const std::vector<RunData> runs = SyntheticRuns();
  const AnnotationStanceSource source = SyntheticCodes();
  const std::vector<MetricView> views = {MetricView::kSearchSerpMsTop10,
                                         MetricView::kRecommendationTop10};
  const PhaseReport report = BuildPhaseReport(runs, source, views);
  EXPECT_EQ(report.incomplete_lists, 3);
  EXPECT_EQ(report.missing_ids, std::vector<std::string>{"ghost"});
  ASSERT_EQ(report.tables.size(), 2u);

  const ReportTable& recs = report.tables[1];
  EXPECT_EQ(recs.metric, "recommendation-top10");
  ASSERT_EQ(recs.rows.size(), 6u);
  ASSERT_EQ(recs.inspection.size(), 6u);
  std::map<std::string, const ComparisonRow*> pooled;
  std::map<std::string, std::string> inspection;
  for (size_t i = 0; i < recs.rows.size(); ++i) {
    const ComparisonRow& r = recs.rows[i];
    if (!r.pooled) continue;
    pooled[r.a.point + r.b.point] = &r;
    inspection[r.a.point + r.b.point] = recs.inspection[i];
  }
  ASSERT_EQ(pooled.size(), 3u);
  EXPECT_EQ(pooled["S1E1"]->n_a, 6u);
  EXPECT_EQ(pooled["S1E1"]->verdict, Verdict::kWorse);
  EXPECT_EQ(pooled["E1E2"]->verdict, Verdict::kBetter);
  EXPECT_EQ(pooled["S1E2"]->verdict, Verdict::kBetter);
  EXPECT_DOUBLE_EQ(pooled["E1E2"]->mean_a, 1.0);
  // The excluded "x" leaves one debunking item per E2 list.
  EXPECT_DOUBLE_EQ(pooled["E1E2"]->mean_b, -1.0);
  EXPECT_EQ(inspection["S1E1"],
            "promoting 0%->100%, debunking 0%->0%, neutral 100%->0%");
  EXPECT_EQ(inspection["E1E2"],
            "promoting 100%->0%, debunking 0%->100%, neutral 0%->0%");

  const ReportTable& search = report.tables[0];
  for (const ComparisonRow& r : search.rows) {
    ASSERT_TRUE(r.verdict.has_value());
    EXPECT_EQ(*r.verdict, Verdict::kNsd);
  }
  EXPECT_THAT(recs.footnotes.back(), HasSubstr("3 lists left out"));
}

TEST(BuildPhaseReportTest, NoRunsGivesEmptyTables) {
  const AnnotationStanceSource source = SyntheticCodes();
  const std::vector<MetricView> views = {MetricView::kRecommendationTop10};
  const PhaseReport report = BuildPhaseReport({}, source, views);
  ASSERT_EQ(report.tables.size(), 1u);
  EXPECT_TRUE(report.tables[0].rows.empty());
  EXPECT_THAT(RenderTableText(report.tables[0]), HasSubstr("no data"));
}

}  // namespace
}  // namespace bubble_audit
