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

#include "bubble_audit/domain.h"

#include <algorithm>
#include <map>
#include <set>

#include "bubble_audit/run_config.h"
#include "record_io.h"

namespace bubble_audit {

using internal::Json;

std::string_view StanceName(Stance stance) {
  switch (stance) {
    case Stance::kDebunking:
      return "debunking";
    case Stance::kNeutral:
      return "neutral";
    case Stance::kPromoting:
      return "promoting";
  }
  return "?";
}

absl::StatusOr<Stance> ParseStance(std::string_view text) {
  if (text == "debunking" || text == "-1") return Stance::kDebunking;
  if (text == "neutral" || text == "0") return Stance::kNeutral;
  if (text == "promoting" || text == "1" || text == "+1") {
    return Stance::kPromoting;
  }
  return absl::InvalidArgumentError("unknown stance '" + std::string(text) +
                                    "'");
}

absl::StatusOr<AnnotationCode> AnnotationCode::Create(int code,
                                                      std::string_view record) {
  if (!IsAdmissible(code)) {
    std::string msg = "inadmissible annotation code " + std::to_string(code);
    if (!record.empty()) msg += " in record " + std::string(record);
    return absl::InvalidArgumentError(msg);
  }
  return AnnotationCode(code);
}

std::vector<AnnotationCode> AnnotationCode::All() {
  std::vector<AnnotationCode> all;
  for (int c = kMin; c <= kMax; ++c) all.push_back(AnnotationCode(c));
  return all;
}

std::string_view AnnotationCode::Description() const {
  switch (code_) {
    case -1:
      return "debunking";
    case 0:
      return "neutral";
    case 1:
      return "promoting";
    case 2:
      return "debunking (unrelated misinformation)";
    case 3:
      return "neutral (unrelated misinformation)";
    case 4:
      return "promoting (unrelated misinformation)";
    case 5:
      return "not about misinformation";
    case 6:
      return "non-English";
    case 7:
      return "cannot be determined";
    case 8:
      return "removed";
    case 9:
      return "mocking";
    case 10:
      return "mocking (unrelated misinformation)";
  }
  return "?";
}

StanceScore CodeToStance(AnnotationCode code) {
  switch (code.value()) {
    case -1:
    case 2:
    case 9:
    case 10:
      return StanceScore::Of(Stance::kDebunking);
    case 0:
    case 3:
    case 5:
      return StanceScore::Of(Stance::kNeutral);
    case 1:
    case 4:
      return StanceScore::Of(Stance::kPromoting);
    default:
      return StanceScore::Excluded();
  }
}

absl::StatusOr<StanceScore> CodeToStance(int code, std::string_view record) {
  absl::StatusOr<AnnotationCode> c = AnnotationCode::Create(code, record);
  if (!c.ok()) return c.status();
  return CodeToStance(*c);
}

std::string_view ListKindName(ListKind kind) {
  switch (kind) {
    case ListKind::kSearch:
      return "SEARCH";
    case ListKind::kRecommendation:
      return "RECOMMENDATION";
    case ListKind::kHomepage:
      return "HOMEPAGE";
  }
  return "?";
}

absl::StatusOr<ListKind> ParseListKind(std::string_view text) {
  if (text == "SEARCH") return ListKind::kSearch;
  if (text == "RECOMMENDATION") return ListKind::kRecommendation;
  if (text == "HOMEPAGE") return ListKind::kHomepage;
  return absl::InvalidArgumentError("unknown list kind '" + std::string(text) +
                                    "'");
}

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kInit:
      return "INIT";
    case Phase::kPromoting:
      return "PROMOTING";
    case Phase::kDebunking:
      return "DEBUNKING";
    case Phase::kTeardown:
      return "TEARDOWN";
    case Phase::kDone:
      return "DONE";
  }
  return "?";
}

absl::StatusOr<Phase> ParsePhase(std::string_view text) {
  for (Phase p : {Phase::kInit, Phase::kPromoting, Phase::kDebunking,
                  Phase::kTeardown, Phase::kDone}) {
    if (PhaseName(p) == text) return p;
  }
  return absl::InvalidArgumentError("unknown phase '" + std::string(text) +
                                    "'");
}

std::string_view PhasePointName(PhasePoint point) {
  switch (point) {
    case PhasePoint::kS1:
      return "S1";
    case PhasePoint::kE1:
      return "E1";
    case PhasePoint::kE2:
      return "E2";
  }
  return "?";
}

absl::StatusOr<PhasePoint> ParsePhasePoint(std::string_view text) {
  for (PhasePoint p : kAllPhasePoints) {
    if (PhasePointName(p) == text) return p;
  }
  return absl::InvalidArgumentError("unknown phase point '" +
                                    std::string(text) + "'");
}

std::vector<int> PhasePointWindow(PhasePoint point, int n_prom, int n_deb) {
  std::vector<int> window;
  switch (point) {
    case PhasePoint::kS1:
      window = {0, 1, 2};
      break;
    case PhasePoint::kE1:
      window = {n_prom - 1, n_prom};
      break;
    case PhasePoint::kE2:
      window = {n_prom + n_deb - 1, n_prom + n_deb};
      break;
  }
  // Small phases can push window ordinals out of the run or into the other
  // phase; clip to the ordinals that belong to the point.
  int lo = 0;
  if (point == PhasePoint::kE1) lo = 1;
  if (point == PhasePoint::kE2) lo = n_prom + 1;
  const int hi = point == PhasePoint::kE2 ? n_prom + n_deb : n_prom;
  std::erase_if(window, [&](int o) { return o < lo || o > hi; });
  window.erase(std::unique(window.begin(), window.end()), window.end());
  return window;
}

bool InPhasePointWindow(PhasePoint point, int watch_ordinal, int n_prom,
                        int n_deb) {
  const std::vector<int> window = PhasePointWindow(point, n_prom, n_deb);
  return std::find(window.begin(), window.end(), watch_ordinal) !=
         window.end();
}

absl::Status ValidateTopic(const Topic& topic, int n_q) {
  if (topic.id.empty()) return absl::InvalidArgumentError("topic id is empty");
  if (topic.queries.empty()) {
    return absl::InvalidArgumentError("topic " + topic.id + " has no queries");
  }
  if (static_cast<int>(topic.queries.size()) != n_q) {
    return absl::InvalidArgumentError(
        "topic " + topic.id + " has " + std::to_string(topic.queries.size()) +
        " queries, expected n_q=" + std::to_string(n_q));
  }
  std::set<std::string> seen;
  for (const std::string& q : topic.queries) {
    if (q.empty()) {
      return absl::InvalidArgumentError("topic " + topic.id +
                                        " has an empty query");
    }
    if (!seen.insert(q).second) {
      return absl::InvalidArgumentError("topic " + topic.id +
                                        " repeats query '" + q + "'");
    }
  }
  return absl::OkStatus();
}

std::string_view SeedKindName(SeedKind kind) {
  return kind == SeedKind::kPromoting ? "promoting" : "debunking";
}

absl::StatusOr<SeedKind> ParseSeedKind(std::string_view text) {
  if (text == "promoting") return SeedKind::kPromoting;
  if (text == "debunking") return SeedKind::kDebunking;
  return absl::InvalidArgumentError("unknown seed kind '" + std::string(text) +
                                    "'");
}

std::string SeedSetReport::Summary() const {
  if (ok()) return "valid";
  std::string out;
  auto append = [&](const std::vector<std::string>& items) {
    for (const std::string& s : items) {
      if (!out.empty()) out += "; ";
      out += s;
    }
  };
  append(size_violations);
  append(duplicate_ids);
  append(channel_cap_violations);
  return out;
}

SeedSetReport ValidateSeedSet(const SeedSet& set, const RunConfig& config) {
  SeedSetReport report;
  const std::string label =
      set.topic_id + "/" + std::string(SeedKindName(set.kind));
  const int expected =
      set.kind == SeedKind::kPromoting ? config.n_prom : config.n_deb;
  if (static_cast<int>(set.videos.size()) != expected) {
    report.size_violations.push_back(
        label + ": " + std::to_string(set.videos.size()) +
        " videos, expected " + std::to_string(expected));
  }
  std::set<std::string> seen;
  std::map<std::string, int> per_channel;
  for (const SeedVideo& v : set.videos) {
    if (!seen.insert(v.video_id).second) {
      report.duplicate_ids.push_back(label + ": duplicate video " + v.video_id);
    }
    ++per_channel[v.channel_id];
  }
  for (const auto& [channel, count] : per_channel) {
    if (count > kMaxVideosPerChannel) {
      report.channel_cap_violations.push_back(
          label + ": channel " + channel + " has " + std::to_string(count) +
          " videos (max " + std::to_string(kMaxVideosPerChannel) + ")");
    }
  }
  return report;
}

absl::StatusOr<std::vector<SeedSet>> ReadSeedSets(const std::string& path) {
  std::vector<SeedSet> sets;
  std::map<std::pair<std::string, SeedKind>, size_t> index;
  absl::Status status =
      internal::ForEachJsonLine(path, [&](const Json& j, int) -> absl::Status {
        absl::StatusOr<std::string> topic = internal::GetString(j, "topic_id");
        absl::StatusOr<std::string> kind_text = internal::GetString(j, "kind");
        absl::StatusOr<std::string> video = internal::GetString(j, "video_id");
        absl::StatusOr<std::string> channel =
            internal::GetString(j, "channel_id");
        for (const absl::Status& s : {topic.status(), kind_text.status(),
                                      video.status(), channel.status()}) {
          if (!s.ok()) return s;
        }
        absl::StatusOr<SeedKind> kind = ParseSeedKind(*kind_text);
        if (!kind.ok()) return kind.status();
        auto key = std::make_pair(*topic, *kind);
        auto it = index.find(key);
        if (it == index.end()) {
          it = index.emplace(key, sets.size()).first;
          sets.push_back(SeedSet{*topic, *kind, {}});
        }
        std::string title = j.value("title", "");
        sets[it->second].videos.push_back(
            SeedVideo{*video, *channel, std::move(title)});
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  return sets;
}

absl::Status WriteSeedSets(const std::string& path,
                           std::span<const SeedSet> sets) {
  std::vector<Json> records;
  for (const SeedSet& set : sets) {
    for (const SeedVideo& v : set.videos) {
      Json j;
      j["topic_id"] = set.topic_id;
      j["kind"] = std::string(SeedKindName(set.kind));
      j["video_id"] = v.video_id;
      j["channel_id"] = v.channel_id;
      j["title"] = v.title;
      records.push_back(std::move(j));
    }
  }
  return internal::WriteJsonLines(path, records);
}

absl::StatusOr<std::vector<Topic>> ReadTopics(const std::string& path) {
  std::vector<Topic> topics;
  absl::Status status =
      internal::ForEachJsonLine(path, [&](const Json& j, int) -> absl::Status {
        absl::StatusOr<std::string> id = internal::GetString(j, "id");
        if (!id.ok()) return id.status();
        Topic t;
        t.id = *id;
        t.display_name = j.value("display_name", *id);
        auto q = j.find("queries");
        if (q == j.end() || !q->is_array()) {
          return absl::InvalidArgumentError("topic " + *id +
                                            " lacks a queries array");
        }
        for (const Json& e : *q) {
          if (!e.is_string()) {
            return absl::InvalidArgumentError("topic " + *id +
                                              " has a non-string query");
          }
          t.queries.push_back(e.get<std::string>());
        }
        topics.push_back(std::move(t));
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  std::set<std::string> ids;
  for (const Topic& t : topics) {
    if (!ids.insert(t.id).second) {
      return absl::InvalidArgumentError("duplicate topic id " + t.id);
    }
  }
  return topics;
}

absl::Status WriteTopics(const std::string& path,
                         std::span<const Topic> topics) {
  std::vector<Json> records;
  for (const Topic& t : topics) {
    Json j;
    j["id"] = t.id;
    j["display_name"] = t.display_name;
    j["queries"] = t.queries;
    records.push_back(std::move(j));
  }
  return internal::WriteJsonLines(path, records);
}

std::vector<ScoredItem> CompactStances(std::span<const StanceEntry> entries) {
  std::vector<ScoredItem> out;
  out.reserve(entries.size());
  for (const StanceEntry& e : entries) {
    if (e.score.excluded()) continue;
    out.push_back(ScoredItem{e.video_id, e.score.value()});
  }
  return out;
}

}  // namespace bubble_audit
