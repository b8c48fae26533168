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

#include "bubble_audit/observation.h"

#include "bubble_audit/platform.h"
#include "record_io.h"

namespace bubble_audit {

using internal::Json;

absl::Status ValidateObservation(const Observation& obs) {
  if (obs.run_id.empty() || obs.agent_id.empty()) {
    return absl::InvalidArgumentError("observation lacks run or agent id");
  }
  if (obs.video_id.empty()) {
    return absl::InvalidArgumentError("observation lacks a video id");
  }
  if (obs.rank < 1) {
    return absl::InvalidArgumentError("observation rank must be >= 1, got " +
                                      std::to_string(obs.rank));
  }
  if (obs.list_kind == ListKind::kRecommendation &&
      obs.rank > static_cast<int>(kMaxRecommendations)) {
    return absl::InvalidArgumentError("recommendation rank above 20");
  }
  if (obs.watch_ordinal < 0) {
    return absl::InvalidArgumentError("negative watch ordinal");
  }
  return absl::OkStatus();
}

std::string ObservationToLine(const Observation& obs) {
  Json j;
  j["run_id"] = obs.run_id;
  j["agent_id"] = obs.agent_id;
  j["phase"] = std::string(PhaseName(obs.phase));
  j["watch_ordinal"] = obs.watch_ordinal;
  j["list_kind"] = std::string(ListKindName(obs.list_kind));
  j["source"] = obs.source;
  j["rank"] = obs.rank;
  j["video_id"] = obs.video_id;
  j["warning_flag"] = obs.warning_flag;
  j["virtual_ts"] = obs.virtual_ts.count();
  return j.dump();
}

absl::StatusOr<Observation> ObservationFromLine(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    return absl::DataLossError(std::string("malformed observation: ") +
                               e.what());
  }
  Observation obs;
  absl::StatusOr<std::string> run = internal::GetString(j, "run_id");
  absl::StatusOr<std::string> agent = internal::GetString(j, "agent_id");
  absl::StatusOr<std::string> phase = internal::GetString(j, "phase");
  absl::StatusOr<int64_t> ordinal = internal::GetInt(j, "watch_ordinal");
  absl::StatusOr<std::string> kind = internal::GetString(j, "list_kind");
  absl::StatusOr<std::string> source = internal::GetString(j, "source");
  absl::StatusOr<int64_t> rank = internal::GetInt(j, "rank");
  absl::StatusOr<std::string> video = internal::GetString(j, "video_id");
  absl::StatusOr<bool> warning = internal::GetBool(j, "warning_flag");
  absl::StatusOr<int64_t> ts = internal::GetInt(j, "virtual_ts");
  for (const absl::Status& s :
       {run.status(), agent.status(), phase.status(), ordinal.status(),
        kind.status(), source.status(), rank.status(), video.status(),
        warning.status(), ts.status()}) {
    if (!s.ok()) return s;
  }
  absl::StatusOr<Phase> parsed_phase = ParsePhase(*phase);
  if (!parsed_phase.ok()) return parsed_phase.status();
  absl::StatusOr<ListKind> parsed_kind = ParseListKind(*kind);
  if (!parsed_kind.ok()) return parsed_kind.status();
  obs.run_id = *run;
  obs.agent_id = *agent;
  obs.phase = *parsed_phase;
  obs.watch_ordinal = static_cast<int>(*ordinal);
  obs.list_kind = *parsed_kind;
  obs.source = *source;
  obs.rank = static_cast<int>(*rank);
  obs.video_id = *video;
  obs.warning_flag = *warning;
  obs.virtual_ts = std::chrono::seconds(*ts);
  return obs;
}

}  // namespace bubble_audit
