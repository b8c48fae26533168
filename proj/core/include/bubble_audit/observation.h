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

#ifndef BUBBLE_AUDIT_OBSERVATION_H_
#define BUBBLE_AUDIT_OBSERVATION_H_

#include <chrono>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bubble_audit/domain.h"

namespace bubble_audit {

// One collected list position.
struct Observation {
  std::string run_id;
  std::string agent_id;
  Phase phase = Phase::kInit;
  // Ordinal of the last completed watch (0 before the first one).
  int watch_ordinal = 0;
  ListKind list_kind = ListKind::kSearch;
  // Query for SEARCH, watched video id for RECOMMENDATION, "home" for
  // HOMEPAGE.
  std::string source;
  int rank = 1;
  std::string video_id;
  bool warning_flag = false;
  std::chrono::seconds virtual_ts{0};

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline constexpr std::string_view kHomepageSource = "home";

absl::Status ValidateObservation(const Observation& obs);

// One JSON object per line with the fields in this fixed order: run_id,
// agent_id, phase, watch_ordinal, list_kind, source, rank, video_id,
// warning_flag, virtual_ts.
std::string ObservationToLine(const Observation& obs);
absl::StatusOr<Observation> ObservationFromLine(std::string_view line);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_OBSERVATION_H_
