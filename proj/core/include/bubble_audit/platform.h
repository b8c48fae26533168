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

// Contract between the scenario engine and a personalization platform. The
// built-in simulator implements it; a live-platform driver would implement
// the same interface out of process and wrap it here.

#ifndef BUBBLE_AUDIT_PLATFORM_H_
#define BUBBLE_AUDIT_PLATFORM_H_

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace bubble_audit {

inline constexpr size_t kMaxRecommendations = 20;

// Identity attributes are carried for the manifest; the simulator ignores
// them.
struct Account {
  std::string id;
  std::string display_name;
  std::string birth_date = "1990-06-06";
  std::string gender = "unspecified";
  std::string geolocation = "us-east";
};

// One position of a collected list.
struct ListEntry {
  std::string video_id;
  // A warning/clarification banner was shown with the item.
  bool warning = false;
};

struct VideoInfo {
  std::string video_id;
  std::chrono::seconds length{0};
  bool available = true;
};

// Errors: kNotFound for unknown or removed videos; other codes are treated
// as platform failures by the engine.
class PlatformAdapter {
 public:
  virtual ~PlatformAdapter() = default;

  virtual absl::Status Login(const Account& account) = 0;
  virtual absl::Status AcceptConsent() = 0;
  virtual absl::StatusOr<VideoInfo> Lookup(std::string_view video_id) = 0;
  // Plays `video_id` for `duration`; the sidebar then shows its
  // recommendations.
  virtual absl::Status Watch(std::string_view video_id,
                             std::chrono::seconds duration) = 0;
  virtual absl::StatusOr<std::vector<ListEntry>> Search(
      std::string_view query) = 0;
  virtual absl::StatusOr<std::vector<ListEntry>> Homepage() = 0;
  // Sidebar of the video currently open, at most kMaxRecommendations items.
  virtual absl::StatusOr<std::vector<ListEntry>> RecommendationsCurrent() = 0;
  // Clears the watch history so the account answers like a fresh one.
  virtual absl::Status ResetHistory() = 0;
};

// Builds the adapter session for agent `agent_index`. Each agent owns its
// adapter exclusively.
using AdapterFactory =
    std::function<absl::StatusOr<std::unique_ptr<PlatformAdapter>>(
        int agent_index)>;

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_PLATFORM_H_
