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

// Shared vocabulary of the audit: topics, seed sets, annotation codes,
// stances, collected-list kinds and the phase coordinates that every other
// module speaks in.

#ifndef BUBBLE_AUDIT_DOMAIN_H_
#define BUBBLE_AUDIT_DOMAIN_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace bubble_audit {

struct RunConfig;

// Stance of a video towards the conspiratorial narrative of a topic.
enum class Stance : int { kDebunking = -1, kNeutral = 0, kPromoting = 1 };

std::string_view StanceName(Stance stance);
absl::StatusOr<Stance> ParseStance(std::string_view text);

// Human annotation code. Admissible values are -1..10:
//   -1 debunking, 0 neutral, 1 promoting (related to the audited topic)
//    2 debunking, 3 neutral, 4 promoting (unrelated misinformation)
//    5 not about misinformation
//    6 non-English, 7 undeterminable, 8 removed
//    9 mocking (related), 10 mocking (unrelated)
class AnnotationCode {
 public:
  static constexpr int kMin = -1;
  static constexpr int kMax = 10;

  // Neutral (0).
  constexpr AnnotationCode() : code_(0) {}

  // `record` names the offending record in the error message.
  static absl::StatusOr<AnnotationCode> Create(int code,
                                               std::string_view record = {});
  static constexpr bool IsAdmissible(int code) {
    return code >= kMin && code <= kMax;
  }
  static std::vector<AnnotationCode> All();

  int value() const { return code_; }
  std::string_view Description() const;

  friend bool operator==(AnnotationCode, AnnotationCode) = default;

 private:
  explicit constexpr AnnotationCode(int code) : code_(code) {}
  int code_;
};

// Metric contribution of one annotated item: -1, 0, +1, or excluded.
class StanceScore {
 public:
  static constexpr StanceScore Of(Stance stance) {
    return StanceScore(static_cast<int>(stance), false);
  }
  static constexpr StanceScore Excluded() { return StanceScore(0, true); }

  bool excluded() const { return excluded_; }
  // Only meaningful when !excluded().
  int value() const { return value_; }

  friend bool operator==(StanceScore, StanceScore) = default;

 private:
  constexpr StanceScore(int value, bool excluded)
      : value_(value), excluded_(excluded) {}
  int value_;
  bool excluded_;
};

// -1,2,9,10 -> -1; 0,3,5 -> 0; 1,4 -> +1; 6,7,8 -> excluded.
StanceScore CodeToStance(AnnotationCode code);
absl::StatusOr<StanceScore> CodeToStance(int code, std::string_view record);

enum class ListKind { kSearch, kRecommendation, kHomepage };

std::string_view ListKindName(ListKind kind);
absl::StatusOr<ListKind> ParseListKind(std::string_view text);

// Agent lifecycle phase. Transitions only ever move forward in this order.
enum class Phase { kInit, kPromoting, kDebunking, kTeardown, kDone };

std::string_view PhaseName(Phase phase);
absl::StatusOr<Phase> ParsePhase(std::string_view text);

// Measurement points: start of promoting (S1), end of promoting (E1), end of
// debunking (E2).
enum class PhasePoint { kS1, kE1, kE2 };

inline constexpr PhasePoint kAllPhasePoints[] = {PhasePoint::kS1,
                                                 PhasePoint::kE1,
                                                 PhasePoint::kE2};

std::string_view PhasePointName(PhasePoint point);
absl::StatusOr<PhasePoint> ParsePhasePoint(std::string_view text);

// Watch ordinals (1-based across both phases, 0 = baseline before any watch)
// covered by a measurement point. S1 is the baseline plus the first two
// watches, E1 the last two promoting watches and E2 the last two debunking
// watches. Search phases are stamped with the ordinal of the watch they
// follow, so the same windows apply to search and recommendation lists.
std::vector<int> PhasePointWindow(PhasePoint point, int n_prom, int n_deb);
bool InPhasePointWindow(PhasePoint point, int watch_ordinal, int n_prom,
                        int n_deb);

struct Topic {
  std::string id;
  std::string display_name;
  std::vector<std::string> queries;
};

absl::Status ValidateTopic(const Topic& topic, int n_q);

enum class SeedKind { kPromoting, kDebunking };

std::string_view SeedKindName(SeedKind kind);
absl::StatusOr<SeedKind> ParseSeedKind(std::string_view text);

struct SeedVideo {
  std::string video_id;
  std::string channel_id;
  std::string title;
};

struct SeedSet {
  std::string topic_id;
  SeedKind kind = SeedKind::kPromoting;
  std::vector<SeedVideo> videos;
};

inline constexpr int kMaxVideosPerChannel = 3;

struct SeedSetReport {
  std::vector<std::string> size_violations;
  std::vector<std::string> duplicate_ids;
  std::vector<std::string> channel_cap_violations;

  bool ok() const {
    return size_violations.empty() && duplicate_ids.empty() &&
           channel_cap_violations.empty();
  }
  std::string Summary() const;
};

SeedSetReport ValidateSeedSet(const SeedSet& set, const RunConfig& config);

// Seed-set file: one JSON object per line with topic_id, kind, video_id,
// channel_id and title. Records of one (topic, kind) keep file order.
absl::StatusOr<std::vector<SeedSet>> ReadSeedSets(const std::string& path);
absl::Status WriteSeedSets(const std::string& path,
                           std::span<const SeedSet> sets);

// Topic file: one JSON object per line with id, display_name, queries.
absl::StatusOr<std::vector<Topic>> ReadTopics(const std::string& path);
absl::Status WriteTopics(const std::string& path, std::span<const Topic> topics);

// One list position after stance mapping and exclusion compaction.
struct ScoredItem {
  std::string video_id;
  int stance = 0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

struct StanceEntry {
  std::string video_id;
  StanceScore score;
};

// Drops excluded entries; surviving items keep their relative order so ranks
// stay contiguous from 1.
std::vector<ScoredItem> CompactStances(std::span<const StanceEntry> entries);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_DOMAIN_H_
