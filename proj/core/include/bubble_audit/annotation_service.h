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

// Annotation workflow behind the HTTP API: leasing queue items to
// annotators, storing their codes, the hesitation back-check, and
// inter-annotator agreement.
//
// Status codes map onto HTTP as follows: InvalidArgument 400, NotFound 404,
// FailedPrecondition 409.

#ifndef BUBBLE_AUDIT_ANNOTATION_SERVICE_H_
#define BUBBLE_AUDIT_ANNOTATION_SERVICE_H_

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bubble_audit/clock.h"
#include "bubble_audit/domain.h"
#include "bubble_audit/observation_store.h"

namespace bubble_audit {

struct KappaResult {
  double kappa = 0.0;
  double observed = 0.0;
  double expected = 0.0;
  size_t pairs = 0;
  // Chance agreement was 1 without perfect observed agreement; kappa is
  // reported as 0.
  bool degenerate = false;
};

// Cohen's kappa over paired labels; the categories are whatever labels
// occur. Errors on an empty input.
absl::StatusOr<KappaResult> CohensKappa(std::span<const std::pair<int, int>> pairs);

// Kappa on the three-class stance scale. Pairs where either code maps to
// EXCLUDED are dropped; `dropped` receives their count when non-null.
absl::StatusOr<KappaResult> StanceKappa(
    std::span<const std::pair<AnnotationCode, AnnotationCode>> pairs,
    size_t* dropped = nullptr);

// Kappa on the raw codes.
absl::StatusOr<KappaResult> RawCodeKappa(
    std::span<const std::pair<AnnotationCode, AnnotationCode>> pairs);

struct VideoMeta {
  std::string title;
  std::string channel_id;
};

struct QueueItem {
  std::string video_id;
  std::string title;
  std::string channel_id;
  int appearance_count = 0;
  std::vector<ListContext> contexts;
  int prior_annotations = 0;
};

struct Submission {
  std::string annotator_id;
  std::string video_id;
  int code = 0;
  bool hesitation = false;
  std::string comment;
};

struct AgreementReport {
  // Videos with at least two usable annotations contribute their first two.
  size_t paired_videos = 0;
  std::optional<KappaResult> stance;
  std::optional<KappaResult> raw;
  size_t excluded_pairs = 0;
};

struct VideoDetail {
  std::string video_id;
  VideoMeta meta;
  std::optional<QueueEntry> queue_entry;
  std::vector<AnnotationRecord> annotations;
};

struct AnnotationServiceOptions {
  std::chrono::seconds lease_timeout = std::chrono::minutes(30);
  // Distinct annotators wanted per video. Two or more feed agreement.
  int annotations_per_video = 1;
};

// Thread-safe; every call is serialized.
class AnnotationService {
 public:
  AnnotationService(std::vector<QueueEntry> queue,
                    std::map<std::string, VideoMeta> metadata,
                    AnnotationStore& store, const Clock& clock,
                    AnnotationServiceOptions options = {});

  // Leases the highest-priority item this annotator may still annotate, or
  // returns nullopt when there is none. An annotator holding a live lease
  // gets the same item again.
  absl::StatusOr<std::optional<QueueItem>> NextItem(std::string_view annotator);

  // Needs a live lease of the annotator on the video. A hesitation puts the
  // record into back-check.
  absl::StatusOr<AnnotationRecord> Submit(const Submission& submission);

  std::vector<AnnotationRecord> PendingBackchecks() const;

  // Resolves the earliest pending record of the video. The reviewer must be
  // someone other than the original annotator.
  absl::StatusOr<AnnotationRecord> ResolveBackcheck(std::string_view video_id,
                                                    int resolved_code,
                                                    std::string_view resolver);

  AgreementReport Agreement() const;

  absl::StatusOr<VideoDetail> Video(std::string_view video_id) const;

  size_t queue_size() const { return queue_.size(); }

 private:
  struct Lease {
    std::string annotator;
    std::chrono::seconds expires{0};
  };

  void ExpireLeases();
  QueueItem MakeItem(const QueueEntry& entry) const;

  std::vector<QueueEntry> queue_;
  std::map<std::string, size_t, std::less<>> index_;
  std::map<std::string, VideoMeta, std::less<>> metadata_;
  AnnotationStore& store_;
  const Clock& clock_;
  AnnotationServiceOptions options_;

  mutable std::mutex mu_;
  std::map<std::string, std::vector<Lease>, std::less<>> leases_;
};

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_ANNOTATION_SERVICE_H_
