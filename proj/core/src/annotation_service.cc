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

#include "bubble_audit/annotation_service.h"

#include <algorithm>
#include <cmath>

namespace bubble_audit {

absl::StatusOr<KappaResult> CohensKappa(
    std::span<const std::pair<int, int>> pairs) {
  if (pairs.empty()) {
    return absl::InvalidArgumentError("kappa needs at least one pair");
  }
  std::map<int, double> row;
  std::map<int, double> col;
  double agree = 0.0;
  for (const auto& [a, b] : pairs) {
    row[a] += 1.0;
    col[b] += 1.0;
    if (a == b) agree += 1.0;
  }
  const double n = static_cast<double>(pairs.size());
  KappaResult r;
  r.pairs = pairs.size();
  r.observed = agree / n;
  for (const auto& [label, count] : row) {
    auto it = col.find(label);
    if (it != col.end()) r.expected += (count / n) * (it->second / n);
  }
  if (std::abs(1.0 - r.expected) < 1e-12) {
    r.kappa = r.observed == 1.0 ? 1.0 : 0.0;
    r.degenerate = r.observed != 1.0;
    return r;
  }
  r.kappa = (r.observed - r.expected) / (1.0 - r.expected);
  return r;
}

absl::StatusOr<KappaResult> StanceKappa(
    std::span<const std::pair<AnnotationCode, AnnotationCode>> pairs,
    size_t* dropped) {
  std::vector<std::pair<int, int>> mapped;
  size_t skipped = 0;
  for (const auto& [a, b] : pairs) {
    const StanceScore sa = CodeToStance(a);
    const StanceScore sb = CodeToStance(b);
    if (sa.excluded() || sb.excluded()) {
      ++skipped;
      continue;
    }
    mapped.emplace_back(sa.value(), sb.value());
  }
  if (dropped != nullptr) *dropped = skipped;
  return CohensKappa(mapped);
}

absl::StatusOr<KappaResult> RawCodeKappa(
    std::span<const std::pair<AnnotationCode, AnnotationCode>> pairs) {
  std::vector<std::pair<int, int>> raw;
  raw.reserve(pairs.size());
  for (const auto& [a, b] : pairs) raw.emplace_back(a.value(), b.value());
  return CohensKappa(raw);
}

AnnotationService::AnnotationService(std::vector<QueueEntry> queue,
                                     std::map<std::string, VideoMeta> metadata,
                                     AnnotationStore& store, const Clock& clock,
                                     AnnotationServiceOptions options)
    : queue_(std::move(queue)),
      metadata_(metadata.begin(), metadata.end()),
      store_(store),
      clock_(clock),
      options_(options) {
  for (size_t i = 0; i < queue_.size(); ++i) index_[queue_[i].video_id] = i;
}

void AnnotationService::ExpireLeases() {
  const std::chrono::seconds now = clock_.Now();
  for (auto it = leases_.begin(); it != leases_.end();) {
    std::erase_if(it->second, [&](const Lease& l) { return l.expires <= now; });
    it = it->second.empty() ? leases_.erase(it) : std::next(it);
  }
}

QueueItem AnnotationService::MakeItem(const QueueEntry& entry) const {
  QueueItem item;
  item.video_id = entry.video_id;
  if (auto it = metadata_.find(entry.video_id); it != metadata_.end()) {
    item.title = it->second.title;
    item.channel_id = it->second.channel_id;
  }
  item.appearance_count = entry.appearance_count;
  item.contexts = entry.contexts;
  item.prior_annotations =
      static_cast<int>(store_.ForVideo(entry.video_id).size());
  return item;
}

absl::StatusOr<std::optional<QueueItem>> AnnotationService::NextItem(
    std::string_view annotator) {
  if (annotator.empty()) {
    return absl::InvalidArgumentError("annotator id is required");
  }
  std::lock_guard<std::mutex> lock(mu_);
  ExpireLeases();
  for (const auto& [video, leases] : leases_) {
    for (const Lease& l : leases) {
      if (l.annotator == annotator) return MakeItem(queue_[index_.at(video)]);
    }
  }
  for (const QueueEntry& entry : queue_) {
    if (store_.Get(entry.video_id, annotator)) continue;
    const int done = static_cast<int>(store_.ForVideo(entry.video_id).size());
    auto it = leases_.find(entry.video_id);
    const int leased = it == leases_.end() ? 0 : static_cast<int>(it->second.size());
    if (done + leased >= options_.annotations_per_video) continue;
    leases_[entry.video_id].push_back(
        Lease{std::string(annotator), clock_.Now() + options_.lease_timeout});
    return MakeItem(entry);
  }
  return std::optional<QueueItem>();
}

absl::StatusOr<AnnotationRecord> AnnotationService::Submit(
    const Submission& submission) {
  std::lock_guard<std::mutex> lock(mu_);
  if (submission.annotator_id.empty()) {
    return absl::InvalidArgumentError("annotator id is required");
  }
  if (!index_.contains(submission.video_id)) {
    return absl::NotFoundError("video '" + submission.video_id +
                               "' is not in the annotation queue");
  }
  absl::StatusOr<AnnotationCode> code =
      AnnotationCode::Create(submission.code, submission.video_id);
  if (!code.ok()) return code.status();

  ExpireLeases();
  auto it = leases_.find(submission.video_id);
  auto lease = it == leases_.end()
                   ? std::vector<Lease>::iterator()
                   : std::find_if(it->second.begin(), it->second.end(),
                                  [&](const Lease& l) {
                                    return l.annotator == submission.annotator_id;
                                  });
  if (it == leases_.end() || lease == it->second.end()) {
    return absl::FailedPreconditionError(
        "annotator '" + submission.annotator_id + "' holds no lease on '" +
        submission.video_id + "'");
  }

  AnnotationRecord record;
  record.video_id = submission.video_id;
  record.annotator_id = submission.annotator_id;
  record.code = *code;
  record.hesitation = submission.hesitation;
  record.comment = submission.comment;
  record.backcheck_status = submission.hesitation ? BackcheckStatus::kPending
                                                  : BackcheckStatus::kNone;
  if (absl::Status s = store_.Put(record); !s.ok()) return s;
  it->second.erase(lease);
  if (it->second.empty()) leases_.erase(it);
  return *store_.Get(record.video_id, record.annotator_id);
}

std::vector<AnnotationRecord> AnnotationService::PendingBackchecks() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<AnnotationRecord> out;
  for (AnnotationRecord& r : store_.All()) {
    if (r.backcheck_status == BackcheckStatus::kPending) out.push_back(std::move(r));
  }
  return out;
}

absl::StatusOr<AnnotationRecord> AnnotationService::ResolveBackcheck(
    std::string_view video_id, int resolved_code, std::string_view resolver) {
  std::lock_guard<std::mutex> lock(mu_);
  if (resolver.empty()) {
    return absl::InvalidArgumentError("resolver id is required");
  }
  absl::StatusOr<AnnotationCode> code =
      AnnotationCode::Create(resolved_code, video_id);
  if (!code.ok()) return code.status();
  std::vector<AnnotationRecord> records = store_.ForVideo(video_id);
  if (records.empty()) {
    return absl::NotFoundError("no annotations for video '" +
                               std::string(video_id) + "'");
  }
  auto pending = std::find_if(records.begin(), records.end(), [](const auto& r) {
    return r.backcheck_status == BackcheckStatus::kPending;
  });
  if (pending == records.end()) {
    return absl::FailedPreconditionError("video '" + std::string(video_id) +
                                         "' has no pending back-check");
  }
  if (pending->annotator_id == resolver) {
    return absl::InvalidArgumentError(
        "a back-check must be resolved by a different annotator");
  }
  pending->backcheck_status = BackcheckStatus::kResolved;
  pending->resolved_code = *code;
  pending->resolver_id = std::string(resolver);
  if (absl::Status s = store_.Put(*pending); !s.ok()) return s;
  return *pending;
}

AgreementReport AnnotationService::Agreement() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::map<std::string, std::vector<AnnotationCode>> by_video;
  for (const AnnotationRecord& r : store_.All()) {
    if (r.Usable()) by_video[r.video_id].push_back(r.EffectiveCode());
  }
  std::vector<std::pair<AnnotationCode, AnnotationCode>> pairs;
  for (const auto& [video, codes] : by_video) {
    if (codes.size() >= 2) pairs.emplace_back(codes[0], codes[1]);
  }
  AgreementReport report;
  report.paired_videos = pairs.size();
  if (absl::StatusOr<KappaResult> s = StanceKappa(pairs, &report.excluded_pairs);
      s.ok()) {
    report.stance = *s;
  }
  if (absl::StatusOr<KappaResult> r = RawCodeKappa(pairs); r.ok()) {
    report.raw = *r;
  }
  return report;
}

absl::StatusOr<VideoDetail> AnnotationService::Video(
    std::string_view video_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  VideoDetail detail;
  detail.video_id = std::string(video_id);
  auto meta = metadata_.find(video_id);
  if (meta != metadata_.end()) detail.meta = meta->second;
  auto idx = index_.find(video_id);
  if (idx != index_.end()) detail.queue_entry = queue_[idx->second];
  detail.annotations = store_.ForVideo(video_id);
  if (meta == metadata_.end() && idx == index_.end() &&
      detail.annotations.empty()) {
    return absl::NotFoundError("unknown video '" + std::string(video_id) + "'");
  }
  return detail;
}

}  // namespace bubble_audit
