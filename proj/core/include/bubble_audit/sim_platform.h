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

// Deterministic simulated platform with a tunable filter-bubble effect.
//
// Each account keeps a single scalar affinity p in [-1, 1], an exponentially
// weighted average of the stances it watched:
//
//   p <- p + lambda * (stance - p)
//
// Every ranked surface scores candidates as
//
//   base_relevance + weight * (1 - |p - stance| / 2) + noise_eps * noise
//
// where `weight` is w for recommendations and the homepage and w_search
// (w / 4 unless configured) for search. Noise is a hash of (seed, context,
// item, history length), so it is reproducible and resets with the history.
// Ties break by ascending video id.
//
// This is a model chosen to produce bubble creation and bursting, not a
// claim about how any real platform ranks.

#ifndef BUBBLE_AUDIT_SIM_PLATFORM_H_
#define BUBBLE_AUDIT_SIM_PLATFORM_H_

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bubble_audit/domain.h"
#include "bubble_audit/platform.h"

namespace bubble_audit {

inline constexpr int64_t kSeedEligibleMinViews = 1000;

struct CatalogItem {
  std::string video_id;
  std::string channel_id;
  std::string topic_id;
  std::string title;
  // Ground-truth label; the oracle for the whole pipeline.
  Stance true_stance = Stance::kNeutral;
  // Query string -> relevance in [0, 1]. Absent means 0.
  std::map<std::string, double> base_relevance;
  std::chrono::seconds length{0};
  int64_t view_count = 0;
  bool warning = false;
  bool available = true;

  double RelevanceFor(std::string_view query) const;
};

class Catalog {
 public:
  Catalog() = default;
  Catalog(std::vector<Topic> topics, std::vector<CatalogItem> items);

  const std::vector<CatalogItem>& items() const { return items_; }
  const std::vector<Topic>& topics() const { return topics_; }

  const CatalogItem* Find(std::string_view video_id) const;
  const Topic* FindTopic(std::string_view topic_id) const;
  std::vector<const CatalogItem*> ItemsForTopic(std::string_view topic) const;

  // Every query has at least `collect_min` items with positive relevance and
  // all items carry valid fields.
  absl::Status Validate(int collect_min) const;

  // One JSON object per item, in catalog order. Topics travel separately.
  std::string Serialize() const;
  static absl::StatusOr<Catalog> Parse(std::string_view items_jsonl,
                                       std::vector<Topic> topics);

  absl::Status Save(const std::string& items_path,
                    const std::string& topics_path) const;
  static absl::StatusOr<Catalog> Load(const std::string& items_path,
                                      const std::string& topics_path);

 private:
  std::vector<Topic> topics_;
  std::vector<CatalogItem> items_;
  std::unordered_map<std::string, size_t> index_;
};

// Per-topic generation parameters. Read from line-delimited JSON, one topic
// per line.
struct TopicSpec {
  Topic topic;
  int promoting = 0;
  int debunking = 0;
  int neutral = 0;
  int channels = 20;
  // Relevance for each query: with probability `coverage` the item is
  // relevant, with value min + (max - min) * u^exponent, u ~ U[0, 1).
  double relevance_min = 0.05;
  double relevance_max = 1.0;
  double relevance_exponent = 1.0;
  double coverage = 1.0;
  // Per-stance multipliers on relevance, e.g. to make search lean debunking.
  double promoting_relevance_scale = 1.0;
  double debunking_relevance_scale = 1.0;
  double neutral_relevance_scale = 1.0;
  std::chrono::seconds length_min = std::chrono::minutes(2);
  std::chrono::seconds length_max = std::chrono::minutes(90);
  int64_t views_min = 1000;
  int64_t views_max = 5000000;
  double warning_share = 0.0;
};

struct CatalogSpec {
  std::vector<TopicSpec> topics;
};

absl::StatusOr<CatalogSpec> ParseCatalogSpec(std::string_view jsonl);
absl::StatusOr<CatalogSpec> LoadCatalogSpec(const std::string& path);

// Same spec and seed give the same catalog, byte for byte once serialized.
absl::StatusOr<Catalog> BuildCatalog(const CatalogSpec& spec, uint64_t seed,
                                     int collect_min = 20);

// Picks the `count` most viewed seed-eligible items of a stance, at most
// kMaxVideosPerChannel per channel.
absl::StatusOr<SeedSet> SelectSeedSet(const Catalog& catalog,
                                      std::string_view topic_id, SeedKind kind,
                                      int count);

struct PersonalizationState {
  // Exponentially weighted stance of the watch history.
  double p = 0.0;
  std::vector<std::string> history;
};

// p <- p + lambda (stance - p); appends the item to the history.
PersonalizationState SimWatch(const PersonalizationState& state,
                              const CatalogItem& item, double lambda);

struct RankCandidate {
  const CatalogItem* item = nullptr;
  double base_relevance = 0.0;
};

struct RankWeights {
  double affinity = 0.0;
  double noise_eps = 0.0;
  uint64_t noise_seed = 0;
};

double AffinityScore(double p, Stance stance, double weight);

// Top `top_k` candidates by descending score, ties by video id.
std::vector<const CatalogItem*> SimRank(const PersonalizationState& state,
                                        std::span<const RankCandidate> candidates,
                                        std::string_view context,
                                        const RankWeights& weights,
                                        size_t top_k);

struct SimParams {
  double lambda = 0.15;
  double w = 0.8;
  // Search personalization weight; w / 4 when unset.
  std::optional<double> w_search;
  double noise_eps = 0.0;
  int collect_min = 20;
  int rec_count = static_cast<int>(kMaxRecommendations);
  uint64_t seed = 0;

  double SearchWeight() const { return w_search.value_or(w / 4.0); }
  absl::Status Validate() const;
};

// One simulated account session. The catalog is shared read-only.
class SimPlatform : public PlatformAdapter {
 public:
  SimPlatform(std::shared_ptr<const Catalog> catalog, SimParams params);

  absl::Status Login(const Account& account) override;
  absl::Status AcceptConsent() override;
  absl::StatusOr<VideoInfo> Lookup(std::string_view video_id) override;
  absl::Status Watch(std::string_view video_id,
                     std::chrono::seconds duration) override;
  absl::StatusOr<std::vector<ListEntry>> Search(
      std::string_view query) override;
  absl::StatusOr<std::vector<ListEntry>> Homepage() override;
  absl::StatusOr<std::vector<ListEntry>> RecommendationsCurrent() override;
  absl::Status ResetHistory() override;

  const PersonalizationState& state() const { return state_; }
  const SimParams& params() const { return params_; }
  std::chrono::seconds watched_time() const { return watched_time_; }

 private:
  absl::Status RequireLogin() const;
  std::vector<ListEntry> ToEntries(
      const std::vector<const CatalogItem*>& ranked) const;

  std::shared_ptr<const Catalog> catalog_;
  SimParams params_;
  PersonalizationState state_;
  std::optional<Account> account_;
  const CatalogItem* current_ = nullptr;
  std::chrono::seconds watched_time_{0};
  double max_log_views_ = 1.0;
};

// Factory giving every agent its own session with a derived noise seed.
AdapterFactory MakeSimAdapterFactory(std::shared_ptr<const Catalog> catalog,
                                     SimParams params);

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_SIM_PLATFORM_H_
