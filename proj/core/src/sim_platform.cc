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

#include "bubble_audit/sim_platform.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

#include "bubble_audit/random.h"
#include "record_io.h"

namespace bubble_audit {

using internal::Json;

namespace {

std::string Pad(int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", width, value);
  return buf;
}

char StanceLetter(Stance s) {
  switch (s) {
    case Stance::kPromoting:
      return 'p';
    case Stance::kDebunking:
      return 'd';
    case Stance::kNeutral:
      return 'n';
  }
  return '?';
}

Json ItemToJson(const CatalogItem& item) {
  Json j;
  j["video_id"] = item.video_id;
  j["channel_id"] = item.channel_id;
  j["topic_id"] = item.topic_id;
  j["title"] = item.title;
  j["true_stance"] = static_cast<int>(item.true_stance);
  Json rel = Json::object();
  for (const auto& [query, value] : item.base_relevance) rel[query] = value;
  j["base_relevance"] = std::move(rel);
  j["length_s"] = item.length.count();
  j["view_count"] = item.view_count;
  j["warning"] = item.warning;
  j["available"] = item.available;
  return j;
}

absl::StatusOr<CatalogItem> ItemFromJson(const Json& j) {
  CatalogItem item;
  absl::StatusOr<std::string> id = internal::GetString(j, "video_id");
  absl::StatusOr<std::string> channel = internal::GetString(j, "channel_id");
  absl::StatusOr<std::string> topic = internal::GetString(j, "topic_id");
  absl::StatusOr<int64_t> stance = internal::GetInt(j, "true_stance");
  absl::StatusOr<int64_t> length = internal::GetInt(j, "length_s");
  absl::StatusOr<int64_t> views = internal::GetInt(j, "view_count");
  for (const absl::Status& s : {id.status(), channel.status(), topic.status(),
                                stance.status(), length.status(),
                                views.status()}) {
    if (!s.ok()) return s;
  }
  if (*stance < -1 || *stance > 1) {
    return absl::InvalidArgumentError("true_stance out of range for " + *id);
  }
  item.video_id = *id;
  item.channel_id = *channel;
  item.topic_id = *topic;
  item.title = j.value("title", "");
  item.true_stance = static_cast<Stance>(*stance);
  item.length = std::chrono::seconds(*length);
  item.view_count = *views;
  item.warning = j.value("warning", false);
  item.available = j.value("available", true);
  auto rel = j.find("base_relevance");
  if (rel == j.end() || !rel->is_object()) {
    return absl::InvalidArgumentError("missing base_relevance for " + *id);
  }
  for (auto it = rel->begin(); it != rel->end(); ++it) {
    if (!it.value().is_number()) {
      return absl::InvalidArgumentError("non-numeric relevance for " + *id);
    }
    item.base_relevance[it.key()] = it.value().get<double>();
  }
  return item;
}

double NoiseUnit(uint64_t seed, std::string_view context,
                 std::string_view video_id, size_t history_size) {
  uint64_t h = HashString(context, seed ^ 0x5bd1e9955bd1e995ULL);
  h = HashString(video_id, SplitMix64(h));
  return ToUnitInterval(SplitMix64(h ^ SplitMix64(history_size)));
}

}  // namespace

double CatalogItem::RelevanceFor(std::string_view query) const {
  auto it = base_relevance.find(std::string(query));
  return it == base_relevance.end() ? 0.0 : it->second;
}

Catalog::Catalog(std::vector<Topic> topics, std::vector<CatalogItem> items)
    : topics_(std::move(topics)), items_(std::move(items)) {
  for (size_t i = 0; i < items_.size(); ++i) {
    index_.emplace(items_[i].video_id, i);
  }
}

const CatalogItem* Catalog::Find(std::string_view video_id) const {
  auto it = index_.find(std::string(video_id));
  return it == index_.end() ? nullptr : &items_[it->second];
}

const Topic* Catalog::FindTopic(std::string_view topic_id) const {
  for (const Topic& t : topics_) {
    if (t.id == topic_id) return &t;
  }
  return nullptr;
}

std::vector<const CatalogItem*> Catalog::ItemsForTopic(
    std::string_view topic) const {
  std::vector<const CatalogItem*> out;
  for (const CatalogItem& item : items_) {
    if (item.topic_id == topic) out.push_back(&item);
  }
  return out;
}

absl::Status Catalog::Validate(int collect_min) const {
  if (index_.size() != items_.size()) {
    return absl::InvalidArgumentError("catalog has duplicate video ids");
  }
  for (const CatalogItem& item : items_) {
    if (item.video_id.empty() || item.channel_id.empty()) {
      return absl::InvalidArgumentError("catalog item with empty id");
    }
    if (FindTopic(item.topic_id) == nullptr) {
      return absl::InvalidArgumentError("item " + item.video_id +
                                        " has unknown topic " + item.topic_id);
    }
    if (item.length.count() <= 0) {
      return absl::InvalidArgumentError("item " + item.video_id +
                                        " has non-positive length");
    }
    if (item.view_count < 0) {
      return absl::InvalidArgumentError("item " + item.video_id +
                                        " has negative view count");
    }
    for (const auto& [query, value] : item.base_relevance) {
      if (!(value >= 0.0 && value <= 1.0)) {
        return absl::InvalidArgumentError("item " + item.video_id +
                                          " has relevance outside [0, 1] for '" +
                                          query + "'");
      }
    }
  }
  for (const Topic& topic : topics_) {
    for (const std::string& query : topic.queries) {
      int relevant = 0;
      for (const CatalogItem& item : items_) {
        if (item.RelevanceFor(query) > 0.0) ++relevant;
      }
      if (relevant < collect_min) {
        return absl::FailedPreconditionError(
            "query '" + query + "' of topic " + topic.id + " has only " +
            std::to_string(relevant) + " relevant items, need " +
            std::to_string(collect_min));
      }
    }
  }
  return absl::OkStatus();
}

std::string Catalog::Serialize() const {
  std::string out;
  for (const CatalogItem& item : items_) {
    out += ItemToJson(item).dump();
    out += '\n';
  }
  return out;
}

absl::StatusOr<Catalog> Catalog::Parse(std::string_view items_jsonl,
                                       std::vector<Topic> topics) {
  std::vector<CatalogItem> items;
  size_t start = 0;
  int line_no = 0;
  while (start < items_jsonl.size()) {
    size_t end = items_jsonl.find('\n', start);
    if (end == std::string_view::npos) end = items_jsonl.size();
    std::string_view line = items_jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      return absl::DataLossError("catalog line " + std::to_string(line_no) +
                                 ": " + e.what());
    }
    absl::StatusOr<CatalogItem> item = ItemFromJson(j);
    if (!item.ok()) {
      return absl::InvalidArgumentError("catalog line " +
                                        std::to_string(line_no) + ": " +
                                        std::string(item.status().message()));
    }
    items.push_back(*std::move(item));
  }
  return Catalog(std::move(topics), std::move(items));
}

absl::Status Catalog::Save(const std::string& items_path,
                           const std::string& topics_path) const {
  if (absl::Status s = internal::WriteFile(items_path, Serialize()); !s.ok()) {
    return s;
  }
  return WriteTopics(topics_path, topics_);
}

absl::StatusOr<Catalog> Catalog::Load(const std::string& items_path,
                                      const std::string& topics_path) {
  absl::StatusOr<std::vector<Topic>> topics = ReadTopics(topics_path);
  if (!topics.ok()) return topics.status();
  absl::StatusOr<std::string> text = internal::ReadFile(items_path);
  if (!text.ok()) return text.status();
  return Parse(*text, *std::move(topics));
}

absl::StatusOr<CatalogSpec> ParseCatalogSpec(std::string_view jsonl) {
  CatalogSpec spec;
  size_t start = 0;
  int line_no = 0;
  while (start < jsonl.size()) {
    size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "catalog spec line " + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      return absl::InvalidArgumentError(where + ": " + e.what());
    }
    TopicSpec t;
    try {
      t.topic.id = j.at("topic_id").get<std::string>();
      t.topic.display_name = j.value("display_name", t.topic.id);
      t.topic.queries = j.at("queries").get<std::vector<std::string>>();
      t.promoting = j.value("promoting", 0);
      t.debunking = j.value("debunking", 0);
      t.neutral = j.value("neutral", 0);
      t.channels = j.value("channels", t.channels);
      if (auto r = j.find("relevance"); r != j.end()) {
        t.relevance_min = r->value("min", t.relevance_min);
        t.relevance_max = r->value("max", t.relevance_max);
        t.relevance_exponent = r->value("exponent", t.relevance_exponent);
        t.coverage = r->value("coverage", t.coverage);
      }
      if (auto r = j.find("relevance_scale"); r != j.end()) {
        t.promoting_relevance_scale =
            r->value("promoting", t.promoting_relevance_scale);
        t.debunking_relevance_scale =
            r->value("debunking", t.debunking_relevance_scale);
        t.neutral_relevance_scale =
            r->value("neutral", t.neutral_relevance_scale);
      }
      if (auto r = j.find("length_minutes"); r != j.end()) {
        t.length_min = std::chrono::minutes(r->value("min", 2));
        t.length_max = std::chrono::minutes(r->value("max", 90));
      }
      if (auto r = j.find("views"); r != j.end()) {
        t.views_min = r->value("min", t.views_min);
        t.views_max = r->value("max", t.views_max);
      }
      t.warning_share = j.value("warning_share", 0.0);
    } catch (const Json::exception& e) {
      return absl::InvalidArgumentError(where + ": " + e.what());
    }
    if (t.topic.queries.empty()) {
      return absl::InvalidArgumentError(where + ": topic " + t.topic.id +
                                        " has no queries");
    }
    if (t.promoting < 0 || t.debunking < 0 || t.neutral < 0 ||
        t.promoting + t.debunking + t.neutral == 0) {
      return absl::InvalidArgumentError(where + ": invalid stance counts");
    }
    if (t.channels < 1) {
      return absl::InvalidArgumentError(where + ": channels must be >= 1");
    }
    if (!(t.relevance_min >= 0.0 && t.relevance_min <= t.relevance_max &&
          t.relevance_max <= 1.0 && t.relevance_exponent > 0.0 &&
          t.coverage >= 0.0 && t.coverage <= 1.0)) {
      return absl::InvalidArgumentError(where + ": invalid relevance settings");
    }
    for (double s : {t.promoting_relevance_scale, t.debunking_relevance_scale,
                     t.neutral_relevance_scale}) {
      if (!(s > 0.0 && s <= 1.0)) {
        return absl::InvalidArgumentError(
            where + ": relevance scales must be in (0, 1]");
      }
    }
    if (t.length_min.count() <= 0 || t.length_min > t.length_max) {
      return absl::InvalidArgumentError(where + ": invalid video lengths");
    }
    if (t.views_min < 0 || t.views_min > t.views_max) {
      return absl::InvalidArgumentError(where + ": invalid view counts");
    }
    spec.topics.push_back(std::move(t));
  }
  if (spec.topics.empty()) {
    return absl::InvalidArgumentError("catalog spec declares no topics");
  }
  return spec;
}

absl::StatusOr<CatalogSpec> LoadCatalogSpec(const std::string& path) {
  absl::StatusOr<std::string> text = internal::ReadFile(path);
  if (!text.ok()) return text.status();
  return ParseCatalogSpec(*text);
}

absl::StatusOr<Catalog> BuildCatalog(const CatalogSpec& spec, uint64_t seed,
                                     int collect_min) {
  std::vector<Topic> topics;
  std::vector<CatalogItem> items;
  for (size_t t = 0; t < spec.topics.size(); ++t) {
    const TopicSpec& ts = spec.topics[t];
    topics.push_back(ts.topic);
    Rng rng(DeriveSeed(seed, t));
    int serial = 0;
    const struct {
      Stance stance;
      int count;
      double scale;
    } groups[] = {
        {Stance::kPromoting, ts.promoting, ts.promoting_relevance_scale},
        {Stance::kDebunking, ts.debunking, ts.debunking_relevance_scale},
        {Stance::kNeutral, ts.neutral, ts.neutral_relevance_scale},
    };
    const double log_min = std::log(std::max<int64_t>(1, ts.views_min));
    const double log_max = std::log(std::max<int64_t>(1, ts.views_max));
    for (const auto& group : groups) {
      for (int i = 0; i < group.count; ++i) {
        CatalogItem item;
        ++serial;
        item.video_id = ts.topic.id + "-v" + Pad(serial, 4);
        item.channel_id = ts.topic.id + "-" + StanceLetter(group.stance) +
                          "-c" + Pad(i % ts.channels, 3);
        item.topic_id = ts.topic.id;
        item.true_stance = group.stance;
        item.title = ts.topic.display_name + " " +
                     std::string(StanceName(group.stance)) + " video " +
                     std::to_string(i + 1);
        for (const std::string& query : ts.topic.queries) {
          const bool relevant = rng.UniformReal() < ts.coverage;
          const double u = rng.UniformReal();
          if (!relevant) continue;
          const double value =
              (ts.relevance_min + (ts.relevance_max - ts.relevance_min) *
                                      std::pow(u, ts.relevance_exponent)) *
              group.scale;
          // Relevant items always have strictly positive relevance.
          item.base_relevance[query] = std::clamp(value, 1e-6, 1.0);
        }
        const int64_t span_s = (ts.length_max - ts.length_min).count();
        item.length = ts.length_min + std::chrono::seconds(static_cast<int64_t>(
                                          rng.UniformBelow(span_s + 1)));
        item.view_count = static_cast<int64_t>(
            std::llround(std::exp(rng.UniformReal(log_min, log_max))));
        item.view_count = std::clamp(item.view_count, ts.views_min,
                                     ts.views_max);
        item.warning = rng.UniformReal() < ts.warning_share;
        items.push_back(std::move(item));
      }
    }
  }
  Catalog catalog(std::move(topics), std::move(items));
  if (absl::Status s = catalog.Validate(collect_min); !s.ok()) return s;
  return catalog;
}

absl::StatusOr<SeedSet> SelectSeedSet(const Catalog& catalog,
                                      std::string_view topic_id, SeedKind kind,
                                      int count) {
  const Stance wanted =
      kind == SeedKind::kPromoting ? Stance::kPromoting : Stance::kDebunking;
  std::vector<const CatalogItem*> pool;
  for (const CatalogItem* item : catalog.ItemsForTopic(topic_id)) {
    if (item->true_stance == wanted && item->available &&
        item->view_count >= kSeedEligibleMinViews) {
      pool.push_back(item);
    }
  }
  std::sort(pool.begin(), pool.end(),
            [](const CatalogItem* a, const CatalogItem* b) {
              if (a->view_count != b->view_count) {
                return a->view_count > b->view_count;
              }
              return a->video_id < b->video_id;
            });
  SeedSet set{std::string(topic_id), kind, {}};
  std::map<std::string, int> per_channel;
  for (const CatalogItem* item : pool) {
    if (static_cast<int>(set.videos.size()) == count) break;
    if (per_channel[item->channel_id] >= kMaxVideosPerChannel) continue;
    ++per_channel[item->channel_id];
    set.videos.push_back({item->video_id, item->channel_id, item->title});
  }
  if (static_cast<int>(set.videos.size()) < count) {
    return absl::FailedPreconditionError(
        "topic " + std::string(topic_id) + " has only " +
        std::to_string(set.videos.size()) + " eligible " +
        std::string(SeedKindName(kind)) + " seed videos, need " +
        std::to_string(count));
  }
  return set;
}

PersonalizationState SimWatch(const PersonalizationState& state,
                              const CatalogItem& item, double lambda) {
  PersonalizationState next = state;
  const double stance = static_cast<double>(item.true_stance);
  next.p = std::clamp(state.p + lambda * (stance - state.p), -1.0, 1.0);
  next.history.push_back(item.video_id);
  return next;
}

double AffinityScore(double p, Stance stance, double weight) {
  return weight * (1.0 - std::abs(p - static_cast<double>(stance)) / 2.0);
}

std::vector<const CatalogItem*> SimRank(
    const PersonalizationState& state,
    std::span<const RankCandidate> candidates, std::string_view context,
    const RankWeights& weights, size_t top_k) {
  std::vector<std::pair<double, const CatalogItem*>> scored;
  scored.reserve(candidates.size());
  for (const RankCandidate& c : candidates) {
    double score = c.base_relevance +
                   AffinityScore(state.p, c.item->true_stance, weights.affinity);
    if (weights.noise_eps > 0.0) {
      score += weights.noise_eps * NoiseUnit(weights.noise_seed, context,
                                             c.item->video_id,
                                             state.history.size());
    }
    scored.emplace_back(score, c.item);
  }
  auto better = [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second->video_id < y.second->video_id;
  };
  const size_t keep = std::min(top_k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<ptrdiff_t>(keep),
                    scored.end(), better);
  std::vector<const CatalogItem*> out;
  out.reserve(keep);
  for (size_t i = 0; i < keep; ++i) out.push_back(scored[i].second);
  return out;
}

absl::Status SimParams::Validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    return absl::InvalidArgumentError("lambda must be in (0, 1]");
  }
  if (!(w >= 0.0)) return absl::InvalidArgumentError("w must be >= 0");
  if (w_search && !(*w_search >= 0.0)) {
    return absl::InvalidArgumentError("w_search must be >= 0");
  }
  if (!(noise_eps >= 0.0)) {
    return absl::InvalidArgumentError("noise_eps must be >= 0");
  }
  if (collect_min < 1 || rec_count < 1 ||
      rec_count > static_cast<int>(kMaxRecommendations)) {
    return absl::InvalidArgumentError("invalid list sizes");
  }
  return absl::OkStatus();
}

SimPlatform::SimPlatform(std::shared_ptr<const Catalog> catalog,
                         SimParams params)
    : catalog_(std::move(catalog)), params_(params) {
  for (const CatalogItem& item : catalog_->items()) {
    max_log_views_ = std::max(
        max_log_views_, std::log10(static_cast<double>(item.view_count) + 1));
  }
}

absl::Status SimPlatform::RequireLogin() const {
  if (!account_) return absl::FailedPreconditionError("not logged in");
  return absl::OkStatus();
}

absl::Status SimPlatform::Login(const Account& account) {
  if (account.id.empty()) {
    return absl::InvalidArgumentError("account id is empty");
  }
  account_ = account;
  return absl::OkStatus();
}

absl::Status SimPlatform::AcceptConsent() { return RequireLogin(); }

absl::StatusOr<VideoInfo> SimPlatform::Lookup(std::string_view video_id) {
  const CatalogItem* item = catalog_->Find(video_id);
  if (item == nullptr) {
    return absl::NotFoundError("unknown video " + std::string(video_id));
  }
  return VideoInfo{item->video_id, item->length, item->available};
}

absl::Status SimPlatform::Watch(std::string_view video_id,
                                std::chrono::seconds duration) {
  if (absl::Status s = RequireLogin(); !s.ok()) return s;
  const CatalogItem* item = catalog_->Find(video_id);
  if (item == nullptr || !item->available) {
    return absl::NotFoundError("video unavailable: " + std::string(video_id));
  }
  if (duration.count() <= 0) {
    return absl::InvalidArgumentError("watch duration must be positive");
  }
  state_ = SimWatch(state_, *item, params_.lambda);
  current_ = item;
  watched_time_ += std::min(duration, item->length);
  return absl::OkStatus();
}

std::vector<ListEntry> SimPlatform::ToEntries(
    const std::vector<const CatalogItem*>& ranked) const {
  std::vector<ListEntry> out;
  out.reserve(ranked.size());
  for (const CatalogItem* item : ranked) {
    out.push_back({item->video_id, item->warning});
  }
  return out;
}

absl::StatusOr<std::vector<ListEntry>> SimPlatform::Search(
    std::string_view query) {
  if (absl::Status s = RequireLogin(); !s.ok()) return s;
  std::vector<RankCandidate> candidates;
  for (const CatalogItem& item : catalog_->items()) {
    const double rel = item.RelevanceFor(query);
    if (rel > 0.0 && item.available) candidates.push_back({&item, rel});
  }
  const RankWeights weights{params_.SearchWeight(), params_.noise_eps,
                            params_.seed};
  return ToEntries(SimRank(state_, candidates, "search:" + std::string(query),
                           weights,
                           static_cast<size_t>(params_.collect_min)));
}

absl::StatusOr<std::vector<ListEntry>> SimPlatform::Homepage() {
  if (absl::Status s = RequireLogin(); !s.ok()) return s;
  std::vector<RankCandidate> candidates;
  for (const CatalogItem& item : catalog_->items()) {
    if (!item.available) continue;
    const double popularity =
        std::log10(static_cast<double>(item.view_count) + 1) / max_log_views_;
    candidates.push_back({&item, popularity});
  }
  const RankWeights weights{params_.w, params_.noise_eps, params_.seed};
  return ToEntries(SimRank(state_, candidates, "home", weights,
                           static_cast<size_t>(params_.collect_min)));
}

absl::StatusOr<std::vector<ListEntry>> SimPlatform::RecommendationsCurrent() {
  if (absl::Status s = RequireLogin(); !s.ok()) return s;
  if (current_ == nullptr) {
    return absl::FailedPreconditionError("no video is open");
  }
  const Topic* topic = catalog_->FindTopic(current_->topic_id);
  std::vector<RankCandidate> candidates;
  for (const CatalogItem* item : catalog_->ItemsForTopic(current_->topic_id)) {
    if (item == current_ || !item->available) continue;
    double rel = 0.0;
    if (topic != nullptr && !topic->queries.empty()) {
      for (const std::string& q : topic->queries) rel += item->RelevanceFor(q);
      rel /= static_cast<double>(topic->queries.size());
    }
    candidates.push_back({item, rel});
  }
  const RankWeights weights{params_.w, params_.noise_eps, params_.seed};
  return ToEntries(SimRank(state_, candidates, "rec:" + current_->video_id,
                           weights, static_cast<size_t>(params_.rec_count)));
}

absl::Status SimPlatform::ResetHistory() {
  if (absl::Status s = RequireLogin(); !s.ok()) return s;
  state_ = PersonalizationState{};
  current_ = nullptr;
  return absl::OkStatus();
}

AdapterFactory MakeSimAdapterFactory(std::shared_ptr<const Catalog> catalog,
                                     SimParams params) {
  return [catalog = std::move(catalog), params](int agent_index)
             -> absl::StatusOr<std::unique_ptr<PlatformAdapter>> {
    if (absl::Status s = params.Validate(); !s.ok()) return s;
    SimParams agent_params = params;
    agent_params.seed = DeriveSeed(params.seed, static_cast<uint64_t>(agent_index));
    return std::make_unique<SimPlatform>(catalog, agent_params);
  };
}

}  // namespace bubble_audit
