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

#include "bubble_audit/reference_dataset.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <optional>
#include <set>
#include <tuple>

#include "record_io.h"

namespace bubble_audit {

namespace fs = std::filesystem;
using internal::Json;

namespace {

constexpr char kAdapterFileName[] = "dataset_adapter.json";

std::optional<int> ParseInt(std::string_view text) {
  // Some exports write integral codes as "1.0".
  if (text.ends_with(".0")) text.remove_suffix(2);
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// Index of the first header matching one of `names`, or -1.
int FindColumn(const std::vector<std::string>& header,
               const std::vector<std::string>& names) {
  for (const std::string& name : names) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it != header.end()) return static_cast<int>(it - header.begin());
  }
  return -1;
}

std::string Join(const std::vector<std::string>& names) {
  std::string out;
  for (const std::string& n : names) out += (out.empty() ? "" : "|") + n;
  return out;
}

absl::StatusOr<DatasetFileRole> ParseRole(std::string_view text) {
  if (text == "annotations") return DatasetFileRole::kAnnotations;
  if (text == "search") return DatasetFileRole::kSearch;
  if (text == "recommendations") return DatasetFileRole::kRecommendations;
  return absl::InvalidArgumentError("unknown dataset file role '" +
                                    std::string(text) + "'");
}

// Parsed rows of one file, kept apart until the whole file validated.
struct FileContents {
  std::map<std::string, AnnotationCode> codes;
  std::vector<ImportedList> lists;
};

void LoadAnnotationFile(const std::vector<std::vector<std::string>>& rows,
                        const DatasetColumns& cols, FileDiagnostic& diag,
                        FileContents& out) {
  const int vid = FindColumn(rows[0], cols.video_id);
  const int code = FindColumn(rows[0], cols.code);
  if (vid < 0) diag.messages.push_back("no video id column (" + Join(cols.video_id) + ")");
  if (code < 0) diag.messages.push_back("no code column (" + Join(cols.code) + ")");
  if (vid < 0 || code < 0) return;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string where = "row " + std::to_string(i + 1);
    if (row.size() <= static_cast<size_t>(std::max(vid, code))) {
      diag.messages.push_back(where + ": too few fields");
      continue;
    }
    std::optional<int> value = ParseInt(row[code]);
    absl::StatusOr<AnnotationCode> parsed =
        value ? AnnotationCode::Create(*value, row[vid])
              : absl::StatusOr<AnnotationCode>(
                    absl::InvalidArgumentError("not an integer"));
    if (!parsed.ok()) {
      diag.messages.push_back(where + ": bad code '" + row[code] + "': " +
                              std::string(parsed.status().message()));
      continue;
    }
    auto [it, inserted] = out.codes.emplace(row[vid], *parsed);
    if (!inserted && it->second != *parsed) {
      diag.messages.push_back(where + ": contradictory codes for " + row[vid]);
    }
  }
}

void LoadListFile(const std::vector<std::vector<std::string>>& rows,
                  const DatasetFileSpec& spec, const DatasetColumns& cols,
                  FileDiagnostic& diag, FileContents& out) {
  const int vid = FindColumn(rows[0], cols.video_id);
  const int topic = FindColumn(rows[0], cols.topic);
  const int list = FindColumn(rows[0], cols.list_id);
  const int rank = FindColumn(rows[0], cols.rank);
  const int query = FindColumn(rows[0], cols.query);
  const std::pair<int, const std::vector<std::string>*> required[] = {
      {vid, &cols.video_id}, {topic, &cols.topic},
      {list, &cols.list_id}, {rank, &cols.rank}};
  bool ok = true;
  for (const auto& [index, names] : required) {
    if (index < 0) {
      diag.messages.push_back("missing column (" + Join(*names) + ")");
      ok = false;
    }
  }
  if (!ok) return;
  const int width = std::max({vid, topic, list, rank, query}) + 1;

  // (topic, list id) -> (query, rank -> video)
  std::map<std::pair<std::string, std::string>,
           std::pair<std::string, std::map<int, std::string>>>
      grouped;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string where = "row " + std::to_string(i + 1);
    if (static_cast<int>(row.size()) < width) {
      diag.messages.push_back(where + ": too few fields");
      continue;
    }
    std::optional<int> r = ParseInt(row[rank]);
    if (!r || *r < 1) {
      diag.messages.push_back(where + ": bad rank '" + row[rank] + "'");
      continue;
    }
    auto& entry = grouped[{row[topic], row[list]}];
    if (query >= 0) entry.first = row[query];
    if (!entry.second.emplace(*r, row[vid]).second) {
      diag.messages.push_back(where + ": duplicate rank " + row[rank] +
                              " in list " + row[list]);
    }
  }
  for (auto& [key, entry] : grouped) {
    ImportedList imported;
    imported.tag = spec.tag;
    imported.topic = key.first;
    imported.query = entry.first;
    imported.list.kind = spec.role == DatasetFileRole::kSearch
                             ? ListKind::kSearch
                             : ListKind::kRecommendation;
    imported.list.provenance = {spec.tag, key.second, 0, entry.first};
    int expected = 1;
    for (const auto& [r, video] : entry.second) {
      if (r != expected) {
        diag.messages.push_back("list " + key.second + " skips rank " +
                                std::to_string(expected));
        break;
      }
      imported.list.video_ids.push_back(video);
      ++expected;
    }
    out.lists.push_back(std::move(imported));
  }
}

}  // namespace

DatasetAdapter DefaultDatasetAdapter() {
  DatasetAdapter adapter;
  adapter.files = {
      {"annotations.csv", DatasetFileRole::kAnnotations, ""},
      {"reference_search.csv", DatasetFileRole::kSearch,
       std::string(kReferenceTag)},
      {"reference_recommendations.csv", DatasetFileRole::kRecommendations,
       std::string(kReferenceTag)},
      {"ours_search.csv", DatasetFileRole::kSearch, std::string(kOursTag)},
      {"ours_recommendations.csv", DatasetFileRole::kRecommendations,
       std::string(kOursTag)},
  };
  return adapter;
}

absl::StatusOr<DatasetAdapter> ParseDatasetAdapter(std::string_view json) {
  Json j = Json::parse(json, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("dataset adapter must be a JSON object");
  }
  DatasetAdapter adapter;
  try {
    for (const Json& f : j.at("files")) {
      absl::StatusOr<DatasetFileRole> role =
          ParseRole(f.at("role").get<std::string>());
      if (!role.ok()) return role.status();
      adapter.files.push_back({f.at("file").get<std::string>(), *role,
                               f.value("tag", std::string())});
    }
    if (auto c = j.find("columns"); c != j.end()) {
      DatasetColumns& cols = adapter.columns;
      const std::pair<const char*, std::vector<std::string>*> keys[] = {
          {"video_id", &cols.video_id}, {"code", &cols.code},
          {"topic", &cols.topic},       {"list_id", &cols.list_id},
          {"rank", &cols.rank},         {"query", &cols.query}};
      for (const auto& [key, target] : keys) {
        if (c->contains(key)) *target = (*c)[key].get<std::vector<std::string>>();
      }
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(std::string("bad dataset adapter: ") +
                                      e.what());
  }
  for (const DatasetFileSpec& f : adapter.files) {
    if (f.role != DatasetFileRole::kAnnotations && f.tag.empty()) {
      return absl::InvalidArgumentError("list file " + f.file_name +
                                        " needs a tag");
    }
  }
  return adapter;
}

bool ImportReport::all_loaded() const {
  return std::all_of(files.begin(), files.end(),
                     [](const FileDiagnostic& f) { return f.loaded; });
}

std::string ImportReport::Summary() const {
  std::string out;
  for (const FileDiagnostic& f : files) {
    out += f.file_name + ": " + (f.loaded ? "loaded" : "rejected") + ", " +
           std::to_string(f.rows) + " rows\n";
    for (const std::string& m : f.messages) out += "  " + m + "\n";
  }
  return out;
}

absl::StatusOr<ReferenceDataset> ImportReferenceDataset(
    const std::string& directory) {
  const fs::path adapter_path = fs::path(directory) / kAdapterFileName;
  std::error_code ec;
  if (fs::exists(adapter_path, ec)) {
    absl::StatusOr<std::string> text = internal::ReadFile(adapter_path.string());
    if (!text.ok()) return text.status();
    absl::StatusOr<DatasetAdapter> adapter = ParseDatasetAdapter(*text);
    if (!adapter.ok()) return adapter.status();
    return ImportReferenceDataset(directory, *adapter);
  }
  return ImportReferenceDataset(directory, DefaultDatasetAdapter());
}

absl::StatusOr<ReferenceDataset> ImportReferenceDataset(
    const std::string& directory, const DatasetAdapter& adapter) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    return absl::NotFoundError("dataset directory " + directory +
                               " does not exist");
  }
  ReferenceDataset dataset;
  for (const DatasetFileSpec& spec : adapter.files) {
    FileDiagnostic diag;
    diag.file_name = spec.file_name;
    const fs::path path = fs::path(directory) / spec.file_name;
    absl::StatusOr<std::string> text = internal::ReadFile(path.string());
    if (!text.ok()) {
      diag.messages.push_back(std::string(text.status().message()));
      dataset.report.files.push_back(std::move(diag));
      continue;
    }
    absl::StatusOr<std::vector<std::vector<std::string>>> rows =
        internal::ParseCsv(*text);
    if (!rows.ok()) {
      diag.messages.push_back(std::string(rows.status().message()));
    } else if (rows->empty()) {
      diag.messages.push_back("empty file");
    } else {
      diag.rows = static_cast<int>(rows->size()) - 1;
      FileContents contents;
      if (spec.role == DatasetFileRole::kAnnotations) {
        LoadAnnotationFile(*rows, adapter.columns, diag, contents);
        for (const auto& [id, code] : contents.codes) {
          auto it = dataset.codes.find(id);
          if (it != dataset.codes.end() && it->second != code) {
            diag.messages.push_back("code for " + id +
                                    " contradicts an earlier file");
          }
        }
      } else {
        LoadListFile(*rows, spec, adapter.columns, diag, contents);
      }
      if (diag.messages.empty()) {
        diag.loaded = true;
        dataset.codes.merge(contents.codes);
        std::move(contents.lists.begin(), contents.lists.end(),
                  std::back_inserter(dataset.lists));
      }
    }
    dataset.report.files.push_back(std::move(diag));
  }
  const bool any = std::any_of(
      dataset.report.files.begin(), dataset.report.files.end(),
      [](const FileDiagnostic& f) { return f.loaded; });
  if (!any) {
    return absl::FailedPreconditionError("no dataset file could be imported\n" +
                                         dataset.report.Summary());
  }
  return dataset;
}

ReferenceSamples ComputeReferenceSamples(const ReferenceDataset& dataset,
                                         MetricView view,
                                         bool shared_queries_only) {
  const ListKind kind = MetricViewKind(view);
  std::map<std::string, std::set<std::string>> tags_by_query;
  for (const ImportedList& l : dataset.lists) {
    if (l.list.kind == ListKind::kSearch) tags_by_query[l.query].insert(l.tag);
  }

  const AnnotationStanceSource source(dataset.codes);
  ReferenceSamples out;
  std::set<std::string> missing;
  std::map<std::pair<std::string, std::string>, MetricSample> by_key;
  for (const ImportedList& l : dataset.lists) {
    if (l.list.kind != kind) continue;
    if (shared_queries_only && kind == ListKind::kSearch &&
        tags_by_query[l.query].size() < 2) {
      continue;
    }
    AnnotationOutcome annotated =
        AnnotateLists(std::span<const CollectedList>(&l.list, 1), source);
    out.incomplete_lists += annotated.incomplete_lists;
    missing.insert(annotated.missing_ids.begin(), annotated.missing_ids.end());
    if (annotated.lists.empty()) continue;
    absl::StatusOr<double> value = ApplyView(annotated.lists.front(), view);
    if (!value.ok()) continue;
    MetricSample& sample = by_key[{l.topic, l.tag}];
    sample.label = {l.topic, l.tag, kind};
    sample.values.push_back(*value);
  }
  for (auto& [key, sample] : by_key) out.samples.push_back(std::move(sample));
  out.missing_ids.assign(missing.begin(), missing.end());
  return out;
}

std::vector<ComparisonRow> CompareTags(std::span<const MetricSample> samples,
                                       std::string_view tag_a,
                                       std::string_view tag_b) {
  std::map<std::string, std::pair<const MetricSample*, const MetricSample*>>
      by_topic;
  ListKind kind = ListKind::kSearch;
  for (const MetricSample& s : samples) {
    kind = s.label.kind;
    if (s.label.point == tag_a) by_topic[s.label.topic].first = &s;
    if (s.label.point == tag_b) by_topic[s.label.topic].second = &s;
  }
  const double alpha =
      Bonferroni(kDefaultAlpha, std::max<int>(1, by_topic.size()));
  std::vector<ComparisonRow> rows;
  MetricSample pooled_a{{"all", std::string(tag_a), kind}, {}};
  MetricSample pooled_b{{"all", std::string(tag_b), kind}, {}};
  for (const auto& [topic, pair] : by_topic) {
    const auto& [a, b] = pair;
    if (a == nullptr || b == nullptr) {
      ComparisonRow gap;
      gap.a = {topic, std::string(tag_a), kind};
      gap.b = {topic, std::string(tag_b), kind};
      gap.alpha_effective = alpha;
      gap.gap_note = "missing sample " + (a == nullptr ? gap.a : gap.b).ToString();
      rows.push_back(std::move(gap));
      continue;
    }
    rows.push_back(CompareSamples(*a, *b, alpha));
    pooled_a.values.insert(pooled_a.values.end(), a->values.begin(),
                           a->values.end());
    pooled_b.values.insert(pooled_b.values.end(), b->values.begin(),
                           b->values.end());
  }
  ComparisonRow pooled;
  if (pooled_a.values.empty() || pooled_b.values.empty()) {
    pooled.a = pooled_a.label;
    pooled.b = pooled_b.label;
    pooled.gap_note = "no topic has both samples";
  } else {
    pooled = CompareSamples(pooled_a, pooled_b, kDefaultAlpha);
  }
  pooled.pooled = true;
  rows.push_back(std::move(pooled));
  return rows;
}

}  // namespace bubble_audit
