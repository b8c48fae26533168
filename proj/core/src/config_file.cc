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

#include "bubble_audit/config_file.h"

#include <charconv>
#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "record_io.h"

namespace bubble_audit {

namespace {

std::string_view Trim(std::string_view s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
absl::StatusOr<T> ParseNumber(std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError("not a number: '" + std::string(text) +
                                      "'");
  }
  return value;
}

absl::StatusOr<double> ParseReal(std::string_view text) {
  return ParseNumber<double>(text);
}

}  // namespace

absl::StatusOr<std::chrono::seconds> ParseDuration(std::string_view text) {
  int64_t scale = 1;
  if (!text.empty()) {
    switch (text.back()) {
      case 's':
        text.remove_suffix(1);
        break;
      case 'm':
        scale = 60;
        text.remove_suffix(1);
        break;
      case 'h':
        scale = 3600;
        text.remove_suffix(1);
        break;
      default:
        break;
    }
  }
  absl::StatusOr<int64_t> n = ParseNumber<int64_t>(text);
  if (!n.ok()) return n.status();
  if (*n < 0) {
    return absl::InvalidArgumentError("duration must not be negative");
  }
  return std::chrono::seconds(*n * scale);
}

absl::StatusOr<ConfigFile> ParseConfigFile(std::string_view text,
                                           const std::string& base_dir) {
  ConfigFile cfg;
  auto path = [&](std::string& out) {
    return [&out, &base_dir](std::string_view v) -> absl::Status {
      std::filesystem::path p(v);
      out = (p.is_relative() && !base_dir.empty())
                ? (std::filesystem::path(base_dir) / p).string()
                : std::string(v);
      return absl::OkStatus();
    };
  };
  auto integer = [](int& out) {
    return [&out](std::string_view v) -> absl::Status {
      absl::StatusOr<int> n = ParseNumber<int>(v);
      if (!n.ok()) return n.status();
      out = *n;
      return absl::OkStatus();
    };
  };
  auto real = [](double& out) {
    return [&out](std::string_view v) -> absl::Status {
      absl::StatusOr<double> n = ParseReal(v);
      if (!n.ok()) return n.status();
      out = *n;
      return absl::OkStatus();
    };
  };
  auto duration = [](std::chrono::seconds& out) {
    return [&out](std::string_view v) -> absl::Status {
      absl::StatusOr<std::chrono::seconds> d = ParseDuration(v);
      if (!d.ok()) return d.status();
      out = *d;
      return absl::OkStatus();
    };
  };

  RunConfig& run = cfg.run;
  SimParams& sim = cfg.sim;
  const std::map<std::string, std::function<absl::Status(std::string_view)>,
                 std::less<>>
      setters = {
          {"topic_id",
           [&](std::string_view v) {
             run.topic_id = std::string(v);
             return absl::OkStatus();
           }},
          {"run_id",
           [&](std::string_view v) {
             run.run_id = std::string(v);
             return absl::OkStatus();
           }},
          {"seed",
           [&](std::string_view v) -> absl::Status {
             absl::StatusOr<uint64_t> n = ParseNumber<uint64_t>(v);
             if (!n.ok()) return n.status();
             run.seed = *n;
             return absl::OkStatus();
           }},
          {"adapter_seed",
           [&](std::string_view v) -> absl::Status {
             absl::StatusOr<uint64_t> n = ParseNumber<uint64_t>(v);
             if (!n.ok()) return n.status();
             run.adapter_seed = *n;
             return absl::OkStatus();
           }},
          {"n_prom", integer(run.n_prom)},
          {"n_deb", integer(run.n_deb)},
          {"t_watch", duration(run.t_watch)},
          {"n_q", integer(run.n_q)},
          {"t_wait", duration(run.t_wait)},
          {"f_q", integer(run.f_q)},
          {"agents", integer(run.agents)},
          {"collect_min", integer(run.collect_min)},
          {"clock_mode",
           [&](std::string_view v) -> absl::Status {
             if (v == "virtual") {
               run.clock_mode = ClockMode::kVirtual;
             } else if (v == "real") {
               run.clock_mode = ClockMode::kReal;
             } else {
               return absl::InvalidArgumentError(
                   "clock_mode must be virtual or real");
             }
             return absl::OkStatus();
           }},
          {"reset_probe_min_overlap", real(run.reset_probe_min_overlap)},
          {"sim.lambda", real(sim.lambda)},
          {"sim.w", real(sim.w)},
          {"sim.w_search",
           [&](std::string_view v) -> absl::Status {
             absl::StatusOr<double> n = ParseReal(v);
             if (!n.ok()) return n.status();
             sim.w_search = *n;
             return absl::OkStatus();
           }},
          {"sim.noise_eps", real(sim.noise_eps)},
          {"sim.rec_count", integer(sim.rec_count)},
          {"catalog", path(cfg.catalog_path)},
          {"topics", path(cfg.topics_path)},
          {"seed_sets", path(cfg.seed_sets_path)},
      };

  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError(where + ": expected key = value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) {
      return absl::InvalidArgumentError(where + ": unknown key '" +
                                        std::string(key) + "'");
    }
    if (!seen.insert(std::string(key)).second) {
      return absl::InvalidArgumentError(where + ": duplicate key '" +
                                        std::string(key) + "'");
    }
    if (absl::Status s = it->second(value); !s.ok()) {
      return absl::InvalidArgumentError(where + " (" + std::string(key) +
                                        "): " + std::string(s.message()));
    }
  }
  sim.collect_min = run.collect_min;
  sim.seed = run.EffectiveAdapterSeed();
  return cfg;
}

absl::StatusOr<ConfigFile> LoadConfigFile(const std::string& path) {
  absl::StatusOr<std::string> text = internal::ReadFile(path);
  if (!text.ok()) return text.status();
  return ParseConfigFile(
      *text, std::filesystem::path(path).parent_path().string());
}

}  // namespace bubble_audit
