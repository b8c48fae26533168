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


#include <memory>
#include <string>

#include "benchmark/benchmark.h"
#include "bubble_audit/observation_store.h"
#include "bubble_audit/scenario.h"
#include "bubble_audit/sim_platform.h"

namespace bubble_audit {
namespace {

std::shared_ptr<const Catalog> ShippedCatalog() {
  static const std::shared_ptr<const Catalog> catalog = [] {
    absl::StatusOr<CatalogSpec> spec = LoadCatalogSpec(
        std::string(BUBBLE_AUDIT_SOURCE_DATA_DIR) + "/catalog_spec.jsonl");
    if (!spec.ok()) return std::shared_ptr<const Catalog>();
    absl::StatusOr<Catalog> built = BuildCatalog(*spec, 0);
    if (!built.ok()) return std::shared_ptr<const Catalog>();
    return std::make_shared<const Catalog>(*std::move(built));
  }();
  return catalog;
}

// One simulated run with the default protocol, range(0) agents.
void BM_SimulatedRun(benchmark::State& state) {
  std::shared_ptr<const Catalog> catalog = ShippedCatalog();
  if (catalog == nullptr) {
    state.SkipWithError("catalog spec not loadable");
    return;
  }
  ScenarioInputs in;
  in.config.topic_id = "flat-earth";
  in.config.seed = 1;
  in.config.agents = static_cast<int>(state.range(0));
  in.config.clock_mode = ClockMode::kVirtual;
  in.topic = *catalog->FindTopic("flat-earth");
  in.promoting = *SelectSeedSet(*catalog, "flat-earth", SeedKind::kPromoting,
                                in.config.n_prom);
  in.debunking = *SelectSeedSet(*catalog, "flat-earth", SeedKind::kDebunking,
                                in.config.n_deb);
  const AdapterFactory factory = MakeSimAdapterFactory(catalog, SimParams{});
  ScenarioOptions options;
  options.wall_time = [] { return std::string("1970-01-01T00:00:00Z"); };

  int64_t observations = 0;
  for (auto _ : state) {
    MemoryObservationStore store;
    absl::StatusOr<RunManifest> m = RunScenario(in, factory, store, options);
    if (!m.ok() || m->partial) {
      state.SkipWithError("run failed or partial");
      return;
    }
    observations += static_cast<int64_t>(store.Snapshot().size());
  }
  state.SetItemsProcessed(observations);
}
BENCHMARK(BM_SimulatedRun)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace bubble_audit
