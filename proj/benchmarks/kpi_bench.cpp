// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "climadash/dsl/parser.hpp"
#include "climadash/ingestion/store.hpp"
#include "climadash/kpi.hpp"
#include "generators.hpp"

namespace {

using namespace climadash;

std::shared_ptr<const dsl::Model> scenario_model() {
  auto r = dsl::load_model(cdtest::kScenarioModel);
  return std::make_shared<const dsl::Model>(std::move(*r.model));
}

// Windowed grouped average over a store of state.range(0) records.
void BM_EvaluateKpi(benchmark::State& state) {
  auto model = scenario_model();
  ingestion::Store store(model);
  cdtest::Rng rng(21);
  auto target = static_cast<std::size_t>(state.range(0));
  while (store.size("readings") < target) {
    auto sc = cdtest::random_scenario(rng, 200);
    store.ingest_batch("readings", sc.records);
  }
  dsl::KpiDef k;
  k.name = "k";
  k.source = "readings";
  k.expr = dsl::Expr::aggregate(dsl::AggFn::kAvg, "v");
  k.window = dsl::Duration{3, dsl::DurationUnit::kDay};
  k.group_by = "station";
  kpi::EvalOptions opts;
  opts.at = cdtest::kScenarioBase + 5LL * 24 * 3600 * 1000;
  for (auto _ : state) benchmark::DoNotOptimize(kpi::evaluate_kpi(k, store, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateKpi)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_IngestBatch(benchmark::State& state) {
  auto model = scenario_model();
  cdtest::Rng rng(22);
  auto sc = cdtest::random_scenario(rng, 200);
  for (auto _ : state) {
    ingestion::Store store(model);
    benchmark::DoNotOptimize(store.ingest_batch("readings", sc.records));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sc.records.size()));
}
BENCHMARK(BM_IngestBatch);

}  // namespace
