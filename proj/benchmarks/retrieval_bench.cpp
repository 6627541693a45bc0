// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "bm25_check.hpp"
#include "climadash/agent/retrieval.hpp"

namespace {

using climadash::agent::Passage;
using climadash::agent::RetrievalIndex;

void BM_Bm25Answer(benchmark::State& state) {
  cdtest::Rng rng(31);
  std::vector<Passage> passages;
  for (int i = 0; i < state.range(0); ++i) passages.push_back({"doc", i, cdtest::random_passage(rng), 0});
  auto index = RetrievalIndex::from_passages(passages);
  for (auto _ : state) benchmark::DoNotOptimize(index.answer("urban heat and green roof", 5));
}
BENCHMARK(BM_Bm25Answer)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace
