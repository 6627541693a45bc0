// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0
//
// Engine-versus-oracle comparison for random KPI scenarios.

#pragma once

#include <memory>
#include <sstream>
#include <string>

#include "climadash/dsl/parser.hpp"
#include "climadash/ingestion/store.hpp"
#include "climadash/kpi.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace cdtest {

inline climadash::dsl::KpiDef random_scenario_kpi(Rng& rng) {
  using namespace climadash::dsl;
  KpiDef k;
  k.name = "k";
  k.source = "readings";
  k.expr = random_expr(rng, {"v", "n", "w"}, uniform_int(rng, 0, 3));
  static const std::vector<Duration> kWindows = {
      {30, DurationUnit::kMinute}, {6, DurationUnit::kHour}, {1, DurationUnit::kDay},
      {3, DurationUnit::kDay},     {1, DurationUnit::kWeek}, {2, DurationUnit::kWeek}};
  int w = uniform_int(rng, 0, 7);
  if (w < 6) k.window = kWindows[static_cast<std::size_t>(w)];
  if (w == 6) k.window = random_duration(rng);
  int g = uniform_int(rng, 0, 2);
  if (g == 1) k.group_by = "station";
  if (g == 2) k.group_by = "kind";
  if (chance(rng, 0.6)) {
    k.target = Target{static_cast<Comparator>(uniform_int(rng, 0, 4)), uniform_int(rng, -40, 160) / 4.0};
  }
  return k;
}

inline std::string describe(const std::string& status, const std::optional<double>& v,
                            std::size_t records) {
  std::ostringstream out;
  out.precision(17);
  out << status << " value=";
  if (v) {
    out << *v;
  } else {
    out << "none";
  }
  out << " records=" << records;
  return out.str();
}

// Empty when the engine agrees with the oracle, otherwise what differed.
inline std::string compare_group(const std::string& where, const OracleGroup& want,
                                 const std::string& got_status, const std::optional<double>& got_value,
                                 std::size_t got_records, double rel) {
  bool same = want.status == got_status && want.records == got_records &&
              want.value.has_value() == got_value.has_value() &&
              (!want.value || close_rel(*want.value, *got_value, rel));
  if (same) return {};
  return where + ": want " + describe(want.status, want.value, want.records) + ", got " +
         describe(got_status, got_value, got_records) + "\n";
}

inline std::string compare_kpi(const climadash::dsl::KpiDef& k, const std::vector<Sample>& samples,
                               const climadash::ingestion::Store& store, std::int64_t at,
                               double rel = 1e-9) {
  using namespace climadash;
  std::optional<std::int64_t> window_ms;
  if (k.window) window_ms = k.window->milliseconds();
  auto want = oracle_kpi(k, samples, at, window_ms, k.group_by);
  kpi::EvalOptions opts;
  opts.at = at;
  auto got = kpi::evaluate_kpi(k, store, opts);
  std::string diff = compare_group("whole", want.whole, std::string(kpi::to_string(got.status)),
                                   got.value, got.records, rel);
  if (k.group_by) {
    if (want.groups.size() != got.groups.size()) {
      diff += "group count: want " + std::to_string(want.groups.size()) + ", got " +
              std::to_string(got.groups.size()) + "\n";
    }
    for (const auto& [key, g] : want.groups) {
      auto it = got.groups.find(key);
      if (it == got.groups.end()) {
        diff += "missing group '" + key + "'\n";
        continue;
      }
      diff += compare_group("group '" + key + "'", g, std::string(kpi::to_string(it->second.status)),
                            it->second.value, it->second.records, rel);
    }
  }
  if (!diff.empty()) {
    diff = "kpi expr " + dsl::print_expr(k.expr) + " window " +
           (k.window ? k.window->to_string() : std::string("none")) + " at " + std::to_string(at) +
           "\n" + diff;
  }
  return diff;
}

// Record count over (at - w, at] via a count() KPI.
inline std::size_t windowed_count(const climadash::ingestion::Store& store,
                                  const climadash::dsl::Duration& w, std::int64_t at) {
  using namespace climadash;
  dsl::KpiDef k;
  k.name = "n";
  k.source = "readings";
  k.expr = dsl::Expr::aggregate(dsl::AggFn::kCount);
  k.window = w;
  kpi::EvalOptions opts;
  opts.at = at;
  auto v = kpi::evaluate_kpi(k, store, opts);
  return static_cast<std::size_t>(v.value.value_or(0.0));
}

// (at - 2w, at - w] and (at - w, at] partition (at - 2w, at].
inline bool partition_holds(const climadash::ingestion::Store& store,
                            const climadash::dsl::Duration& w, std::int64_t at) {
  climadash::dsl::Duration twice{w.magnitude * 2, w.unit};
  return windowed_count(store, w, at) + windowed_count(store, w, at - w.milliseconds()) ==
         windowed_count(store, twice, at);
}

inline std::int64_t random_at(Rng& rng) {
  // Whole minutes from a day before the data to a day after it.
  return kScenarioBase + std::int64_t{60000} * uniform_int(rng, -24 * 60, 11 * 24 * 60);
}

}  // namespace cdtest
