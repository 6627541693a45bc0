// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded random inputs: valid models, mutated model text, KPI scenarios.

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "climadash/dsl/model.hpp"
#include "climadash/timeutil.hpp"
#include "oracles.hpp"

namespace cdtest {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(items.size()) - 1))];
}

// --- models -----------------------------------------------------------------

inline std::string random_identifier(Rng& rng, std::set<std::string>& taken) {
  // Keywords are contextual, so they make legal names and are worth mixing in.
  static const std::vector<std::string> kWords = {
      "entity", "datasource", "kpi",  "source", "expr",  "window", "unit",  "target",
      "optional", "string",   "int",  "float",  "bool",  "enum",   "count", "sum",
      "avg",    "first",      "last", "station", "pm25", "t",      "x_1",   "group_by"};
  for (;;) {
    std::string name;
    if (chance(rng, 0.3)) {
      name = pick(rng, kWords);
    } else {
      name.push_back(static_cast<char>('a' + uniform_int(rng, 0, 25)));
      int len = uniform_int(rng, 0, 9);
      static const std::string kTail = "abcdefghijklmnopqrstuvwxyz0123456789_";
      for (int i = 0; i < len; ++i) {
        name.push_back(kTail[static_cast<std::size_t>(uniform_int(rng, 0, 36))]);
      }
    }
    if (taken.insert(name).second) return name;
  }
}

inline std::string random_unit(Rng& rng) {
  static const std::vector<std::string> kUnits = {
      "ug/m3", "kWh", "%", "", "t CO2e", "say \"hi\"", "back\\slash", "tab\there",
      "two\nlines", "\xC2\xB5g/m\xC2\xB3", "{braces}: # not a comment"};
  return pick(rng, kUnits);
}

inline double random_literal(Rng& rng, bool allow_negative) {
  double v = 0.0;
  switch (uniform_int(rng, 0, 4)) {
    case 0: v = uniform_int(rng, 0, 1000); break;
    case 1: v = std::uniform_real_distribution<double>(0.0, 1000.0)(rng); break;
    case 2: v = std::uniform_real_distribution<double>(0.0, 1e-6)(rng); break;
    case 3: v = std::uniform_real_distribution<double>(1e9, 1e15)(rng); break;
    default: v = uniform_int(rng, 0, 40) / 4.0; break;
  }
  if (allow_negative && chance(rng, 0.3)) v = -v;
  return v;
}

inline climadash::dsl::Expr random_expr(Rng& rng, const std::vector<std::string>& numeric,
                                        int depth) {
  using climadash::dsl::AggFn;
  using climadash::dsl::BinOp;
  using climadash::dsl::Expr;
  if (depth <= 0 || chance(rng, 0.4)) {
    if (chance(rng, 0.3)) return Expr::literal(random_literal(rng, false));
    if (numeric.empty() || chance(rng, 0.15)) return Expr::aggregate(AggFn::kCount);
    auto fn = static_cast<AggFn>(uniform_int(rng, 0, 5));
    return Expr::aggregate(fn, pick(rng, numeric));
  }
  auto op = static_cast<BinOp>(uniform_int(rng, 0, 3));
  return Expr::binary(op, random_expr(rng, numeric, depth - 1),
                      random_expr(rng, numeric, depth - 1));
}

inline climadash::dsl::Duration random_duration(Rng& rng) {
  climadash::dsl::Duration d;
  d.magnitude = uniform_int(rng, 1, 120);
  d.unit = static_cast<climadash::dsl::DurationUnit>(uniform_int(rng, 0, 3));
  return d;
}

// A model that passes validation, exercising every construct of the grammar.
inline climadash::dsl::Model random_model(Rng& rng) {
  using namespace climadash::dsl;
  Model m;
  std::set<std::string> entity_names, ds_names, kpi_names;
  int n_entities = uniform_int(rng, 0, 4);
  for (int i = 0; i < n_entities; ++i) {
    Entity e;
    e.name = random_identifier(rng, entity_names);
    std::set<std::string> field_names;
    int n_fields = uniform_int(rng, 1, 6);
    for (int j = 0; j < n_fields; ++j) {
      Field f;
      f.name = random_identifier(rng, field_names);
      f.type.kind = static_cast<FieldKind>(uniform_int(rng, 0, 5));
      if (f.type.kind == FieldKind::kEnum) {
        std::set<std::string> values;
        int n_values = uniform_int(rng, 1, 4);
        for (int v = 0; v < n_values; ++v) f.type.enum_values.push_back(random_identifier(rng, values));
      }
      if (chance(rng, 0.3)) f.unit = random_unit(rng);
      f.optional = chance(rng, 0.3);
      e.fields.push_back(std::move(f));
    }
    m.entities.push_back(std::move(e));
  }
  if (!m.entities.empty()) {
    int n_ds = uniform_int(rng, 0, 3);
    for (int i = 0; i < n_ds; ++i) {
      Datasource d;
      d.name = random_identifier(rng, ds_names);
      d.entity = pick(rng, m.entities).name;
      m.datasources.push_back(std::move(d));
    }
  }
  if (!m.datasources.empty()) {
    int n_kpis = uniform_int(rng, 0, 4);
    for (int i = 0; i < n_kpis; ++i) {
      KpiDef k;
      k.name = random_identifier(rng, kpi_names);
      const auto& ds = pick(rng, m.datasources);
      k.source = ds.name;
      const Entity* e = m.find_entity(ds.entity);
      std::vector<std::string> numeric, categorical;
      for (const auto& f : e->fields) {
        if (f.type.is_numeric()) numeric.push_back(f.name);
        if (f.type.is_categorical()) categorical.push_back(f.name);
      }
      k.expr = random_expr(rng, numeric, 3);
      if (e->time_axis() && chance(rng, 0.6)) k.window = random_duration(rng);
      if (chance(rng, 0.4)) k.unit = random_unit(rng);
      if (chance(rng, 0.5)) {
        k.target = Target{static_cast<Comparator>(uniform_int(rng, 0, 4)), random_literal(rng, true)};
      }
      if (chance(rng, 0.3)) k.baseline = random_literal(rng, true);
      if (!categorical.empty() && chance(rng, 0.4)) k.group_by = pick(rng, categorical);
      m.kpis.push_back(std::move(k));
    }
  }
  return m;
}

// Byte-level damage to model text: flips, deletions, insertions of syntax
// fragments, duplication and truncation.
inline std::string mutate_text(Rng& rng, std::string text) {
  static const std::vector<std::string> kFragments = {
      "{", "}", "(", ")", ":", ",", ";", "\"", "\\", "#", "\n", "entity", "kpi", "datasource",
      "expr:", "window: 0d", "99999999999999999999999", "1e999", "-", "<=", "enum()",
      "\xff\xfe", std::string(1, '\0'), "unit \"", "optional optional", "sum(", "/ 0"};
  int ops = uniform_int(rng, 1, 5);
  for (int i = 0; i < ops; ++i) {
    std::size_t pos = text.empty() ? 0 : static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(text.size())));
    switch (uniform_int(rng, 0, 4)) {
      case 0:
        if (!text.empty()) {
          text[std::min(pos, text.size() - 1)] = static_cast<char>(uniform_int(rng, 0, 255));
        }
        break;
      case 1:
        text.erase(pos, static_cast<std::size_t>(uniform_int(rng, 1, 12)));
        break;
      case 2:
        text.insert(pos, pick(rng, kFragments));
        break;
      case 3: {
        auto len = static_cast<std::size_t>(uniform_int(rng, 1, 40));
        text.insert(pos, text.substr(pos, len));
        break;
      }
      default:
        text.resize(pos);
        break;
    }
  }
  return text;
}

// --- KPI scenarios ----------------------------------------------------------

inline constexpr const char* kScenarioModel = R"(entity reading {
  station: string optional
  kind: enum(alpha, beta, gamma)
  measured_at: datetime
  v: float
  n: int optional
  w: float optional
}

datasource readings: reading
)";

// 2024-06-01T00:00:00Z
inline constexpr std::int64_t kScenarioBase = 1717200000000;

struct Scenario {
  std::vector<Sample> samples;
  std::vector<nlohmann::json> records;  // same data as ingest payload
};

inline Scenario random_scenario(Rng& rng, int max_records = 200) {
  static const std::vector<std::string> kStations = {"s1", "s2", "s3", "north"};
  static const std::vector<std::string> kKinds = {"alpha", "beta", "gamma"};
  Scenario sc;
  int n = uniform_int(rng, 0, max_records);
  std::vector<std::int64_t> reused;
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.arrival = static_cast<std::size_t>(i);
    if (!reused.empty() && chance(rng, 0.15)) {
      s.t = pick(rng, reused);
    } else {
      // Whole minutes across ten days.
      s.t = kScenarioBase + std::int64_t{60000} * uniform_int(rng, 0, 10 * 24 * 60);
      reused.push_back(s.t);
    }
    nlohmann::json j;
    if (chance(rng, 0.85)) {
      s.labels["station"] = pick(rng, kStations);
      j["station"] = s.labels["station"];
    }
    s.labels["kind"] = pick(rng, kKinds);
    j["kind"] = s.labels["kind"];
    j["measured_at"] = climadash::format_rfc3339(s.t);
    // Quarter steps keep some sums exact and make ties and zeros likely.
    s.numbers["v"] = uniform_int(rng, -200, 600) / 4.0;
    j["v"] = s.numbers["v"];
    if (chance(rng, 0.7)) {
      s.numbers["n"] = uniform_int(rng, -20, 100);
      j["n"] = static_cast<std::int64_t>(s.numbers["n"]);
    }
    if (chance(rng, 0.5)) {
      s.numbers["w"] = std::uniform_real_distribution<double>(-1e3, 1e3)(rng);
      j["w"] = s.numbers["w"];
    }
    sc.samples.push_back(std::move(s));
    sc.records.push_back(std::move(j));
  }
  return sc;
}

}  // namespace cdtest
