// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "climadash/dsl/model.hpp"
#include "climadash/ingestion/record.hpp"
#include "climadash/ingestion/store.hpp"
#include "climadash/timeutil.hpp"

namespace climadash::kpi {

// Result of evaluating an expression: a number, "no data" (an aggregate saw
// no values), or an error such as division by zero.
struct ExprValue {
  enum class State { kValue, kNoData, kError };

  State state = State::kNoData;
  double value = 0.0;
  std::string error;

  static ExprValue of(double v) { return {State::kValue, v, {}}; }
  static ExprValue no_data() { return {State::kNoData, 0.0, {}}; }
  static ExprValue failure(std::string why) {
    return {State::kError, 0.0, std::move(why)};
  }
  bool has_value() const noexcept { return state == State::kValue; }
};

// Aggregates run in double precision over the records that carry the field:
// sum, min, max as usual; avg = sum / count; first/last by time axis with
// arrival order breaking ties; count() = number of records. An aggregate with
// no input values is no-data (count() is 0 instead). Errors dominate no-data,
// which dominates values, as results combine through arithmetic.
ExprValue evaluate_expr(const dsl::Expr& expr,
                        std::span<const ingestion::Record> records,
                        const dsl::Entity& entity);

enum class Status { kNoData, kOk, kOnTrack, kOffTrack, kError };

std::string_view to_string(Status status) noexcept;

// ok without a target; otherwise on_track iff `value cmp bound` holds.
Status kpi_status(double value, const std::optional<dsl::Target>& target) noexcept;

// clamp((baseline - current) / (baseline - target_bound), 0, 1). Works for
// reduction and increase targets alike. nullopt when baseline == target_bound.
std::optional<double> progress(double current, double baseline,
                               double target_bound) noexcept;

struct GroupValue {
  std::optional<double> value;
  Status status = Status::kNoData;
  std::size_t records = 0;
  std::string error;
};

struct KpiValue {
  std::string kpi;
  std::optional<double> value;
  std::optional<std::string> unit;
  EpochMs window_end = 0;
  std::optional<dsl::Duration> window;
  Status status = Status::kNoData;
  std::size_t records = 0;
  std::string error;
  std::optional<dsl::Target> target;
  std::optional<double> progress;
  std::optional<std::string> group_by;
  std::map<std::string, GroupValue> groups;

  nlohmann::ordered_json to_json() const;
};

struct EvalOptions {
  std::optional<EpochMs> at;  // window end; wall clock when absent
  std::optional<dsl::Duration> window_override;
  std::optional<std::string> group_by_override;
};

// Evaluates a KPI over the window (end - window, end]. KPIs without a window
// see every record up to `end`. Grouped KPIs additionally report one value
// per distinct group key; records lacking the group field fall under "".
KpiValue evaluate_kpi(const dsl::KpiDef& kpi, const ingestion::Store& store,
                      const EvalOptions& options = {});

}  // namespace climadash::kpi
