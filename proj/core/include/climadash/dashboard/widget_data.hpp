// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "climadash/dashboard/dashboard.hpp"
#include "climadash/ingestion/store.hpp"
#include "climadash/timeutil.hpp"

namespace climadash::dashboard {

inline constexpr std::size_t kTableRowLimit = 100;
inline constexpr std::size_t kLinePointLimit = 1000;
inline constexpr int kKpiSeriesPoints = 12;

// Data payload a widget renders. Always returns a document with a "status"
// of ok, no_data or error (or a KPI status); problems never escape as
// exceptions.
//
//   line   datasource: {"points": [{"t", "value"}...]} ascending by t
//          kpi:        the KPI evaluated at 12 consecutive window ends
//   bar    datasource: average of the value field per category
//          kpi:        one bar per group (or a single bar)
//   gauge/stat  kpi: {"kpi": KpiValue}; datasource: latest value
//   table  datasource: the most recent <= 100 records, ascending
//          kpi:        one row per group (or the whole-window value)
nlohmann::ordered_json widget_data(const Widget& widget,
                                   const ingestion::Store& store,
                                   std::optional<EpochMs> at = std::nullopt);

}  // namespace climadash::dashboard
