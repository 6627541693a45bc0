// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "climadash/agent/grammar.hpp"
#include "climadash/dashboard/store.hpp"
#include "climadash/error.hpp"
#include "climadash/ingestion/store.hpp"
#include "climadash/kpi.hpp"
#include "climadash/timeutil.hpp"

namespace climadash::agent {

struct CommandResult {
  bool ok = false;
  std::string message;  // confirmation or plain-language error
  dashboard::DashboardPtr dashboard;
  std::optional<std::string> widget_id;  // widget the command touched
  std::optional<kpi::KpiValue> kpi;      // show_value only
  std::optional<ErrorKind> error;

  nlohmann::ordered_json to_json() const;
};

// Runs a parsed command against a stored dashboard. Dashboard errors come
// back as ok=false with a readable message; version conflicts from
// concurrent editors are retried a few times against the fresh state.
CommandResult apply_command(const AgentCommand& cmd, dashboard::DashboardStore& dashboards,
                            std::string_view dashboard_id,
                            const ingestion::Store& data,
                            std::optional<EpochMs> at = std::nullopt);

// "avg_pm25 is 9.8 ug/m3, on track", "avg_pm25: no data in the last 30 days".
std::string verbalize(const kpi::KpiValue& value);

// Up to two decimals with trailing zeros trimmed: 9.8, 10, 0.33.
std::string format_value(double v);

// Parse + apply in one step, against the titles of the current dashboard.
// A dashboard change aimed at an id that does not exist yet creates an
// empty dashboard of that id first.
struct AgentReply {
  std::optional<AgentCommand> command;
  std::optional<NoMatch> no_match;
  std::optional<CommandResult> result;

  bool ok() const noexcept { return result && result->ok; }
  nlohmann::ordered_json to_json() const;
};

AgentReply run_utterance(std::string_view utterance, dashboard::DashboardStore& dashboards,
                         std::string_view dashboard_id, const ingestion::Store& data,
                         std::optional<EpochMs> at = std::nullopt);

}  // namespace climadash::agent
