// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/agent/commands.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace climadash::agent {

using dashboard::Dashboard;
using dashboard::DashboardPtr;

namespace {

constexpr int kConflictRetries = 3;

bool same_text(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto la = static_cast<char>(std::tolower(static_cast<unsigned char>(a[i])));
    auto lb = static_cast<char>(std::tolower(static_cast<unsigned char>(b[i])));
    if (la != lb) return false;
  }
  return true;
}

const dashboard::Widget& resolve(const Dashboard& d, const std::optional<WidgetRef>& ref) {
  if (!ref) throw Error(ErrorKind::kInvalid, "which widget?");
  if (ref->index) {
    int i = *ref->index;
    if (i < 1 || i > static_cast<int>(d.widgets.size())) {
      throw Error(ErrorKind::kNotFound, "no widget " + std::to_string(i));
    }
    return d.widgets[static_cast<std::size_t>(i - 1)];
  }
  if (ref->title) {
    for (const auto& w : d.widgets) {
      if (same_text(w.config.title, *ref->title)) return w;
    }
    throw Error(ErrorKind::kNotFound, "no widget titled \"" + *ref->title + "\"");
  }
  throw Error(ErrorKind::kInvalid, "which widget?");
}

std::string position(const dashboard::Rect& r) {
  return "(" + std::to_string(r.x) + "," + std::to_string(r.y) + ")";
}

std::string window_phrase(const dsl::Duration& d) {
  std::string_view unit = "day";
  switch (d.unit) {
    case dsl::DurationUnit::kMinute:
      unit = "minute";
      break;
    case dsl::DurationUnit::kHour:
      unit = "hour";
      break;
    case dsl::DurationUnit::kDay:
      unit = "day";
      break;
    case dsl::DurationUnit::kWeek:
      unit = "week";
      break;
  }
  if (d.magnitude == 1) return "the last " + std::string(unit);
  return "the last " + std::to_string(d.magnitude) + " " + std::string(unit) + "s";
}

struct Planned {
  dashboard::Mutation mutation;
  std::string widget_id;  // empty for add
};

Planned plan(const AgentCommand& cmd, const Dashboard& d) {
  switch (cmd.intent) {
    case Intent::kAddWidget: {
      if (!cmd.source) throw Error(ErrorKind::kInvalid, "which source?");
      dashboard::WidgetSpec spec;
      spec.source = *cmd.source;
      spec.kind = cmd.kind;
      spec.title = cmd.title;
      spec.color = cmd.color;
      spec.window_override = cmd.window;
      spec.group_by_override = cmd.group_by;
      if (cmd.w) spec.w = *cmd.w;
      if (cmd.h) spec.h = *cmd.h;
      spec.x = cmd.x;
      spec.y = cmd.y;
      return {dashboard::AddWidget{std::move(spec)}, {}};
    }
    case Intent::kRemoveWidget: {
      const auto& w = resolve(d, cmd.widget_ref);
      return {dashboard::RemoveWidget{w.id}, w.id};
    }
    case Intent::kMove: {
      const auto& w = resolve(d, cmd.widget_ref);
      return {dashboard::MoveWidget{w.id, cmd.x.value_or(w.layout.x), cmd.y.value_or(w.layout.y)},
              w.id};
    }
    case Intent::kResize: {
      const auto& w = resolve(d, cmd.widget_ref);
      return {dashboard::ResizeWidget{w.id, cmd.w.value_or(w.layout.w), cmd.h.value_or(w.layout.h)},
              w.id};
    }
    case Intent::kRetitle: {
      const auto& w = resolve(d, cmd.widget_ref);
      return {dashboard::RetitleWidget{w.id, cmd.title.value_or("")}, w.id};
    }
    case Intent::kRecolor: {
      const auto& w = resolve(d, cmd.widget_ref);
      return {dashboard::RecolorWidget{w.id, cmd.color}, w.id};
    }
    case Intent::kShowValue:
      break;
  }
  throw Error(ErrorKind::kInvalid, "not a dashboard change");
}

std::string confirm(const AgentCommand& cmd, const Dashboard& before, const Dashboard& after,
                    const std::string& widget_id) {
  const auto* w = after.find_widget(widget_id);
  const auto* old = before.find_widget(widget_id);
  switch (cmd.intent) {
    case Intent::kAddWidget:
      return "Added " + std::string(dashboard::to_string(w->kind)) + " widget \"" +
             w->config.title + "\" at " + position(w->layout) + ".";
    case Intent::kRemoveWidget:
      return "Removed widget \"" + old->config.title + "\".";
    case Intent::kMove:
      return "Moved widget \"" + w->config.title + "\" to " + position(w->layout) + ".";
    case Intent::kResize:
      return "Resized widget \"" + w->config.title + "\" to " + std::to_string(w->layout.w) +
             "x" + std::to_string(w->layout.h) + ".";
    case Intent::kRetitle:
      return "Renamed widget \"" + old->config.title + "\" to \"" + w->config.title + "\".";
    case Intent::kRecolor:
      return "Colored widget \"" + w->config.title + "\" " + w->config.color.value_or("default") +
             ".";
    case Intent::kShowValue:
      break;
  }
  return "Done.";
}

std::string plain(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kGeometry:
      return std::string("That does not fit: ") + e.what();
    case ErrorKind::kConflict:
      return "The dashboard kept changing underneath; try again.";
    default:
      return e.what();
  }
}

CommandResult show_value(const AgentCommand& cmd, const ingestion::Store& data,
                         std::optional<EpochMs> at) {
  CommandResult r;
  const dsl::KpiDef* k =
      cmd.source ? data.model().find_kpi(cmd.source->name) : nullptr;
  if (!k || cmd.source->type != dashboard::SourceRef::Type::kKpi) {
    r.error = ErrorKind::kNotFound;
    r.message = "no KPI named '" + (cmd.source ? cmd.source->name : std::string()) + "'";
    return r;
  }
  kpi::EvalOptions opts;
  opts.at = at;
  opts.window_override = cmd.window;
  auto v = kpi::evaluate_kpi(*k, data, opts);
  r.ok = v.status != kpi::Status::kError;
  if (!r.ok) r.error = ErrorKind::kInvalid;
  r.message = verbalize(v);
  r.kpi = std::move(v);
  return r;
}

}  // namespace

std::string format_value(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string verbalize(const kpi::KpiValue& v) {
  switch (v.status) {
    case kpi::Status::kNoData:
      return v.kpi + ": no data" + (v.window ? " in " + window_phrase(*v.window) : "");
    case kpi::Status::kError:
      return v.kpi + " could not be evaluated: " + v.error;
    default:
      break;
  }
  std::string out = v.kpi + " is " + format_value(v.value.value_or(0.0));
  if (v.unit && !v.unit->empty()) out += " " + *v.unit;
  if (v.status == kpi::Status::kOnTrack) out += ", on track";
  if (v.status == kpi::Status::kOffTrack) out += ", off track";
  return out;
}

CommandResult apply_command(const AgentCommand& cmd, dashboard::DashboardStore& dashboards,
                            std::string_view dashboard_id, const ingestion::Store& data,
                            std::optional<EpochMs> at) {
  if (cmd.intent == Intent::kShowValue) {
    auto r = show_value(cmd, data, at);
    if (dashboards.contains(dashboard_id)) r.dashboard = dashboards.get(dashboard_id);
    return r;
  }
  CommandResult r;
  for (int attempt = 0;; ++attempt) {
    DashboardPtr current;
    try {
      current = dashboards.get(dashboard_id);
      auto p = plan(cmd, *current);
      auto next = dashboards.mutate(dashboard_id, current->version, p.mutation);
      if (p.widget_id.empty()) p.widget_id = next->widgets.back().id;
      r.ok = true;
      r.widget_id = p.widget_id;
      r.message = confirm(cmd, *current, *next, p.widget_id);
      r.dashboard = std::move(next);
      return r;
    } catch (const dashboard::ConflictError& e) {
      if (attempt + 1 < kConflictRetries) continue;
      r.error = e.kind();
      r.message = plain(e);
      r.dashboard = e.current();
      return r;
    } catch (const Error& e) {
      r.error = e.kind();
      r.message = plain(e);
      r.dashboard = current;
      return r;
    }
  }
}

nlohmann::ordered_json CommandResult::to_json() const {
  nlohmann::ordered_json j;
  j["ok"] = ok;
  j["message"] = message;
  if (error) j["error"] = climadash::to_string(*error);
  if (widget_id) j["widget_id"] = *widget_id;
  if (kpi) j["kpi"] = kpi->to_json();
  if (dashboard) j["dashboard"] = dashboard::to_json(*dashboard);
  return j;
}

AgentReply run_utterance(std::string_view utterance, dashboard::DashboardStore& dashboards,
                         std::string_view dashboard_id, const ingestion::Store& data,
                         std::optional<EpochMs> at) {
  std::vector<std::string> titles;
  if (dashboards.contains(dashboard_id)) {
    for (const auto& w : dashboards.get(dashboard_id)->widgets) titles.push_back(w.config.title);
  }
  auto ctx = GrammarContext::from_model(dashboards.model(), std::move(titles));
  AgentReply reply;
  auto outcome = parse_utterance(utterance, ctx);
  if (auto* nm = std::get_if<NoMatch>(&outcome)) {
    reply.no_match = std::move(*nm);
    return reply;
  }
  reply.command = std::get<AgentCommand>(outcome);
  if (reply.command->intent != Intent::kShowValue && !dashboards.contains(dashboard_id) &&
      dashboard::is_valid_dashboard_id(dashboard_id)) {
    try {
      dashboards.create(std::string(dashboard_id), {}, std::string(dashboard_id));
    } catch (const Error&) {
      // Lost a creation race; the apply below sees the other one.
    }
  }
  reply.result = apply_command(*reply.command, dashboards, dashboard_id, data, at);
  return reply;
}

nlohmann::ordered_json AgentReply::to_json() const {
  if (no_match) return no_match->to_json();
  nlohmann::ordered_json j;
  j["no_match"] = false;
  if (command) j["command"] = command->to_json();
  if (result) {
    auto body = result->to_json();
    for (auto& [key, value] : body.items()) j[key] = value;
  }
  return j;
}

}  // namespace climadash::agent
