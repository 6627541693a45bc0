// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/dashboard/widget_data.hpp"

#include <map>

#include "climadash/error.hpp"
#include "climadash/kpi.hpp"

namespace climadash::dashboard {

namespace {

using nlohmann::ordered_json;

constexpr std::int64_t kDayMs = 86'400'000LL;

ordered_json envelope(const Widget& w) {
  ordered_json j;
  j["widget"] = w.id;
  j["kind"] = to_string(w.kind);
  j["source"] = w.source.to_string();
  j["status"] = "ok";
  return j;
}

std::optional<double> number_at(const ingestion::Record& r, const dsl::Entity& e,
                                const std::optional<std::string>& field) {
  if (!field) return std::nullopt;
  const auto* v = r.get(e, *field);
  return v ? ingestion::as_number(*v) : std::nullopt;
}

ingestion::QueryRange window_range(const Widget& w, EpochMs at) {
  ingestion::QueryRange range;
  range.to = at;
  if (w.config.window_override) {
    range.from = at - w.config.window_override->milliseconds();
  }
  return range;
}

void datasource_payload(const Widget& w, const ingestion::Store& store, EpochMs at,
                        ordered_json& out) {
  const auto& model = store.model();
  const dsl::Entity& e = *model.entity_of(w.source.name);
  Bindings b = default_bindings(w.source, w.kind, model);
  auto range = window_range(w, at);

  switch (w.kind) {
    case WidgetKind::kLine: {
      range.limit = kLinePointLimit;
      auto records = store.query(w.source.name, range);
      auto points = ordered_json::array();
      for (const auto& r : records) {
        if (auto v = number_at(r, e, b.value_field)) {
          points.push_back({{"t", r.t}, {"value", *v}});
        }
      }
      out["x"] = b.time_field ? ordered_json(*b.time_field) : ordered_json("arrival");
      out["y"] = b.value_field ? ordered_json(*b.value_field) : ordered_json();
      if (points.empty()) out["status"] = "no_data";
      out["points"] = std::move(points);
      return;
    }
    case WidgetKind::kBar: {
      auto records = store.query(w.source.name, range);
      std::map<std::string, std::pair<double, std::size_t>> sums;
      for (const auto& r : records) {
        auto v = number_at(r, e, b.value_field);
        const auto* c = b.category_field ? r.get(e, *b.category_field) : nullptr;
        auto cat = c ? ingestion::as_text(*c) : std::nullopt;
        if (!v || !cat) continue;
        auto& [sum, n] = sums[std::string(*cat)];
        sum += *v;
        ++n;
      }
      auto bars = ordered_json::array();
      for (const auto& [cat, agg] : sums) {
        bars.push_back({{"category", cat},
                        {"value", agg.first / static_cast<double>(agg.second)},
                        {"records", agg.second}});
      }
      out["category"] = b.category_field ? ordered_json(*b.category_field) : ordered_json();
      out["y"] = b.value_field ? ordered_json(*b.value_field) : ordered_json();
      out["aggregate"] = "avg";
      if (bars.empty()) out["status"] = "no_data";
      out["bars"] = std::move(bars);
      return;
    }
    case WidgetKind::kGauge:
    case WidgetKind::kStat: {
      auto records = store.query(w.source.name, range);
      std::optional<double> latest;
      EpochMs t = 0;
      for (auto it = records.rbegin(); it != records.rend() && !latest; ++it) {
        latest = number_at(*it, e, b.value_field);
        t = it->t;
      }
      out["field"] = b.value_field ? ordered_json(*b.value_field) : ordered_json();
      if (latest) {
        out["value"] = *latest;
        out["t"] = t;
      } else {
        out["value"] = nullptr;
        out["status"] = "no_data";
      }
      return;
    }
    case WidgetKind::kTable: {
      range.limit = kTableRowLimit;
      auto records = store.query(w.source.name, range);
      auto rows = ordered_json::array();
      for (const auto& r : records) {
        auto row = ingestion::record_to_json(e, r);
        if (e.time_axis()) row["_t"] = r.t;
        rows.push_back(std::move(row));
      }
      auto columns = ordered_json::array();
      for (const auto& f : e.fields) columns.push_back(f.name);
      out["columns"] = std::move(columns);
      out["rows"] = std::move(rows);
      return;
    }
  }
}

void kpi_payload(const Widget& w, const ingestion::Store& store, EpochMs at,
                 ordered_json& out) {
  const dsl::KpiDef& k = *store.model().find_kpi(w.source.name);
  kpi::EvalOptions opts;
  opts.at = at;
  opts.window_override = w.config.window_override;
  opts.group_by_override = w.config.group_by_override;

  switch (w.kind) {
    case WidgetKind::kLine: {
      auto window = opts.window_override ? opts.window_override : k.window;
      std::int64_t step = window ? window->milliseconds() : kDayMs;
      auto points = ordered_json::array();
      bool any = false;
      for (int i = kKpiSeriesPoints - 1; i >= 0; --i) {
        kpi::EvalOptions p = opts;
        p.at = at - step * i;
        // Grouping does not apply to a single series.
        p.group_by_override.reset();
        auto v = kpi::evaluate_kpi(k, store, p);
        points.push_back({{"t", *p.at},
                          {"value", v.value ? ordered_json(*v.value) : ordered_json()},
                          {"status", kpi::to_string(v.status)}});
        any = any || v.value.has_value();
      }
      out["x"] = "window_end";
      out["y"] = k.name;
      out["step_ms"] = step;
      if (!any) out["status"] = "no_data";
      out["points"] = std::move(points);
      return;
    }
    case WidgetKind::kGauge:
    case WidgetKind::kStat: {
      auto v = kpi::evaluate_kpi(k, store, opts);
      out["status"] = kpi::to_string(v.status);
      out["kpi"] = v.to_json();
      return;
    }
    case WidgetKind::kBar:
    case WidgetKind::kTable: {
      auto v = kpi::evaluate_kpi(k, store, opts);
      auto rows = ordered_json::array();
      if (v.group_by) {
        for (const auto& [key, g] : v.groups) {
          rows.push_back({{"group", key},
                          {"value", g.value ? ordered_json(*g.value) : ordered_json()},
                          {"status", kpi::to_string(g.status)}});
        }
      } else {
        rows.push_back({{"group", k.name},
                        {"value", v.value ? ordered_json(*v.value) : ordered_json()},
                        {"status", kpi::to_string(v.status)}});
      }
      out["status"] = kpi::to_string(v.status);
      out["kpi"] = v.to_json();
      out[w.kind == WidgetKind::kBar ? "bars" : "rows"] = std::move(rows);
      return;
    }
  }
}

}  // namespace

nlohmann::ordered_json widget_data(const Widget& widget, const ingestion::Store& store,
                                   std::optional<EpochMs> at) {
  ordered_json out = envelope(widget);
  EpochMs end = at ? *at : wall_clock_ms();
  out["at"] = end;
  try {
    if (!widget.source.resolves(store.model())) {
      throw Error(ErrorKind::kNotFound,
                  "source '" + widget.source.to_string() + "' does not resolve");
    }
    if (widget.source.type == SourceRef::Type::kKpi) {
      kpi_payload(widget, store, end, out);
    } else {
      datasource_payload(widget, store, end, out);
    }
  } catch (const std::exception& e) {
    out["status"] = "error";
    out["error"] = e.what();
  }
  return out;
}

}  // namespace climadash::dashboard
