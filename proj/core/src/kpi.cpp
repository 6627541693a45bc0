// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/kpi.hpp"

#include <algorithm>
#include <cmath>

#include "climadash/error.hpp"

namespace climadash::kpi {

using dsl::AggFn;
using dsl::Expr;
using ingestion::Record;

namespace {

std::optional<std::size_t> field_index(const dsl::Entity& e, std::string_view name) {
  for (std::size_t i = 0; i < e.fields.size(); ++i) {
    if (e.fields[i].name == name) return i;
  }
  return std::nullopt;
}

bool earlier(const Record& a, const Record& b) {
  return a.t != b.t ? a.t < b.t : a.seq < b.seq;
}

ExprValue aggregate(const Expr& e, std::span<const Record> records,
                    const dsl::Entity& entity) {
  if (e.fn == AggFn::kCount) return ExprValue::of(static_cast<double>(records.size()));

  auto idx = field_index(entity, e.field);
  if (!idx) return ExprValue::failure("unknown field '" + e.field + "'");

  std::size_t n = 0;
  double acc = 0.0;
  const Record* pick = nullptr;
  double picked = 0.0;
  for (const auto& r : records) {
    if (*idx >= r.values.size() || !r.values[*idx]) continue;
    auto v = ingestion::as_number(*r.values[*idx]);
    if (!v) return ExprValue::failure("field '" + e.field + "' is not numeric");
    switch (e.fn) {
      case AggFn::kSum:
      case AggFn::kAvg:
        acc += *v;
        break;
      case AggFn::kMin:
        acc = n == 0 ? *v : std::min(acc, *v);
        break;
      case AggFn::kMax:
        acc = n == 0 ? *v : std::max(acc, *v);
        break;
      case AggFn::kFirst:
        if (!pick || earlier(r, *pick)) {
          pick = &r;
          picked = *v;
        }
        break;
      case AggFn::kLast:
        if (!pick || earlier(*pick, r)) {
          pick = &r;
          picked = *v;
        }
        break;
      case AggFn::kCount:
        break;
    }
    ++n;
  }
  if (n == 0) return ExprValue::no_data();
  if (e.fn == AggFn::kAvg) return ExprValue::of(acc / static_cast<double>(n));
  if (e.fn == AggFn::kFirst || e.fn == AggFn::kLast) return ExprValue::of(picked);
  return ExprValue::of(acc);
}

}  // namespace

ExprValue evaluate_expr(const Expr& expr, std::span<const Record> records,
                        const dsl::Entity& entity) {
  switch (expr.kind) {
    case Expr::Kind::kNumber:
      return ExprValue::of(expr.number);
    case Expr::Kind::kAggregate:
      return aggregate(expr, records, entity);
    case Expr::Kind::kBinary: {
      ExprValue l = evaluate_expr(expr.lhs(), records, entity);
      ExprValue r = evaluate_expr(expr.rhs(), records, entity);
      if (l.state == ExprValue::State::kError) return l;
      if (r.state == ExprValue::State::kError) return r;
      if (!l.has_value() || !r.has_value()) return ExprValue::no_data();
      double out = 0.0;
      switch (expr.op) {
        case dsl::BinOp::kAdd:
          out = l.value + r.value;
          break;
        case dsl::BinOp::kSub:
          out = l.value - r.value;
          break;
        case dsl::BinOp::kMul:
          out = l.value * r.value;
          break;
        case dsl::BinOp::kDiv:
          if (r.value == 0.0) return ExprValue::failure("division by zero");
          out = l.value / r.value;
          break;
      }
      if (!std::isfinite(out)) return ExprValue::failure("result is not finite");
      return ExprValue::of(out);
    }
  }
  return ExprValue::failure("malformed expression");
}

std::string_view to_string(Status status) noexcept {
  switch (status) {
    case Status::kNoData:
      return "no_data";
    case Status::kOk:
      return "ok";
    case Status::kOnTrack:
      return "on_track";
    case Status::kOffTrack:
      return "off_track";
    case Status::kError:
      return "error";
  }
  return "error";
}

Status kpi_status(double value, const std::optional<dsl::Target>& target) noexcept {
  if (!target) return Status::kOk;
  bool holds = false;
  switch (target->cmp) {
    case dsl::Comparator::kLe:
      holds = value <= target->bound;
      break;
    case dsl::Comparator::kGe:
      holds = value >= target->bound;
      break;
    case dsl::Comparator::kLt:
      holds = value < target->bound;
      break;
    case dsl::Comparator::kGt:
      holds = value > target->bound;
      break;
    case dsl::Comparator::kEq:
      holds = value == target->bound;
      break;
  }
  return holds ? Status::kOnTrack : Status::kOffTrack;
}

std::optional<double> progress(double current, double baseline,
                               double target_bound) noexcept {
  if (baseline == target_bound) return std::nullopt;
  double p = (baseline - current) / (baseline - target_bound);
  return std::clamp(p, 0.0, 1.0);
}

namespace {

// Shared by the whole-window value and each group.
void settle(const ExprValue& v, std::size_t records,
            const std::optional<dsl::Target>& target, std::optional<double>& value,
            Status& status, std::string& error) {
  if (records == 0 || v.state == ExprValue::State::kNoData) {
    status = Status::kNoData;
  } else if (v.state == ExprValue::State::kError) {
    status = Status::kError;
    error = v.error;
  } else {
    value = v.value;
    status = kpi_status(v.value, target);
  }
}

}  // namespace

KpiValue evaluate_kpi(const dsl::KpiDef& k, const ingestion::Store& store,
                      const EvalOptions& options) {
  KpiValue out;
  out.kpi = k.name;
  out.unit = k.unit;
  out.target = k.target;
  out.window = options.window_override ? options.window_override : k.window;
  out.window_end = options.at ? *options.at : wall_clock_ms();
  out.group_by = options.group_by_override ? options.group_by_override : k.group_by;

  const dsl::Entity* entity = store.model().entity_of(k.source);
  if (!entity || !store.has_datasource(k.source)) {
    out.status = Status::kError;
    out.error = "datasource '" + k.source + "' is not available";
    return out;
  }

  ingestion::QueryRange range;
  range.to = out.window_end;
  if (out.window) range.from = out.window_end - out.window->milliseconds();
  std::vector<Record> records = store.query(k.source, range);
  out.records = records.size();

  settle(evaluate_expr(k.expr, records, *entity), records.size(), k.target,
         out.value, out.status, out.error);
  if (out.value && k.baseline && k.target) {
    out.progress = progress(*out.value, *k.baseline, k.target->bound);
  }

  if (out.group_by) {
    auto idx = field_index(*entity, *out.group_by);
    if (!idx || !entity->fields[*idx].type.is_categorical()) {
      out.status = Status::kError;
      out.error = "cannot group by '" + *out.group_by + "'";
      out.value.reset();
      return out;
    }
    std::map<std::string, std::vector<Record>> partitions;
    for (auto& r : records) {
      std::string key;
      if (*idx < r.values.size() && r.values[*idx]) {
        if (auto text = ingestion::as_text(*r.values[*idx])) key = *text;
      }
      partitions[key].push_back(std::move(r));
    }
    for (const auto& [key, part] : partitions) {
      GroupValue g;
      g.records = part.size();
      settle(evaluate_expr(k.expr, part, *entity), part.size(), k.target,
             g.value, g.status, g.error);
      out.groups.emplace(key, std::move(g));
    }
  }
  return out;
}

nlohmann::ordered_json KpiValue::to_json() const {
  nlohmann::ordered_json j;
  j["kpi"] = kpi;
  j["value"] = value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json();
  j["unit"] = unit ? nlohmann::ordered_json(*unit) : nlohmann::ordered_json();
  j["status"] = to_string(status);
  j["window"] = window ? nlohmann::ordered_json(window->to_string())
                       : nlohmann::ordered_json();
  j["window_end"] = window_end;
  j["window_end_iso"] = format_rfc3339(window_end);
  j["records"] = records;
  if (target) {
    j["target"] = {{"cmp", dsl::to_string(target->cmp)}, {"bound", target->bound}};
  }
  if (progress) j["progress"] = *progress;
  if (!error.empty()) j["error"] = error;
  if (group_by) {
    j["group_by"] = *group_by;
    nlohmann::ordered_json gj = nlohmann::ordered_json::object();
    for (const auto& [key, g] : groups) {
      nlohmann::ordered_json one;
      one["value"] = g.value ? nlohmann::ordered_json(*g.value) : nlohmann::ordered_json();
      one["status"] = to_string(g.status);
      one["records"] = g.records;
      if (!g.error.empty()) one["error"] = g.error;
      gj[key] = std::move(one);
    }
    j["groups"] = std::move(gj);
  }
  return j;
}

}  // namespace climadash::kpi
