// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/dsl/model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>

namespace climadash::dsl {

std::string_view to_string(FieldKind kind) noexcept {
  switch (kind) {
    case FieldKind::kString:
      return "string";
    case FieldKind::kInt:
      return "int";
    case FieldKind::kFloat:
      return "float";
    case FieldKind::kBool:
      return "bool";
    case FieldKind::kDatetime:
      return "datetime";
    case FieldKind::kEnum:
      return "enum";
  }
  return "string";
}

std::string_view to_string(AggFn fn) noexcept {
  switch (fn) {
    case AggFn::kSum:
      return "sum";
    case AggFn::kAvg:
      return "avg";
    case AggFn::kMin:
      return "min";
    case AggFn::kMax:
      return "max";
    case AggFn::kFirst:
      return "first";
    case AggFn::kLast:
      return "last";
    case AggFn::kCount:
      return "count";
  }
  return "count";
}

char to_char(BinOp op) noexcept {
  switch (op) {
    case BinOp::kAdd:
      return '+';
    case BinOp::kSub:
      return '-';
    case BinOp::kMul:
      return '*';
    case BinOp::kDiv:
      return '/';
  }
  return '+';
}

std::string_view to_string(Comparator cmp) noexcept {
  switch (cmp) {
    case Comparator::kLe:
      return "<=";
    case Comparator::kGe:
      return ">=";
    case Comparator::kLt:
      return "<";
    case Comparator::kGt:
      return ">";
    case Comparator::kEq:
      return "==";
  }
  return "<=";
}

const Field* Entity::find_field(std::string_view field_name) const {
  auto it = std::find_if(fields.begin(), fields.end(),
                         [&](const Field& f) { return f.name == field_name; });
  return it == fields.end() ? nullptr : &*it;
}

std::optional<std::size_t> Entity::time_axis() const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].type.kind == FieldKind::kDatetime) return i;
  }
  return std::nullopt;
}

namespace {

constexpr std::int64_t unit_ms(DurationUnit unit) {
  switch (unit) {
    case DurationUnit::kMinute:
      return 60'000LL;
    case DurationUnit::kHour:
      return 3'600'000LL;
    case DurationUnit::kDay:
      return 86'400'000LL;
    case DurationUnit::kWeek:
      return 7 * 86'400'000LL;
  }
  return 86'400'000LL;
}

// Largest magnitude accepted for any unit; keeps every window comfortably
// inside int64 milliseconds when subtracted from a timestamp.
constexpr std::int64_t kMaxDurationMagnitude = 1'000'000;

}  // namespace

std::int64_t Duration::milliseconds() const noexcept {
  return magnitude * unit_ms(unit);
}

std::string Duration::to_string() const {
  char suffix = 'd';
  switch (unit) {
    case DurationUnit::kMinute:
      suffix = 'm';
      break;
    case DurationUnit::kHour:
      suffix = 'h';
      break;
    case DurationUnit::kDay:
      suffix = 'd';
      break;
    case DurationUnit::kWeek:
      suffix = 'w';
      break;
  }
  return std::to_string(magnitude) + suffix;
}

std::optional<Duration> Duration::parse(std::string_view text) {
  if (text.size() < 2) return std::nullopt;
  Duration d;
  switch (text.back()) {
    case 'm':
      d.unit = DurationUnit::kMinute;
      break;
    case 'h':
      d.unit = DurationUnit::kHour;
      break;
    case 'd':
      d.unit = DurationUnit::kDay;
      break;
    case 'w':
      d.unit = DurationUnit::kWeek;
      break;
    default:
      return std::nullopt;
  }
  auto digits = text.substr(0, text.size() - 1);
  if (digits.empty() || digits.size() > 9) return std::nullopt;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  std::int64_t value = 0;
  std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (value < 1 || value > kMaxDurationMagnitude) return std::nullopt;
  d.magnitude = value;
  return d;
}

Expr Expr::literal(double value) {
  Expr e;
  e.kind = Kind::kNumber;
  e.number = value;
  return e;
}

Expr Expr::aggregate(AggFn fn, std::string field) {
  Expr e;
  e.kind = Kind::kAggregate;
  e.fn = fn;
  e.field = std::move(field);
  return e;
}

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::kBinary;
  e.op = op;
  e.operands.reserve(2);
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::kNumber:
      return number == o.number;
    case Kind::kAggregate:
      return fn == o.fn && field == o.field;
    case Kind::kBinary:
      return op == o.op && operands == o.operands;
  }
  return false;
}

const Entity* Model::find_entity(std::string_view name) const {
  for (const auto& e : entities) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const Datasource* Model::find_datasource(std::string_view name) const {
  for (const auto& d : datasources) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const KpiDef* Model::find_kpi(std::string_view name) const {
  for (const auto& k : kpis) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

const Entity* Model::entity_of(std::string_view datasource) const {
  const Datasource* ds = find_datasource(datasource);
  return ds ? find_entity(ds->entity) : nullptr;
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_identifier(std::string_view text) noexcept {
  if (text.empty() || text[0] < 'a' || text[0] > 'z') return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

}  // namespace climadash::dsl
