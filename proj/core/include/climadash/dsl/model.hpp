// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace climadash::dsl {

// 1-based line and column. {0,0} means "no location" (programmatic nodes).
struct SourceLoc {
  int line = 0;
  int column = 0;

  bool operator==(const SourceLoc&) const = default;
};

enum class FieldKind { kString, kInt, kFloat, kBool, kDatetime, kEnum };

std::string_view to_string(FieldKind kind) noexcept;

struct FieldType {
  FieldKind kind = FieldKind::kString;
  std::vector<std::string> enum_values;  // only for kEnum

  bool is_numeric() const noexcept {
    return kind == FieldKind::kInt || kind == FieldKind::kFloat;
  }
  bool is_categorical() const noexcept {
    return kind == FieldKind::kString || kind == FieldKind::kEnum;
  }
  bool operator==(const FieldType&) const = default;
};

// Equality on AST nodes is structural: source locations are ignored so a
// pretty-printed and re-parsed model compares equal to the original.
struct Field {
  std::string name;
  FieldType type;
  std::optional<std::string> unit;
  bool optional = false;
  SourceLoc loc;

  bool operator==(const Field& o) const {
    return name == o.name && type == o.type && unit == o.unit &&
           optional == o.optional;
  }
};

struct Entity {
  std::string name;
  std::vector<Field> fields;
  SourceLoc loc;

  const Field* find_field(std::string_view field_name) const;
  // Index of the first datetime field, the implicit time axis.
  std::optional<std::size_t> time_axis() const;

  bool operator==(const Entity& o) const {
    return name == o.name && fields == o.fields;
  }
};

struct Datasource {
  std::string name;
  std::string entity;
  SourceLoc loc;

  bool operator==(const Datasource& o) const {
    return name == o.name && entity == o.entity;
  }
};

enum class DurationUnit { kMinute, kHour, kDay, kWeek };

struct Duration {
  std::int64_t magnitude = 1;
  DurationUnit unit = DurationUnit::kDay;

  std::int64_t milliseconds() const noexcept;
  // "30d", "2w".
  std::string to_string() const;
  static std::optional<Duration> parse(std::string_view text);

  bool operator==(const Duration&) const = default;
};

enum class AggFn { kSum, kAvg, kMin, kMax, kFirst, kLast, kCount };
enum class BinOp { kAdd, kSub, kMul, kDiv };

std::string_view to_string(AggFn fn) noexcept;
char to_char(BinOp op) noexcept;

// Expression tree. A binary node owns exactly two operands.
struct Expr {
  enum class Kind { kNumber, kAggregate, kBinary };

  Kind kind = Kind::kNumber;
  double number = 0.0;
  AggFn fn = AggFn::kCount;
  std::string field;  // empty for count()
  BinOp op = BinOp::kAdd;
  std::vector<Expr> operands;
  SourceLoc loc;

  static Expr literal(double value);
  static Expr aggregate(AggFn fn, std::string field = {});
  static Expr binary(BinOp op, Expr lhs, Expr rhs);

  const Expr& lhs() const { return operands.at(0); }
  const Expr& rhs() const { return operands.at(1); }

  bool operator==(const Expr& o) const;
};

enum class Comparator { kLe, kGe, kLt, kGt, kEq };

std::string_view to_string(Comparator cmp) noexcept;

struct Target {
  Comparator cmp = Comparator::kLe;
  double bound = 0.0;

  bool operator==(const Target&) const = default;
};

struct KpiDef {
  std::string name;
  std::string source;
  Expr expr;
  std::optional<Duration> window;
  std::optional<std::string> unit;
  std::optional<Target> target;
  std::optional<double> baseline;
  std::optional<std::string> group_by;
  SourceLoc loc;

  bool operator==(const KpiDef& o) const {
    return name == o.name && source == o.source && expr == o.expr &&
           window == o.window && unit == o.unit && target == o.target &&
           baseline == o.baseline && group_by == o.group_by;
  }
};

struct Model {
  std::vector<Entity> entities;
  std::vector<Datasource> datasources;
  std::vector<KpiDef> kpis;
  // Hex digest of the source text this model was parsed from; empty for
  // models built in code. Not part of structural equality.
  std::string source_hash;

  const Entity* find_entity(std::string_view name) const;
  const Datasource* find_datasource(std::string_view name) const;
  const KpiDef* find_kpi(std::string_view name) const;
  // Entity behind a datasource, or nullptr when either is missing.
  const Entity* entity_of(std::string_view datasource) const;

  bool empty() const noexcept {
    return entities.empty() && datasources.empty() && kpis.empty();
  }

  bool operator==(const Model& o) const {
    return entities == o.entities && datasources == o.datasources &&
           kpis == o.kpis;
  }
};

// 64-bit FNV-1a of the text, as 16 lowercase hex digits.
std::string content_hash(std::string_view text);

bool is_identifier(std::string_view text) noexcept;

}  // namespace climadash::dsl
