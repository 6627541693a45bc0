// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "climadash/dsl/model.hpp"
#include "climadash/timeutil.hpp"

namespace climadash::ingestion {

struct Timestamp {
  EpochMs ms = 0;
  bool operator==(const Timestamp&) const = default;
};

struct EnumSymbol {
  std::string symbol;
  bool operator==(const EnumSymbol&) const = default;
};

using Value =
    std::variant<std::string, std::int64_t, double, bool, Timestamp, EnumSymbol>;

// Numeric view of int and float values; nullopt for everything else.
std::optional<double> as_number(const Value& v) noexcept;
// Text view of string and enum values; nullopt for everything else.
std::optional<std::string_view> as_text(const Value& v) noexcept;

// One validated data point. `values` is aligned with the entity's field list;
// absent optional fields are nullopt.
struct Record {
  std::string datasource;
  std::vector<std::optional<Value>> values;
  EpochMs t = 0;           // time-axis value, 0 when the entity has none
  std::uint64_t seq = 0;   // arrival ordinal within the datasource

  const Value* get(const dsl::Entity& entity, std::string_view field) const;

  bool operator==(const Record&) const = default;
};

enum class Reason { kMissing, kUnknownField, kTypeMismatch, kBadDatetime, kBadEnum };

std::string_view to_string(Reason reason) noexcept;

struct FieldError {
  std::string field;
  Reason reason = Reason::kTypeMismatch;
  std::string message;
};

struct RecordCheck {
  std::optional<Record> record;
  std::vector<FieldError> errors;  // empty iff record is set
};

// Validates one raw JSON object against an entity.
//  - JSON numbers become int only when integral; any number is a valid float
//  - datetime accepts RFC 3339 text only and is normalized to epoch-ms UTC
//  - no other coercion: "8.0" is not a number
// Never throws, whatever the input shape.
RecordCheck validate_record(const dsl::Entity& entity, const nlohmann::json& raw);

// Raw JSON form of a record (datetime as canonical RFC 3339 text, enum as its
// symbol). Feeding it back to validate_record reproduces the record.
nlohmann::ordered_json record_to_json(const dsl::Entity& entity,
                                      const Record& record);

}  // namespace climadash::ingestion
