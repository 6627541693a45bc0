// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/ingestion/record.hpp"

#include <cmath>
#include <limits>

namespace climadash::ingestion {

using dsl::FieldKind;

std::optional<double> as_number(const Value& v) noexcept {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

std::optional<std::string_view> as_text(const Value& v) noexcept {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* e = std::get_if<EnumSymbol>(&v)) return e->symbol;
  return std::nullopt;
}

std::string_view to_string(Reason reason) noexcept {
  switch (reason) {
    case Reason::kMissing:
      return "missing";
    case Reason::kUnknownField:
      return "unknown-field";
    case Reason::kTypeMismatch:
      return "type-mismatch";
    case Reason::kBadDatetime:
      return "bad-datetime";
    case Reason::kBadEnum:
      return "bad-enum";
  }
  return "type-mismatch";
}

const Value* Record::get(const dsl::Entity& entity, std::string_view field) const {
  for (std::size_t i = 0; i < entity.fields.size() && i < values.size(); ++i) {
    if (entity.fields[i].name == field) return values[i] ? &*values[i] : nullptr;
  }
  return nullptr;
}

namespace {

std::string json_type_name(const nlohmann::json& v) {
  return std::string(v.type_name());
}

// Converts a JSON value to the field's kind, or records why it cannot.
std::optional<Value> coerce(const dsl::Field& f, const nlohmann::json& v,
                            std::vector<FieldError>& errors) {
  auto mismatch = [&](std::string_view wanted) -> std::optional<Value> {
    errors.push_back({f.name, Reason::kTypeMismatch,
                      "expected " + std::string(wanted) + ", got " +
                          json_type_name(v)});
    return std::nullopt;
  };
  switch (f.type.kind) {
    case FieldKind::kString:
      if (!v.is_string()) return mismatch("string");
      return Value{v.get<std::string>()};
    case FieldKind::kInt: {
      if (v.is_number_integer()) {
        if (v.is_number_unsigned() &&
            v.get<std::uint64_t>() >
                static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
          return mismatch("int64 integer");
        }
        return Value{v.get<std::int64_t>()};
      }
      if (v.is_number_float()) {
        double d = v.get<double>();
        // 2^63 is the first double outside int64.
        if (std::isfinite(d) && std::trunc(d) == d && d >= -9223372036854775808.0 &&
            d < 9223372036854775808.0) {
          return Value{static_cast<std::int64_t>(d)};
        }
        return mismatch("integral number");
      }
      return mismatch("integer");
    }
    case FieldKind::kFloat:
      if (!v.is_number()) return mismatch("number");
      return Value{v.get<double>()};
    case FieldKind::kBool:
      if (!v.is_boolean()) return mismatch("boolean");
      return Value{v.get<bool>()};
    case FieldKind::kDatetime: {
      if (!v.is_string()) return mismatch("RFC 3339 date-time string");
      const auto& text = v.get_ref<const std::string&>();
      auto ms = parse_rfc3339(text);
      if (!ms) {
        errors.push_back({f.name, Reason::kBadDatetime,
                          "'" + text + "' is not an RFC 3339 date-time"});
        return std::nullopt;
      }
      return Value{Timestamp{*ms}};
    }
    case FieldKind::kEnum: {
      if (!v.is_string()) return mismatch("enum symbol string");
      const auto& text = v.get_ref<const std::string&>();
      for (const auto& allowed : f.type.enum_values) {
        if (allowed == text) return Value{EnumSymbol{text}};
      }
      errors.push_back({f.name, Reason::kBadEnum,
                        "'" + text + "' is not one of the declared values"});
      return std::nullopt;
    }
  }
  return mismatch("value");
}

}  // namespace

RecordCheck validate_record(const dsl::Entity& entity, const nlohmann::json& raw) {
  RecordCheck out;
  if (!raw.is_object()) {
    out.errors.push_back({"", Reason::kTypeMismatch,
                          "record must be a JSON object, got " +
                              json_type_name(raw)});
    return out;
  }
  Record rec;
  rec.values.resize(entity.fields.size());
  for (std::size_t i = 0; i < entity.fields.size(); ++i) {
    const auto& f = entity.fields[i];
    auto it = raw.find(f.name);
    if (it == raw.end() || it->is_null()) {
      if (!f.optional) {
        out.errors.push_back({f.name, Reason::kMissing,
                              "required field '" + f.name + "' is missing"});
      }
      continue;
    }
    rec.values[i] = coerce(f, *it, out.errors);
  }
  for (const auto& [key, value] : raw.items()) {
    if (!entity.find_field(key)) {
      out.errors.push_back({key, Reason::kUnknownField,
                            "entity '" + entity.name + "' has no field '" +
                                key + "'"});
    }
  }
  if (!out.errors.empty()) return out;

  if (auto axis = entity.time_axis()) {
    if (const auto& v = rec.values[*axis]) rec.t = std::get<Timestamp>(*v).ms;
  }
  out.record = std::move(rec);
  return out;
}

nlohmann::ordered_json record_to_json(const dsl::Entity& entity,
                                      const Record& record) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < entity.fields.size() && i < record.values.size();
       ++i) {
    const auto& v = record.values[i];
    if (!v) continue;
    const auto& name = entity.fields[i].name;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Timestamp>) {
            j[name] = format_rfc3339(x.ms);
          } else if constexpr (std::is_same_v<T, EnumSymbol>) {
            j[name] = x.symbol;
          } else {
            j[name] = x;
          }
        },
        *v);
  }
  return j;
}

}  // namespace climadash::ingestion
