// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "climadash/dsl/model.hpp"

namespace climadash::dsl {

enum class Severity { kError, kWarning };

// Diagnostic codes are stable identifiers; tools and tests match on them.
namespace codes {
inline constexpr std::string_view kLex = "E-LEX";
inline constexpr std::string_view kSyntax = "E-SYNTAX";
inline constexpr std::string_view kKpiMissing = "E-KPI-MISSING";
inline constexpr std::string_view kIdent = "E-IDENT";
inline constexpr std::string_view kDup = "E-DUP";
inline constexpr std::string_view kEntityEmpty = "E-ENTITY-EMPTY";
inline constexpr std::string_view kEnum = "E-ENUM";
inline constexpr std::string_view kDsEntity = "E-DS-ENTITY";
inline constexpr std::string_view kKpiSource = "E-KPI-SOURCE";
inline constexpr std::string_view kExprField = "E-EXPR-FIELD";
inline constexpr std::string_view kExprType = "E-EXPR-TYPE";
inline constexpr std::string_view kKpiTime = "E-KPI-TIME";
inline constexpr std::string_view kKpiGroup = "E-KPI-GROUP";
}  // namespace codes

struct Diagnostic {
  std::string code;
  Severity severity = Severity::kError;
  SourceLoc loc;
  std::string message;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool empty() const noexcept { return diagnostics.empty(); }
  std::size_t error_count() const noexcept;
  bool contains(std::string_view code) const noexcept;
  // "file:3:14: error E-KPI-SOURCE: ..." one line per diagnostic.
  std::string format(std::string_view file_name = {}) const;
};

struct ParseResult {
  std::optional<Model> model;
  ValidationReport report;

  bool ok() const noexcept { return model.has_value(); }
};

// Parses DSL source text. Never throws on malformed input: lexical and
// syntax problems come back as diagnostics with line/column positions.
ParseResult parse_model(std::string_view text);

// Semantic checks over a parsed model. Reports every violation found.
ValidationReport validate_model(const Model& model);

// parse_model followed by validate_model; `model` is set only when both pass.
ParseResult load_model(std::string_view text);

// Reads and loads a `.cbm` file. Throws climadash::Error(kIo) when the file
// cannot be read.
ParseResult load_model_file(const std::filesystem::path& path);

// Canonical source text; parse_model(print_model(m)) == m for valid models.
std::string print_model(const Model& model);
std::string print_expr(const Expr& expr);
// Shortest text that reads back to the same double.
std::string format_number(double value);

}  // namespace climadash::dsl
