// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/codegen.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "climadash/dashboard/dashboard.hpp"
#include "climadash/dsl/parser.hpp"
#include "climadash/error.hpp"

namespace climadash::codegen {

using dsl::Entity;
using dsl::FieldKind;
using dsl::Model;

namespace {

constexpr std::string_view kSchemaPath = "gen/schema.sql";
constexpr std::string_view kApiPath = "gen/api.json";
constexpr std::string_view kDashboardPath = "gen/dashboard.default.json";
constexpr std::string_view kApiBase = "/api/v1";

void require_valid(const Model& model) {
  auto report = dsl::validate_model(model);
  if (!report.empty()) {
    throw Error(ErrorKind::kInvalid,
                "cannot generate from an invalid model:\n" + report.format());
  }
}

std::string sql_type(const dsl::FieldType& type) {
  switch (type.kind) {
    case FieldKind::kString:
    case FieldKind::kEnum:
      return "TEXT";
    case FieldKind::kInt:
      return "BIGINT";
    case FieldKind::kFloat:
      return "DOUBLE PRECISION";
    case FieldKind::kBool:
      return "BOOLEAN";
    case FieldKind::kDatetime:
      return "TIMESTAMP";
  }
  return "TEXT";
}

std::string column_ddl(const dsl::Field& f) {
  std::string col = f.name + " " + sql_type(f.type);
  if (!f.optional) col += " NOT NULL";
  if (f.type.kind == FieldKind::kEnum) {
    col += " CHECK (" + f.name + " IN (";
    for (std::size_t i = 0; i < f.type.enum_values.size(); ++i) {
      if (i) col += ',';
      col += "'" + f.type.enum_values[i] + "'";
    }
    col += "))";
  }
  return col;
}

nlohmann::ordered_json generator_stamp(const Model& model) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"model_hash", model_hash(model)}};
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

nlohmann::ordered_json field_schema(const dsl::Field& f) {
  nlohmann::ordered_json s;
  switch (f.type.kind) {
    case FieldKind::kString:
      s["type"] = "string";
      break;
    case FieldKind::kInt:
      s["type"] = "integer";
      break;
    case FieldKind::kFloat:
      s["type"] = "number";
      break;
    case FieldKind::kBool:
      s["type"] = "boolean";
      break;
    case FieldKind::kDatetime:
      s["type"] = "string";
      s["format"] = "date-time";
      break;
    case FieldKind::kEnum:
      s["type"] = "string";
      s["enum"] = f.type.enum_values;
      break;
  }
  if (f.unit) s["x-unit"] = *f.unit;
  return s;
}

std::string schema_ref(const std::string& entity) {
  return "#/schemas/" + entity;
}

}  // namespace

std::string_view to_string(ArtifactKind kind) noexcept {
  switch (kind) {
    case ArtifactKind::kSchema:
      return "schema";
    case ArtifactKind::kApi:
      return "api";
    case ArtifactKind::kDashboard:
      return "dashboard";
  }
  return "schema";
}

GenerationSelection GenerationSelection::all() {
  return of({ArtifactKind::kSchema, ArtifactKind::kApi, ArtifactKind::kDashboard});
}

GenerationSelection GenerationSelection::of(
    std::initializer_list<ArtifactKind> kinds) {
  GenerationSelection s;
  for (auto k : kinds) s.bits_ |= bit(k);
  if (s.bits_ == 0) {
    throw Error(ErrorKind::kInvalid, "generation selection must not be empty");
  }
  return s;
}

GenerationSelection GenerationSelection::parse(std::string_view list) {
  GenerationSelection s;
  while (!list.empty()) {
    auto comma = list.find(',');
    auto item = list.substr(0, comma);
    list = comma == std::string_view::npos ? std::string_view{}
                                           : list.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    if (item == "schema") {
      s.bits_ |= bit(ArtifactKind::kSchema);
    } else if (item == "api") {
      s.bits_ |= bit(ArtifactKind::kApi);
    } else if (item == "dashboard") {
      s.bits_ |= bit(ArtifactKind::kDashboard);
    } else {
      throw Error(ErrorKind::kInvalid,
                  "unknown artifact '" + std::string(item) +
                      "' (expected schema, api or dashboard)");
    }
  }
  if (s.bits_ == 0) {
    throw Error(ErrorKind::kInvalid, "generation selection must not be empty");
  }
  return s;
}

std::string model_hash(const Model& model) {
  if (!model.source_hash.empty()) return model.source_hash;
  return dsl::content_hash(dsl::print_model(model));
}

nlohmann::ordered_json entity_schema(const Entity& entity) {
  nlohmann::ordered_json s;
  s["type"] = "object";
  nlohmann::ordered_json props = nlohmann::ordered_json::object();
  auto required = nlohmann::ordered_json::array();
  for (const auto& f : entity.fields) {
    props[f.name] = field_schema(f);
    if (!f.optional) required.push_back(f.name);
  }
  s["properties"] = std::move(props);
  s["required"] = std::move(required);
  s["additionalProperties"] = false;
  if (auto axis = entity.time_axis()) {
    s["x-time-axis"] = entity.fields[*axis].name;
  }
  return s;
}

GeneratedArtifact generate_schema(const Model& model) {
  require_valid(model);
  std::string out = "-- generated by " + std::string(kToolName) + " " +
                    std::string(kToolVersion) + " from model " +
                    model_hash(model) + "; do not edit\n";
  std::set<std::string> tables;
  for (const auto& e : model.entities) {
    if (!tables.insert(e.name).second) {
      throw Error(ErrorKind::kInvalid, "table name collision on '" + e.name + "'");
    }
    out += "\nCREATE TABLE " + e.name + " (";
    for (std::size_t i = 0; i < e.fields.size(); ++i) {
      if (i) out += ", ";
      out += column_ddl(e.fields[i]);
    }
    out += ");\n";
  }
  return {std::string(kSchemaPath), std::move(out), ArtifactKind::kSchema};
}

GeneratedArtifact generate_api_spec(const Model& model) {
  require_valid(model);
  nlohmann::ordered_json doc;
  doc["_generator"] = generator_stamp(model);
  doc["base_path"] = kApiBase;

  nlohmann::ordered_json schemas = nlohmann::ordered_json::object();
  for (const auto& e : model.entities) schemas[e.name] = entity_schema(e);
  doc["schemas"] = std::move(schemas);

  auto routes = nlohmann::ordered_json::array();
  const std::string base(kApiBase);
  for (const auto& d : model.datasources) {
    // Within one datasource, routes are ordered by path: data < ingest.
    routes.push_back({{"method", "GET"},
                      {"path", base + "/data/" + d.name},
                      {"kind", "data"},
                      {"datasource", d.name},
                      {"schema", schema_ref(d.entity)},
                      {"query",
                       {{"from", "epoch-ms, exclusive"},
                        {"to", "epoch-ms, inclusive"},
                        {"limit", "positive integer, keeps most recent"}}}});
    routes.push_back({{"method", "POST"},
                      {"path", base + "/ingest/" + d.name},
                      {"kind", "ingest"},
                      {"datasource", d.name},
                      {"schema", schema_ref(d.entity)}});
  }
  for (const auto& k : model.kpis) {
    const auto* ds = model.find_datasource(k.source);
    routes.push_back({{"method", "GET"},
                      {"path", base + "/kpi/" + k.name},
                      {"kind", "kpi"},
                      {"kpi", k.name},
                      {"datasource", k.source},
                      {"schema", schema_ref(ds->entity)},
                      {"query", {{"at", "epoch-ms, window end"}}}});
  }
  doc["routes"] = std::move(routes);
  return {std::string(kApiPath), dump(doc), ArtifactKind::kApi};
}

GeneratedArtifact generate_dashboard_config(const Model& model) {
  require_valid(model);
  dashboard::Dashboard board;
  board.id = "default";
  board.name = "Default dashboard";
  board.version = 1;

  auto place = [&](dashboard::SourceRef source, dashboard::WidgetKind kind) {
    dashboard::Widget w;
    w.id = board.next_widget_id();
    w.kind = kind;
    w.config.title = source.name;
    w.source = std::move(source);
    auto rects = board.rects();
    auto [x, y] = dashboard::auto_place(rects, dashboard::kDefaultWidgetWidth,
                                        dashboard::kDefaultWidgetHeight);
    w.layout = {x, y, dashboard::kDefaultWidgetWidth,
                dashboard::kDefaultWidgetHeight};
    board.widgets.push_back(std::move(w));
  };
  for (const auto& k : model.kpis) {
    auto ref = dashboard::SourceRef::kpi(k.name);
    auto kind = dashboard::auto_configure(ref, model).kind;
    place(std::move(ref), kind);
  }
  for (const auto& d : model.datasources) {
    place(dashboard::SourceRef::datasource(d.name), dashboard::WidgetKind::kTable);
  }

  nlohmann::ordered_json doc;
  doc["_generator"] = generator_stamp(model);
  auto body = dashboard::to_json(board);
  for (auto& [key, value] : body.items()) doc[key] = value;
  return {std::string(kDashboardPath), dump(doc), ArtifactKind::kDashboard};
}

std::vector<GeneratedArtifact> generate_all(const Model& model,
                                            GenerationSelection selection) {
  std::vector<GeneratedArtifact> out;
  if (selection.contains(ArtifactKind::kSchema)) out.push_back(generate_schema(model));
  if (selection.contains(ArtifactKind::kApi)) out.push_back(generate_api_spec(model));
  if (selection.contains(ArtifactKind::kDashboard)) {
    out.push_back(generate_dashboard_config(model));
  }
  return out;
}

nlohmann::ordered_json Manifest::to_json() const {
  auto files = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    files.push_back({{"path", e.path},
                     {"kind", to_string(e.kind)},
                     {"status", e.status == WriteStatus::kWritten ? "written"
                                                                  : "unchanged"},
                     {"bytes", e.bytes}});
  }
  return {{"files", std::move(files)}};
}

std::string Manifest::to_text() const {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << (e.status == WriteStatus::kWritten ? "written   " : "unchanged ")
        << e.path << " (" << e.bytes << " bytes)\n";
  }
  return out.str();
}

Manifest write_artifacts(std::span<const GeneratedArtifact> artifacts,
                         const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  Manifest manifest;
  for (const auto& a : artifacts) {
    fs::path target = root / a.path;
    ManifestEntry entry{a.path, a.kind, WriteStatus::kWritten, a.content.size()};

    std::error_code ec;
    if (fs::exists(target, ec)) {
      std::ifstream in(target, std::ios::binary);
      if (!in) throw Error(ErrorKind::kIo, "read " + target.string() + ": cannot open");
      std::ostringstream existing;
      existing << in.rdbuf();
      if (existing.str() == a.content) {
        entry.status = WriteStatus::kUnchanged;
        manifest.entries.push_back(std::move(entry));
        continue;
      }
    }
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      throw Error(ErrorKind::kIo, "mkdir " + target.parent_path().string() +
                                      ": " + ec.message());
    }
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "write " + target.string() + ": cannot open");
    out.write(a.content.data(), static_cast<std::streamsize>(a.content.size()));
    out.close();
    if (!out) throw Error(ErrorKind::kIo, "write " + target.string() + ": write failed");
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace climadash::codegen
