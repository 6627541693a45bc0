// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "climadash/dsl/model.hpp"

namespace climadash::codegen {

inline constexpr std::string_view kToolName = "climadash";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ArtifactKind { kSchema, kApi, kDashboard };

std::string_view to_string(ArtifactKind kind) noexcept;

struct GeneratedArtifact {
  std::string path;  // relative, e.g. "gen/schema.sql"
  std::string content;
  ArtifactKind kind = ArtifactKind::kSchema;
};

// Non-empty subset of artifact kinds.
class GenerationSelection {
 public:
  static GenerationSelection all();
  // Comma-separated list of "schema", "api", "dashboard". Throws
  // climadash::Error(kInvalid) on unknown names or an empty list.
  static GenerationSelection parse(std::string_view list);
  static GenerationSelection of(std::initializer_list<ArtifactKind> kinds);

  bool contains(ArtifactKind kind) const noexcept {
    return (bits_ & bit(kind)) != 0;
  }

 private:
  static unsigned bit(ArtifactKind kind) noexcept {
    return 1u << static_cast<unsigned>(kind);
  }
  unsigned bits_ = 0;
};

// Every generator requires a model that passes dsl::validate_model and throws
// climadash::Error(kInvalid) otherwise. Output is byte-deterministic.

// One CREATE TABLE per entity, columns in field order.
GeneratedArtifact generate_schema(const dsl::Model& model);
// REST route listing with JSON-Schema field descriptions.
GeneratedArtifact generate_api_spec(const dsl::Model& model);
// Default dashboard: a widget per KPI, then a table per datasource.
GeneratedArtifact generate_dashboard_config(const dsl::Model& model);

std::vector<GeneratedArtifact> generate_all(const dsl::Model& model,
                                            GenerationSelection selection);

// JSON-Schema-style description of one entity, shared with the runtime.
nlohmann::ordered_json entity_schema(const dsl::Entity& entity);

// Hash recorded in generated headers: the parsed source text hash when known,
// otherwise a hash of the canonical printed model.
std::string model_hash(const dsl::Model& model);

enum class WriteStatus { kWritten, kUnchanged };

struct ManifestEntry {
  std::string path;
  ArtifactKind kind = ArtifactKind::kSchema;
  WriteStatus status = WriteStatus::kWritten;
  std::size_t bytes = 0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

// Writes artifacts below `root`. Files whose bytes already match are left
// alone and reported unchanged. Throws climadash::Error(kIo) naming the path
// and the failed operation.
Manifest write_artifacts(std::span<const GeneratedArtifact> artifacts,
                         const std::filesystem::path& root);

}  // namespace climadash::codegen
