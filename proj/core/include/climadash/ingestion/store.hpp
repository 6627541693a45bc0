// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "climadash/dsl/model.hpp"
#include "climadash/ingestion/record.hpp"

namespace climadash::ingestion {

struct Rejection {
  // 0-based record index for JSON batches, 1-based line number for CSV.
  std::size_t ordinal = 0;
  FieldError error;  // first problem found in the record
};

struct IngestResult {
  std::size_t accepted = 0;
  std::vector<Rejection> rejected;

  std::size_t submitted() const noexcept { return accepted + rejected.size(); }
  nlohmann::ordered_json to_json() const;
};

struct QueryRange {
  std::optional<EpochMs> from;  // exclusive
  std::optional<EpochMs> to;    // inclusive
  std::optional<std::size_t> limit;  // keeps the most recent records
};

struct ReplayStats {
  std::size_t records = 0;
  std::size_t skipped_lines = 0;  // unparsable or invalid journal lines
};

// In-memory record store with an optional JSON Lines journal per datasource
// (`<dir>/<datasource>.jsonl`). Records are kept ordered by time-axis value,
// arrival order breaking ties. Each datasource has its own reader/writer
// lock: a batch becomes visible all at once, and writers to different
// datasources never contend.
class Store {
 public:
  explicit Store(std::shared_ptr<const dsl::Model> model);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // Replays existing journals in `dir`, then journals every later append.
  // Must be called before the first ingest. Throws Error(kIo) when the
  // directory or a journal cannot be opened.
  ReplayStats open_journal(const std::filesystem::path& dir);

  // Validates each record; valid ones are journaled, then appended.
  // Throws Error(kNotFound) for an unknown datasource (nothing stored).
  IngestResult ingest_batch(std::string_view datasource,
                            std::span<const nlohmann::json> records);

  // CSV with a header row naming entity fields in any order. Throws
  // Error(kNotFound) for an unknown datasource and Error(kInvalid) for a
  // missing header, a header naming an unknown field, or malformed CSV.
  IngestResult ingest_csv(std::string_view datasource, std::string_view csv);

  // Records with from < t <= to, ascending. Entities without a datetime field
  // ignore the range and come back in arrival order. Throws Error(kNotFound)
  // for an unknown datasource and Error(kInvalid) when from > to.
  std::vector<Record> query(std::string_view datasource,
                            const QueryRange& range = {}) const;

  std::size_t size(std::string_view datasource) const;
  bool has_datasource(std::string_view datasource) const;
  const dsl::Model& model() const noexcept { return *model_; }
  std::shared_ptr<const dsl::Model> model_ptr() const noexcept { return model_; }

 private:
  struct Series {
    std::string name;
    const dsl::Entity* entity = nullptr;
    mutable std::shared_mutex mutex;
    std::vector<Record> records;
    std::uint64_t next_seq = 0;
    std::ofstream journal;
  };

  Series& series(std::string_view datasource);
  const Series& series(std::string_view datasource) const;
  static void insert_sorted(Series& s, Record rec);

  std::shared_ptr<const dsl::Model> model_;
  std::map<std::string, std::unique_ptr<Series>, std::less<>> series_;
};

}  // namespace climadash::ingestion
