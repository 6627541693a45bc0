// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/ingestion/store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "climadash/error.hpp"
#include "climadash/ingestion/csv.hpp"

namespace climadash::ingestion {

nlohmann::ordered_json IngestResult::to_json() const {
  auto rejected_json = nlohmann::ordered_json::array();
  for (const auto& r : rejected) {
    rejected_json.push_back({{"ordinal", r.ordinal},
                             {"field", r.error.field},
                             {"reason", to_string(r.error.reason)},
                             {"message", r.error.message}});
  }
  return {{"accepted", accepted},
          {"rejected_count", rejected.size()},
          {"rejected", std::move(rejected_json)}};
}

Store::Store(std::shared_ptr<const dsl::Model> model) : model_(std::move(model)) {
  for (const auto& ds : model_->datasources) {
    auto s = std::make_unique<Series>();
    s->name = ds.name;
    s->entity = model_->find_entity(ds.entity);
    series_.emplace(ds.name, std::move(s));
  }
}

Store::~Store() = default;

Store::Series& Store::series(std::string_view datasource) {
  auto it = series_.find(datasource);
  if (it == series_.end() || !it->second->entity) {
    throw Error(ErrorKind::kNotFound,
                "unknown datasource '" + std::string(datasource) + "'");
  }
  return *it->second;
}

const Store::Series& Store::series(std::string_view datasource) const {
  return const_cast<Store*>(this)->series(datasource);
}

bool Store::has_datasource(std::string_view datasource) const {
  auto it = series_.find(datasource);
  return it != series_.end() && it->second->entity;
}

void Store::insert_sorted(Series& s, Record rec) {
  rec.seq = s.next_seq++;
  if (!s.entity->time_axis() || s.records.empty() || s.records.back().t <= rec.t) {
    s.records.push_back(std::move(rec));
    return;
  }
  auto pos = std::upper_bound(
      s.records.begin(), s.records.end(), rec.t,
      [](EpochMs t, const Record& r) { return t < r.t; });
  s.records.insert(pos, std::move(rec));
}

ReplayStats Store::open_journal(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "mkdir " + dir.string() + ": " + ec.message());

  ReplayStats stats;
  for (auto& [name, s] : series_) {
    if (!s->entity) continue;
    std::unique_lock lock(s->mutex);
    fs::path path = dir / (name + ".jsonl");
    if (fs::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error(ErrorKind::kIo, "read " + path.string() + ": cannot open");
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        // A torn final line from a crash simply fails to parse and is skipped.
        auto raw = nlohmann::json::parse(line, nullptr, false);
        if (raw.is_discarded() || !raw.is_object()) {
          ++stats.skipped_lines;
          continue;
        }
        raw.erase("_t");
        auto check = validate_record(*s->entity, raw);
        if (!check.record) {
          ++stats.skipped_lines;
          continue;
        }
        check.record->datasource = name;
        insert_sorted(*s, std::move(*check.record));
        ++stats.records;
      }
    }
    s->journal.open(path, std::ios::binary | std::ios::app);
    if (!s->journal) {
      throw Error(ErrorKind::kIo, "open " + path.string() + " for append failed");
    }
  }
  return stats;
}

IngestResult Store::ingest_batch(std::string_view datasource,
                                 std::span<const nlohmann::json> records) {
  Series& s = series(datasource);
  IngestResult result;
  std::vector<Record> valid;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto check = validate_record(*s.entity, records[i]);
    if (check.record) {
      check.record->datasource = s.name;
      valid.push_back(std::move(*check.record));
    } else {
      result.rejected.push_back({i, std::move(check.errors.front())});
    }
  }

  std::unique_lock lock(s.mutex);
  if (s.journal.is_open() && !valid.empty()) {
    std::string lines;
    for (const auto& rec : valid) {
      auto j = record_to_json(*s.entity, rec);
      if (s.entity->time_axis()) j["_t"] = rec.t;
      lines += j.dump();
      lines += '\n';
    }
    s.journal.write(lines.data(), static_cast<std::streamsize>(lines.size()));
    s.journal.flush();
    if (!s.journal) {
      throw Error(ErrorKind::kIo, "journal write for '" + s.name + "' failed");
    }
  }
  for (auto& rec : valid) insert_sorted(s, std::move(rec));
  result.accepted = valid.size();
  return result;
}

namespace {

// Typed JSON for one CSV cell. Cells that do not look like the declared kind
// stay strings so validation reports a type mismatch.
nlohmann::json cell_to_json(const dsl::Field& f, const CsvCell& cell) {
  const std::string& t = cell.text;
  switch (f.type.kind) {
    case dsl::FieldKind::kInt:
    case dsl::FieldKind::kFloat: {
      if (t.empty() || !(t[0] == '-' || (t[0] >= '0' && t[0] <= '9'))) return t;
      const char* first = t.data();
      const char* last = t.data() + t.size();
      std::int64_t i = 0;
      auto ri = std::from_chars(first, last, i);
      if (ri.ec == std::errc() && ri.ptr == last) return i;
      double d = 0.0;
      auto rd = std::from_chars(first, last, d);
      if (rd.ec == std::errc() && rd.ptr == last && std::isfinite(d)) return d;
      return t;
    }
    case dsl::FieldKind::kBool:
      if (t == "true") return true;
      if (t == "false") return false;
      return t;
    default:
      return t;
  }
}

}  // namespace

IngestResult Store::ingest_csv(std::string_view datasource, std::string_view csv) {
  Series& s = series(datasource);
  auto rows = parse_csv(csv);
  if (rows.empty()) throw Error(ErrorKind::kInvalid, "CSV input has no header row");

  std::vector<const dsl::Field*> columns;
  for (const auto& cell : rows.front().cells) {
    const dsl::Field* f = s.entity->find_field(cell.text);
    if (!f) {
      throw Error(ErrorKind::kInvalid, "CSV header names unknown field '" +
                                           cell.text + "' of entity '" +
                                           s.entity->name + "'");
    }
    if (std::find(columns.begin(), columns.end(), f) != columns.end()) {
      throw Error(ErrorKind::kInvalid,
                  "CSV header repeats field '" + cell.text + "'");
    }
    columns.push_back(f);
  }

  std::vector<nlohmann::json> raws;
  std::vector<std::size_t> lines;
  IngestResult shape_errors;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() > columns.size()) {
      shape_errors.rejected.push_back(
          {row.line,
           {"", Reason::kUnknownField,
            "row has " + std::to_string(row.cells.size()) +
                " cells but the header has " + std::to_string(columns.size())}});
      continue;
    }
    nlohmann::json raw = nlohmann::json::object();
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      const auto& cell = row.cells[c];
      if (cell.text.empty() && !cell.quoted) continue;  // absent
      raw[columns[c]->name] = cell_to_json(*columns[c], cell);
    }
    raws.push_back(std::move(raw));
    lines.push_back(row.line);
  }

  IngestResult result = ingest_batch(datasource, raws);
  for (auto& rej : result.rejected) rej.ordinal = lines[rej.ordinal];
  result.rejected.insert(result.rejected.end(), shape_errors.rejected.begin(),
                         shape_errors.rejected.end());
  std::sort(result.rejected.begin(), result.rejected.end(),
            [](const Rejection& a, const Rejection& b) { return a.ordinal < b.ordinal; });
  return result;
}

std::vector<Record> Store::query(std::string_view datasource,
                                 const QueryRange& range) const {
  const Series& s = series(datasource);
  if (range.from && range.to && *range.from > *range.to) {
    throw Error(ErrorKind::kInvalid, "query range has from > to");
  }
  if (range.limit && *range.limit == 0) {
    throw Error(ErrorKind::kInvalid, "query limit must be positive");
  }
  std::shared_lock lock(s.mutex);
  auto begin = s.records.begin();
  auto end = s.records.end();
  if (s.entity->time_axis()) {
    auto by_time = [](EpochMs t, const Record& r) { return t < r.t; };
    if (range.from) begin = std::upper_bound(begin, end, *range.from, by_time);
    if (range.to) end = std::upper_bound(begin, end, *range.to, by_time);
  }
  if (range.limit && static_cast<std::size_t>(end - begin) > *range.limit) {
    begin = end - static_cast<std::ptrdiff_t>(*range.limit);
  }
  return {begin, end};
}

std::size_t Store::size(std::string_view datasource) const {
  const Series& s = series(datasource);
  std::shared_lock lock(s.mutex);
  return s.records.size();
}

}  // namespace climadash::ingestion
