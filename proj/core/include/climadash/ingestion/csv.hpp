// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace climadash::ingestion {

struct CsvCell {
  std::string text;
  bool quoted = false;  // distinguishes "" (empty string) from an empty cell
};

struct CsvRow {
  std::size_t line = 0;  // 1-based line on which the row starts
  std::vector<CsvCell> cells;
};

// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
// CRLF or LF line endings, quoted fields may span lines. A leading UTF-8 BOM
// is skipped and blank lines are ignored. Throws climadash::Error(kInvalid)
// on an unterminated quoted field or stray quote.
std::vector<CsvRow> parse_csv(std::string_view text);

}  // namespace climadash::ingestion
