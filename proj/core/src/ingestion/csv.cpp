// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/ingestion/csv.hpp"

#include "climadash/error.hpp"

namespace climadash::ingestion {

std::vector<CsvRow> parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<CsvRow> rows;
  std::size_t pos = 0;
  std::size_t line = 1;
  const std::size_t n = text.size();

  while (pos < n) {
    CsvRow row;
    row.line = line;
    bool end_of_row = false;
    while (!end_of_row) {
      CsvCell cell;
      if (pos < n && text[pos] == '"') {
        cell.quoted = true;
        std::size_t start_line = line;
        ++pos;
        bool closed = false;
        while (pos < n) {
          char c = text[pos];
          if (c == '"') {
            if (pos + 1 < n && text[pos + 1] == '"') {
              cell.text.push_back('"');
              pos += 2;
              continue;
            }
            ++pos;
            closed = true;
            break;
          }
          if (c == '\n') ++line;
          cell.text.push_back(c);
          ++pos;
        }
        if (!closed) {
          throw Error(ErrorKind::kInvalid,
                      "unterminated quoted field starting on line " +
                          std::to_string(start_line));
        }
        if (pos < n && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          throw Error(ErrorKind::kInvalid,
                      "unexpected character after closing quote on line " +
                          std::to_string(line));
        }
      } else {
        while (pos < n && text[pos] != ',' && text[pos] != '\n' &&
               text[pos] != '\r') {
          if (text[pos] == '"') {
            throw Error(ErrorKind::kInvalid,
                        "stray quote in unquoted field on line " +
                            std::to_string(line));
          }
          cell.text.push_back(text[pos]);
          ++pos;
        }
      }
      row.cells.push_back(std::move(cell));

      if (pos >= n) {
        end_of_row = true;
      } else if (text[pos] == ',') {
        ++pos;
      } else {
        if (text[pos] == '\r') ++pos;
        if (pos < n && text[pos] == '\n') ++pos;
        ++line;
        end_of_row = true;
      }
    }
    bool blank = row.cells.size() == 1 && !row.cells[0].quoted &&
                 row.cells[0].text.empty();
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace climadash::ingestion
