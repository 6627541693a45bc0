// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0
//
// Naive reference implementations the engine is checked against. They share
// no code with core beyond the AST types they read.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "climadash/dsl/model.hpp"

namespace cdtest {

// --- KPI --------------------------------------------------------------------

// One synthetic reading. Field values are keyed by name; an absent key means
// the optional field was not sent.
struct Sample {
  std::int64_t t = 0;          // time axis, epoch ms
  std::size_t arrival = 0;     // submission order
  std::map<std::string, double> numbers;
  std::map<std::string, std::string> labels;
};

struct OracleValue {
  enum class State { kValue, kNoData, kError } state = State::kNoData;
  double value = 0.0;
};

inline OracleValue oracle_expr(const climadash::dsl::Expr& e,
                               const std::vector<const Sample*>& rows) {
  using climadash::dsl::AggFn;
  using climadash::dsl::BinOp;
  using climadash::dsl::Expr;
  using State = OracleValue::State;
  if (e.kind == Expr::Kind::kNumber) return {State::kValue, e.number};
  if (e.kind == Expr::Kind::kAggregate) {
    if (e.fn == AggFn::kCount) return {State::kValue, static_cast<double>(rows.size())};
    std::vector<double> present;  // in (t, arrival) order
    for (const Sample* s : rows) {
      auto it = s->numbers.find(e.field);
      if (it != s->numbers.end()) present.push_back(it->second);
    }
    if (present.empty()) return {State::kNoData, 0.0};
    double total = 0.0;
    for (double v : present) total += v;
    switch (e.fn) {
      case AggFn::kSum:
        return {State::kValue, total};
      case AggFn::kAvg:
        return {State::kValue, total / static_cast<double>(present.size())};
      case AggFn::kMin:
        return {State::kValue, *std::min_element(present.begin(), present.end())};
      case AggFn::kMax:
        return {State::kValue, *std::max_element(present.begin(), present.end())};
      case AggFn::kFirst:
        return {State::kValue, present.front()};
      case AggFn::kLast:
        return {State::kValue, present.back()};
      case AggFn::kCount:
        break;
    }
    return {State::kError, 0.0};
  }
  OracleValue l = oracle_expr(e.operands[0], rows);
  OracleValue r = oracle_expr(e.operands[1], rows);
  if (l.state == State::kError || r.state == State::kError) return {State::kError, 0.0};
  if (l.state == State::kNoData || r.state == State::kNoData) return {State::kNoData, 0.0};
  double out = 0.0;
  switch (e.op) {
    case BinOp::kAdd:
      out = l.value + r.value;
      break;
    case BinOp::kSub:
      out = l.value - r.value;
      break;
    case BinOp::kMul:
      out = l.value * r.value;
      break;
    case BinOp::kDiv:
      if (r.value == 0.0) return {State::kError, 0.0};
      out = l.value / r.value;
      break;
  }
  if (!std::isfinite(out)) return {State::kError, 0.0};
  return {State::kValue, out};
}

struct OracleGroup {
  std::string status;  // no_data, ok, on_track, off_track, error
  std::optional<double> value;
  std::size_t records = 0;
};

struct OracleKpi {
  OracleGroup whole;
  std::map<std::string, OracleGroup> groups;
};

inline std::string oracle_status(double v, const std::optional<climadash::dsl::Target>& target) {
  using climadash::dsl::Comparator;
  if (!target) return "ok";
  bool holds = false;
  switch (target->cmp) {
    case Comparator::kLe: holds = v <= target->bound; break;
    case Comparator::kGe: holds = v >= target->bound; break;
    case Comparator::kLt: holds = v < target->bound; break;
    case Comparator::kGt: holds = v > target->bound; break;
    case Comparator::kEq: holds = v == target->bound; break;
  }
  return holds ? "on_track" : "off_track";
}

inline OracleGroup oracle_settle(const climadash::dsl::KpiDef& k,
                                 const std::vector<const Sample*>& rows) {
  OracleGroup g;
  g.records = rows.size();
  if (rows.empty()) {
    g.status = "no_data";
    return g;
  }
  auto v = oracle_expr(k.expr, rows);
  if (v.state == OracleValue::State::kNoData) {
    g.status = "no_data";
  } else if (v.state == OracleValue::State::kError) {
    g.status = "error";
  } else {
    g.value = v.value;
    g.status = oracle_status(v.value, k.target);
  }
  return g;
}

// Window (end - w, end]; every sample up to `end` without a window.
inline OracleKpi oracle_kpi(const climadash::dsl::KpiDef& k, const std::vector<Sample>& samples,
                            std::int64_t end, std::optional<std::int64_t> window_ms,
                            const std::optional<std::string>& group_by) {
  std::vector<const Sample*> rows;
  for (const auto& s : samples) {
    bool inside = s.t <= end && (!window_ms || s.t > end - *window_ms);
    if (inside) rows.push_back(&s);
  }
  std::sort(rows.begin(), rows.end(), [](const Sample* a, const Sample* b) {
    return a->t != b->t ? a->t < b->t : a->arrival < b->arrival;
  });
  OracleKpi out;
  out.whole = oracle_settle(k, rows);
  if (group_by) {
    std::map<std::string, std::vector<const Sample*>> parts;
    for (const Sample* s : rows) {
      auto it = s->labels.find(*group_by);
      parts[it == s->labels.end() ? std::string() : it->second].push_back(s);
    }
    for (const auto& [key, part] : parts) out.groups[key] = oracle_settle(k, part);
  }
  return out;
}

inline bool close_rel(double a, double b, double rel = 1e-9) {
  if (a == b) return true;
  double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) <= rel * scale;
}

// --- BM25 -------------------------------------------------------------------

// Lowercased alphanumeric runs; bytes >= 0x80 are word characters.
inline std::vector<std::string> oracle_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    bool word = std::isalnum(c) || c >= 0x80;
    if (word) {
      cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Score of every passage for `query`, straight from the definition with no
// precomputed statistics.
inline std::vector<double> brute_force_bm25(const std::vector<std::string>& passages,
                                            const std::string& query, double k1 = 1.2,
                                            double b = 0.75) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& p : passages) docs.push_back(oracle_tokens(p));
  double n_docs = static_cast<double>(docs.size());
  double total_len = 0.0;
  for (const auto& d : docs) total_len += static_cast<double>(d.size());
  double avgdl = docs.empty() ? 0.0 : total_len / n_docs;

  std::vector<std::string> terms;
  for (const auto& t : oracle_tokens(query)) {
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
  }
  std::vector<double> scores(docs.size(), 0.0);
  for (const auto& term : terms) {
    double df = 0.0;
    for (const auto& d : docs) {
      if (std::find(d.begin(), d.end(), term) != d.end()) df += 1.0;
    }
    double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (std::size_t i = 0; i < docs.size(); ++i) {
      double f = static_cast<double>(std::count(docs[i].begin(), docs[i].end(), term));
      if (f == 0.0) continue;
      double len = static_cast<double>(docs[i].size());
      scores[i] += idf * f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * len / avgdl));
    }
  }
  return scores;
}

}  // namespace cdtest
