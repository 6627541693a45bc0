// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <string>

#include "climadash/dsl/parser.hpp"

namespace climadash::dsl {

namespace {

int precedence(BinOp op) {
  return op == BinOp::kAdd || op == BinOp::kSub ? 1 : 2;
}

void print_expr_to(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::kNumber:
      out += format_number(e.number);
      return;
    case Expr::Kind::kAggregate:
      out += to_string(e.fn);
      out += '(';
      out += e.field;
      out += ')';
      return;
    case Expr::Kind::kBinary: {
      int prec = precedence(e.op);
      const Expr& l = e.lhs();
      const Expr& r = e.rhs();
      // Operators are left-associative, so a right operand of equal
      // precedence needs parentheses to keep its grouping.
      bool paren_l = l.kind == Expr::Kind::kBinary && precedence(l.op) < prec;
      bool paren_r = r.kind == Expr::Kind::kBinary && precedence(r.op) <= prec;
      if (paren_l) out += '(';
      print_expr_to(l, out);
      if (paren_l) out += ')';
      out += ' ';
      out += to_char(e.op);
      out += ' ';
      if (paren_r) out += '(';
      print_expr_to(r, out);
      if (paren_r) out += ')';
      return;
    }
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string print_expr(const Expr& expr) {
  std::string out;
  print_expr_to(expr, out);
  return out;
}

std::string print_model(const Model& model) {
  std::string out;
  auto blank_line = [&] {
    if (!out.empty()) out += '\n';
  };
  for (const auto& e : model.entities) {
    blank_line();
    out += "entity " + e.name + " {\n";
    for (const auto& f : e.fields) {
      out += "  " + f.name + ": ";
      out += to_string(f.type.kind);
      if (f.type.kind == FieldKind::kEnum) {
        out += '(';
        for (std::size_t i = 0; i < f.type.enum_values.size(); ++i) {
          if (i) out += ", ";
          out += f.type.enum_values[i];
        }
        out += ')';
      }
      if (f.unit) out += " unit " + quote(*f.unit);
      if (f.optional) out += " optional";
      out += '\n';
    }
    out += "}\n";
  }
  if (!model.datasources.empty()) {
    blank_line();
    for (const auto& d : model.datasources) {
      out += "datasource " + d.name + ": " + d.entity + '\n';
    }
  }
  for (const auto& k : model.kpis) {
    blank_line();
    out += "kpi " + k.name + " {\n";
    out += "  source: " + k.source + '\n';
    out += "  expr: " + print_expr(k.expr) + '\n';
    if (k.window) out += "  window: " + k.window->to_string() + '\n';
    if (k.unit) out += "  unit: " + quote(*k.unit) + '\n';
    if (k.target) {
      out += "  target: ";
      out += to_string(k.target->cmp);
      out += ' ' + format_number(k.target->bound) + '\n';
    }
    if (k.baseline) out += "  baseline: " + format_number(*k.baseline) + '\n';
    if (k.group_by) out += "  group_by: " + *k.group_by + '\n';
    out += "}\n";
  }
  return out;
}

}  // namespace climadash::dsl
