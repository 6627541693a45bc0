// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>
#include <string>

#include "climadash/dsl/parser.hpp"

namespace climadash::dsl {

namespace {

class Checker {
 public:
  explicit Checker(const Model& m) : model_(m) {}

  ValidationReport run() {
    check_entities();
    check_datasources();
    check_kpis();
    return std::move(report_);
  }

 private:
  void error(std::string_view code, SourceLoc loc, std::string message) {
    report_.diagnostics.push_back(
        {std::string(code), Severity::kError, loc, std::move(message)});
  }

  void check_ident(std::string_view what, const std::string& name,
                   SourceLoc loc) {
    if (!is_identifier(name)) {
      error(codes::kIdent, loc,
            std::string(what) + " name '" + name +
                "' must match [a-z][a-z0-9_]*");
    }
  }

  void check_entities() {
    std::set<std::string> names;
    for (const auto& e : model_.entities) {
      check_ident("entity", e.name, e.loc);
      if (!names.insert(e.name).second) {
        error(codes::kDup, e.loc, "duplicate entity '" + e.name + "'");
      }
      if (e.fields.empty()) {
        error(codes::kEntityEmpty, e.loc,
              "entity '" + e.name + "' declares no fields");
      }
      std::set<std::string> field_names;
      for (const auto& f : e.fields) {
        check_ident("field", f.name, f.loc);
        if (!field_names.insert(f.name).second) {
          error(codes::kDup, f.loc,
                "duplicate field '" + f.name + "' in entity '" + e.name + "'");
        }
        if (f.type.kind == FieldKind::kEnum) check_enum(e, f);
      }
    }
  }

  void check_enum(const Entity& e, const Field& f) {
    if (f.type.enum_values.empty()) {
      error(codes::kEnum, f.loc,
            "enum field '" + e.name + "." + f.name + "' has no values");
      return;
    }
    std::set<std::string> values;
    for (const auto& v : f.type.enum_values) {
      check_ident("enum value", v, f.loc);
      if (!values.insert(v).second) {
        error(codes::kEnum, f.loc,
              "enum field '" + e.name + "." + f.name +
                  "' repeats value '" + v + "'");
      }
    }
  }

  void check_datasources() {
    std::set<std::string> names;
    for (const auto& d : model_.datasources) {
      check_ident("datasource", d.name, d.loc);
      if (!names.insert(d.name).second) {
        error(codes::kDup, d.loc, "duplicate datasource '" + d.name + "'");
      }
      if (!model_.find_entity(d.entity)) {
        error(codes::kDsEntity, d.loc,
              "datasource '" + d.name + "' references unknown entity '" +
                  d.entity + "'");
      }
    }
  }

  void check_expr(const KpiDef& k, const Entity& e, const Expr& expr) {
    switch (expr.kind) {
      case Expr::Kind::kNumber:
        return;
      case Expr::Kind::kBinary:
        for (const auto& operand : expr.operands) check_expr(k, e, operand);
        return;
      case Expr::Kind::kAggregate: {
        if (expr.fn == AggFn::kCount) return;
        SourceLoc at = expr.loc.line ? expr.loc : k.loc;
        const Field* f = e.find_field(expr.field);
        if (!f) {
          error(codes::kExprField, at,
                "kpi '" + k.name + "' aggregates unknown field '" +
                    expr.field + "' of entity '" + e.name + "'");
        } else if (!f->type.is_numeric()) {
          error(codes::kExprType, at,
                "kpi '" + k.name + "': " + std::string(to_string(expr.fn)) +
                    "(" + f->name + ") needs a numeric field, but '" +
                    f->name + "' is " + std::string(to_string(f->type.kind)));
        }
        return;
      }
    }
  }

  void check_kpis() {
    std::set<std::string> names;
    for (const auto& k : model_.kpis) {
      check_ident("kpi", k.name, k.loc);
      if (!names.insert(k.name).second) {
        error(codes::kDup, k.loc, "duplicate kpi '" + k.name + "'");
      }
      if (!model_.find_datasource(k.source)) {
        error(codes::kKpiSource, k.loc,
              "kpi '" + k.name + "' references unknown datasource '" +
                  k.source + "'");
        continue;
      }
      // A dangling datasource entity is already reported once above.
      const Entity* e = model_.entity_of(k.source);
      if (!e) continue;
      check_expr(k, *e, k.expr);
      if (k.window && !e->time_axis()) {
        error(codes::kKpiTime, k.loc,
              "kpi '" + k.name + "' has a window but entity '" + e->name +
                  "' has no datetime field");
      }
      if (k.group_by) {
        const Field* g = e->find_field(*k.group_by);
        if (!g || !g->type.is_categorical()) {
          error(codes::kKpiGroup, k.loc,
                "kpi '" + k.name + "' groups by '" + *k.group_by +
                    "', which is not a string or enum field of '" + e->name +
                    "'");
        }
      }
    }
  }

  const Model& model_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate_model(const Model& model) {
  return Checker(model).run();
}

}  // namespace climadash::dsl
