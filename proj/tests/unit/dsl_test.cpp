// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "doctest.h"

#include "climadash/dsl/parser.hpp"
#include "generators.hpp"
#include "paths.hpp"

using namespace climadash::dsl;

TEST_SUITE("dsl") {
  TEST_CASE("one entity with one field and one datasource") {
    auto r = parse_model("entity A { v: float }\ndatasource d: A");
    REQUIRE(r.ok());
    REQUIRE(r.model->entities.size() == 1);
    CHECK(r.model->entities[0].fields.size() == 1);
    CHECK(r.model->entities[0].fields[0].type.kind == FieldKind::kFloat);
    CHECK(r.model->datasources.size() == 1);
    CHECK(r.model->datasources[0].entity == "A");
    CHECK(r.model->kpis.empty());
  }

  TEST_CASE("empty input is the empty model") {
    auto r = load_model("");
    REQUIRE(r.ok());
    CHECK(r.model->empty());
    CHECK(r.report.empty());
  }

  TEST_CASE("unknown field type is a syntax error at its position") {
    auto r = parse_model("entity A { v: floot }");
    CHECK_FALSE(r.ok());
    REQUIRE(r.report.diagnostics.size() == 1);
    const auto& d = r.report.diagnostics[0];
    CHECK(d.code == "E-SYNTAX");
    CHECK(d.loc.line == 1);
    CHECK(d.loc.column == 15);
    CHECK(d.message.find("floot") != std::string::npos);
  }

  TEST_CASE("kpi on a missing datasource reports E-KPI-SOURCE once") {
    auto r = load_model("entity a { v: float }\nkpi k {\n  source: nope\n  expr: count()\n}\n");
    CHECK_FALSE(r.ok());
    REQUIRE(r.report.diagnostics.size() == 1);
    CHECK(r.report.diagnostics[0].code == "E-KPI-SOURCE");
    CHECK(r.report.diagnostics[0].loc.line == 2);
  }

  TEST_CASE("entities without kpis validate cleanly") {
    auto r = load_model("entity a { v: float }\nentity b { s: string optional }\n");
    REQUIRE(r.ok());
    CHECK(validate_model(*r.model).empty());
  }

  TEST_CASE("aggregating a string field is E-EXPR-TYPE") {
    auto r = load_model(
        "entity a { station: string }\ndatasource d: a\n"
        "kpi k {\n  source: d\n  expr: avg(station)\n}\n");
    CHECK(r.report.contains("E-EXPR-TYPE"));
    CHECK(r.report.error_count() == 1);
    CHECK(r.report.diagnostics[0].loc.line == 5);
  }

  TEST_CASE("validation rule table") {
    struct Case {
      const char* text;
      const char* code;
    };
    const Case cases[] = {
        {"entity Bad { v: float }", "E-IDENT"},
        {"entity a { v: float }\nentity a { w: int }", "E-DUP"},
        {"entity a { v: float  v: int }", "E-DUP"},
        {"entity a { }", "E-ENTITY-EMPTY"},
        {"entity a { e: enum(x, x) }", "E-ENUM"},
        {"datasource d: ghost", "E-DS-ENTITY"},
        {"entity a { v: float }\ndatasource d: a\nkpi k { source: d expr: sum(q) }", "E-EXPR-FIELD"},
        {"entity a { v: float }\ndatasource d: a\nkpi k { source: d expr: sum(v) window: 1d }",
         "E-KPI-TIME"},
        {"entity a { v: float }\ndatasource d: a\nkpi k { source: d expr: sum(v) group_by: v }",
         "E-KPI-GROUP"},
        {"entity a { v: float }\ndatasource d: a\nkpi k { source: d }", "E-KPI-MISSING"},
        {"entity a { v: float ~ }", "E-LEX"},
    };
    for (const auto& c : cases) {
      CAPTURE(c.text);
      auto r = load_model(c.text);
      CHECK_FALSE(r.ok());
      CHECK(r.report.contains(c.code));
    }
  }

  TEST_CASE("diagnostics format as file:line:col") {
    auto r = load_model("entity a { v: float }\n\ndatasource d: ghost\n");
    CHECK(r.report.format("m.cbm").rfind("m.cbm:3:1: error E-DS-ENTITY:", 0) == 0);
  }

  TEST_CASE("printer parenthesizes only where grouping needs it") {
    auto sum = Expr::aggregate(AggFn::kSum, "v");
    auto n = Expr::aggregate(AggFn::kCount);
    CHECK(print_expr(Expr::binary(BinOp::kSub, sum, Expr::binary(BinOp::kSub, n, Expr::literal(2)))) ==
          "sum(v) - (count() - 2)");
    CHECK(print_expr(Expr::binary(BinOp::kSub, Expr::binary(BinOp::kSub, sum, n), Expr::literal(2))) ==
          "sum(v) - count() - 2");
    CHECK(print_expr(Expr::binary(BinOp::kMul, Expr::binary(BinOp::kAdd, sum, n), Expr::literal(0.5))) ==
          "(sum(v) + count()) * 0.5");
    CHECK(print_expr(Expr::binary(BinOp::kAdd, sum, Expr::binary(BinOp::kDiv, n, Expr::literal(4)))) ==
          "sum(v) + count() / 4");
  }

  TEST_CASE("operator precedence and associativity") {
    auto r = load_model(
        "entity a { v: float }\ndatasource d: a\n"
        "kpi k { source: d expr: 1 - 2 - 3 * 4 / 5 }\n");
    REQUIRE(r.ok());
    auto three = Expr::binary(BinOp::kDiv, Expr::binary(BinOp::kMul, Expr::literal(3), Expr::literal(4)),
                              Expr::literal(5));
    auto expect = Expr::binary(BinOp::kSub, Expr::binary(BinOp::kSub, Expr::literal(1), Expr::literal(2)),
                               three);
    CHECK(r.model->kpis[0].expr == expect);
  }

  TEST_CASE("durations") {
    CHECK(Duration::parse("30d")->milliseconds() == 30LL * 86400000);
    CHECK(Duration::parse("15m")->milliseconds() == 15LL * 60000);
    CHECK(Duration::parse("24h")->milliseconds() == 24LL * 3600000);
    CHECK(Duration::parse("2w")->milliseconds() == 14LL * 86400000);
    CHECK(Duration::parse("2w")->to_string() == "2w");
    for (const char* bad : {"", "d", "0d", "-1d", "3y", "1.5h", "30 d"}) {
      CAPTURE(bad);
      CHECK_FALSE(Duration::parse(bad).has_value());
    }
  }

  TEST_CASE("reference model parses and hashes its source") {
    auto text = cdtest::read_file(cdtest::data_path("reference.cbm"));
    auto r = load_model(text);
    REQUIRE(r.ok());
    CHECK(r.model->source_hash == content_hash(text));
    CHECK(r.model->source_hash.size() == 16);
    const auto& k = r.model->kpis.at(0);
    CHECK(k.window == Duration{30, DurationUnit::kDay});
    CHECK(k.target == Target{Comparator::kLe, 10.0});
    CHECK(r.model->entities[0].time_axis() == 1u);
  }

  TEST_CASE("random models survive print and parse") {
    cdtest::Rng rng(20260601);
    for (int i = 0; i < 200; ++i) {
      auto m = cdtest::random_model(rng);
      REQUIRE(validate_model(m).empty());
      auto text = print_model(m);
      auto r = load_model(text);
      CAPTURE(text);
      REQUIRE(r.ok());
      CHECK(*r.model == m);
      CHECK(print_model(*r.model) == text);
    }
  }

  TEST_CASE("mutated inputs produce diagnostics, never crashes") {
    cdtest::Rng rng(99);
    auto base = print_model(cdtest::random_model(rng));
    for (int i = 0; i < 2000; ++i) {
      if (i % 50 == 0) base = print_model(cdtest::random_model(rng));
      auto text = cdtest::mutate_text(rng, base);
      auto r = load_model(text);
      if (!r.ok()) CHECK(r.report.error_count() > 0);
    }
  }
}
