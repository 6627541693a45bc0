// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"

#include "climadash/agent/commands.hpp"
#include "climadash/agent/grammar.hpp"
#include "paths.hpp"

using namespace climadash;
using namespace climadash::agent;
using nlohmann::json;

namespace {

constexpr EpochMs kEnd = 1717200000000;

AgentCommand expect_command(const ParseOutcome& o) {
  if (const auto* nm = std::get_if<NoMatch>(&o)) {
    FAIL("unexpected no-match: " << nm->reason);
  }
  return std::get<AgentCommand>(o);
}

}  // namespace

TEST_SUITE("agent") {
  TEST_CASE("line chart of a kpi for the last 7 days") {
    auto m = cdtest::model_file("reference.cbm");
    auto ctx = GrammarContext::from_model(*m);
    auto cmd = expect_command(parse_utterance("add a line chart of avg pm25 for the last 7 days", ctx));
    AgentCommand want;
    want.intent = Intent::kAddWidget;
    want.kind = dashboard::WidgetKind::kLine;
    want.source = dashboard::SourceRef::kpi("avg_pm25");
    want.window = dsl::Duration{7, dsl::DurationUnit::kDay};
    CHECK(cmd == want);
  }

  TEST_CASE("remove widget 3") {
    auto ctx = GrammarContext::from_model(*cdtest::model_file("reference.cbm"));
    auto cmd = expect_command(parse_utterance("remove widget 3", ctx));
    CHECK(cmd.intent == Intent::kRemoveWidget);
    CHECK(cmd.widget_ref == WidgetRef{3, std::nullopt});
    CHECK(cmd.to_json().dump() == R"({"intent":"remove_widget","widget_ref":{"index":3}})");
  }

  TEST_CASE("out of grammar is a no-match value") {
    auto ctx = GrammarContext::from_model(*cdtest::model_file("reference.cbm"));
    auto o = parse_utterance("make me a sandwich", ctx);
    REQUIRE(std::holds_alternative<NoMatch>(o));
    CHECK(std::get<NoMatch>(o).reason == "no command keyword recognized");
    CHECK_FALSE(std::get<NoMatch>(o).suggestions.empty());
    CHECK(std::holds_alternative<NoMatch>(parse_utterance("", ctx)));
    CHECK(std::holds_alternative<NoMatch>(parse_utterance("\"\"\"", ctx)));
  }

  TEST_CASE("two matching sources are ambiguous") {
    auto ctx = GrammarContext::from_model(*cdtest::model_file("city.cbm"));
    auto o = parse_utterance("add a line chart of energy and total energy", ctx);
    REQUIRE(std::holds_alternative<NoMatch>(o));
    const auto& nm = std::get<NoMatch>(o);
    CHECK(nm.reason == "ambiguous source");
    CHECK(nm.suggestions == std::vector<std::string>{"datasource:energy", "kpi:total_energy"});
  }

  TEST_CASE("command json round trip") {
    auto ctx = GrammarContext::from_model(*cdtest::model_file("city.cbm"), {"Waste"});
    for (const char* text : {"create a bar chart of total energy grouped by sector",
                             "rename \"Waste\" to \"Waste collected\"", "resize widget 1 to 8x4",
                             "move widget 2 to x 6 y 4", "paint widget 1 grey"}) {
      CAPTURE(text);
      auto cmd = expect_command(parse_utterance(text, ctx));
      CHECK(AgentCommand::from_json(json::parse(cmd.to_json().dump())) == cmd);
    }
    CHECK_THROWS_AS(AgentCommand::from_json(json::parse(R"({"intent":"dance"})")), Error);
  }

  TEST_CASE("checked-in utterance corpus") {
    auto doc = json::parse(cdtest::read_file(cdtest::data_path("agent_corpus.json")));
    auto m = cdtest::model_file(doc["model"].get<std::string>());
    auto ctx = GrammarContext::from_model(*m, doc["widget_titles"].get<std::vector<std::string>>());
    REQUIRE(doc["cases"].size() >= 30);
    for (const auto& c : doc["cases"]) {
      auto text = c["utterance"].get<std::string>();
      CAPTURE(text);
      auto o = parse_utterance(text, ctx);
      REQUIRE(std::holds_alternative<AgentCommand>(o));
      CHECK(std::get<AgentCommand>(o) == AgentCommand::from_json(c["expect"]));
    }
    REQUIRE(doc["out_of_grammar"].size() >= 10);
    for (const auto& u : doc["out_of_grammar"]) {
      CAPTURE(u.get<std::string>());
      CHECK(std::holds_alternative<NoMatch>(parse_utterance(u.get<std::string>(), ctx)));
    }
  }

  TEST_CASE("add on an empty dashboard confirms with the title") {
    auto m = cdtest::model_file("reference.cbm");
    ingestion::Store data(m);
    dashboard::DashboardStore boards(m);
    boards.create("main", {}, std::string("main"));
    auto reply = run_utterance("add a gauge of avg pm25", boards, "main", data, kEnd);
    REQUIRE(reply.ok());
    CHECK(reply.result->message.find("avg_pm25") != std::string::npos);
    CHECK(reply.result->dashboard->widgets.at(0).layout == dashboard::Rect{0, 0, 6, 4});
    CHECK(reply.result->dashboard->version == 2);
    CHECK(reply.to_json()["widget_id"] == "w1");
  }

  TEST_CASE("remove beyond range says which widget is missing") {
    auto m = cdtest::model_file("reference.cbm");
    ingestion::Store data(m);
    dashboard::DashboardStore boards(m);
    boards.create("main", {}, std::string("main"));
    run_utterance("add a table of air quality", boards, "main", data, kEnd);
    auto reply = run_utterance("remove widget 9", boards, "main", data, kEnd);
    REQUIRE(reply.result);
    CHECK_FALSE(reply.ok());
    CHECK(reply.result->message == "no widget 9");
    CHECK(reply.result->error == ErrorKind::kNotFound);
    CHECK(boards.get("main")->version == 2);
  }

  TEST_CASE("show value with and without data") {
    auto m = cdtest::model_file("reference.cbm");
    ingestion::Store data(m);
    dashboard::DashboardStore boards(m);
    auto none = run_utterance("what is avg pm25", boards, "main", data, kEnd);
    REQUIRE(none.result);
    CHECK(none.result->message.find("no data in the last 30 days") != std::string::npos);
    CHECK_FALSE(boards.contains("main"));

    std::vector<json> batch = {{{"station", "S1"}, {"measured_at", "2024-05-30T00:00:00Z"}, {"pm25", 9.8}}};
    data.ingest_batch("air_quality", batch);
    auto some = run_utterance("what is avg pm25", boards, "main", data, kEnd);
    CHECK(some.result->message == "avg_pm25 is 9.8 ug/m3, on track");
    CHECK(some.result->kpi->value == 9.8);

    auto day = run_utterance("what is avg pm25 over the last day", boards, "main", data, kEnd);
    CHECK(day.result->message == "avg_pm25: no data in the last day");
  }

  TEST_CASE("geometry errors come back in plain words") {
    auto m = cdtest::model_file("reference.cbm");
    ingestion::Store data(m);
    dashboard::DashboardStore boards(m);
    run_utterance("add a table of air quality", boards, "main", data, kEnd);
    run_utterance("add a gauge of avg pm25", boards, "main", data, kEnd);
    auto reply = run_utterance("move widget 2 to 0 0", boards, "main", data, kEnd);
    REQUIRE(reply.result);
    CHECK_FALSE(reply.ok());
    CHECK(reply.result->message.rfind("That does not fit", 0) == 0);
    auto by_title = run_utterance("move \"air_quality\" to 0 8", boards, "main", data, kEnd);
    CHECK(by_title.ok());
    CHECK(by_title.result->message == "Moved widget \"air_quality\" to (0,8).");
  }

  TEST_CASE("number formatting") {
    CHECK(format_value(9.8) == "9.8");
    CHECK(format_value(10.0) == "10");
    CHECK(format_value(1.0 / 3.0) == "0.33");
    CHECK(format_value(-0.001) == "0");
    CHECK(format_value(1234.5) == "1234.5");
  }
}
