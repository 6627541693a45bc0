// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"

#include "climadash/kpi.hpp"
#include "kpi_check.hpp"
#include "paths.hpp"

using namespace climadash;
using namespace climadash::kpi;
using nlohmann::json;

namespace {

constexpr EpochMs kDay = 86400000;
constexpr EpochMs kEnd = 1717200000000;  // 2024-06-01T00:00:00Z

json pm(const std::string& station, EpochMs t, double v) {
  return {{"station", station}, {"measured_at", format_rfc3339(t)}, {"pm25", v}};
}

struct Fixture {
  std::shared_ptr<const dsl::Model> model = cdtest::model_file("reference.cbm");
  ingestion::Store store{model};

  void add(std::vector<json> batch) {
    auto r = store.ingest_batch("air_quality", batch);
    REQUIRE(r.rejected.empty());
  }
  ExprValue eval(const std::string& expr_text) {
    auto m = cdtest::model_from(cdtest::read_file(cdtest::data_path("reference.cbm")) +
                                "kpi probe { source: air_quality expr: " + expr_text + " }\n");
    auto rows = store.query("air_quality");
    return evaluate_expr(m->find_kpi("probe")->expr, rows, model->entities[0]);
  }
};

}  // namespace

TEST_SUITE("kpi") {
  TEST_CASE("aggregates over a small set") {
    Fixture f;
    f.add({pm("S1", kEnd - 3, 8), pm("S1", kEnd - 2, 12), pm("S1", kEnd - 1, 10)});
    CHECK(f.eval("avg(pm25)").value == 10.0);
    CHECK(f.eval("sum(pm25)").value == 30.0);
    CHECK(f.eval("min(pm25)").value == 8.0);
    CHECK(f.eval("max(pm25)").value == 12.0);
    CHECK(f.eval("first(pm25)").value == 8.0);
    CHECK(f.eval("last(pm25)").value == 10.0);
    CHECK(f.eval("count()").value == 3.0);
    CHECK(f.eval("max(pm25) - min(pm25) / 2").value == 8.0);
  }

  TEST_CASE("sum of a single record") {
    Fixture f;
    f.add({pm("S1", kEnd, 7.5)});
    CHECK(f.eval("sum(pm25)").value == 7.5);
  }

  TEST_CASE("empty set: count is zero, avg is no data") {
    Fixture f;
    auto n = f.eval("count()");
    CHECK(n.state == ExprValue::State::kValue);
    CHECK(n.value == 0.0);
    CHECK(f.eval("avg(pm25)").state == ExprValue::State::kNoData);
  }

  TEST_CASE("division by zero is an error, not no data") {
    Fixture f;
    f.add({pm("S1", kEnd, 7.5)});
    auto v = f.eval("sum(pm25) / (count() - 1)");
    CHECK(v.state == ExprValue::State::kError);
    CHECK_FALSE(v.error.empty());
    Fixture empty;
    CHECK(empty.eval("count() / 0").state == ExprValue::State::kError);
    // A missing operand means there is nothing to divide.
    CHECK(empty.eval("avg(pm25) / 0").state == ExprValue::State::kNoData);
  }

  TEST_CASE("first and last break time ties by arrival") {
    Fixture f;
    f.add({pm("S1", kEnd, 1), pm("S2", kEnd, 2), pm("S3", kEnd - 5, 3)});
    f.add({pm("S4", kEnd, 4)});
    CHECK(f.eval("first(pm25)").value == 3.0);
    CHECK(f.eval("last(pm25)").value == 4.0);
  }

  TEST_CASE("30 day window drops the record from 31 days ago") {
    auto m = cdtest::model_from(cdtest::read_file(cdtest::data_path("reference.cbm")) +
                                "kpi n { source: air_quality expr: count() window: 30d }\n");
    ingestion::Store store(m);
    std::vector<json> batch = {pm("S1", kEnd - 31 * kDay, 1), pm("S1", kEnd - kDay, 2)};
    store.ingest_batch("air_quality", batch);
    auto v = evaluate_kpi(*m->find_kpi("n"), store, {kEnd, {}, {}});
    CHECK(v.value == 1.0);
    CHECK(v.status == Status::kOk);
    CHECK(v.window_end == kEnd);
  }

  TEST_CASE("window boundaries: start excluded, end included") {
    Fixture f;
    f.add({pm("S1", kEnd - 30 * kDay, 1), pm("S1", kEnd, 2), pm("S1", kEnd + 1, 3)});
    auto v = evaluate_kpi(f.model->kpis[0], f.store, {kEnd, {}, {}});
    CHECK(v.records == 1);
    CHECK(v.value == 2.0);
  }

  TEST_CASE("no records means no data") {
    Fixture f;
    auto v = evaluate_kpi(f.model->kpis[0], f.store, {kEnd, {}, {}});
    CHECK(v.status == Status::kNoData);
    CHECK_FALSE(v.value);
    CHECK(v.to_json()["status"] == "no_data");
  }

  TEST_CASE("grouped by station") {
    Fixture f;
    f.add({pm("S1", kEnd - 3, 8), pm("S1", kEnd - 2, 12), pm("S2", kEnd - 1, 20)});
    EvalOptions opts{kEnd, {}, std::string("station")};
    auto v = evaluate_kpi(f.model->kpis[0], f.store, opts);
    REQUIRE(v.groups.size() == 2);
    CHECK(v.groups.at("S1").value == 10.0);
    CHECK(v.groups.at("S1").status == Status::kOnTrack);
    CHECK(v.groups.at("S2").value == 20.0);
    CHECK(v.groups.at("S2").status == Status::kOffTrack);
    CHECK(v.value == doctest::Approx(40.0 / 3.0));
  }

  TEST_CASE("group_by naming a non-categorical field is an error status") {
    Fixture f;
    f.add({pm("S1", kEnd, 8)});
    auto v = evaluate_kpi(f.model->kpis[0], f.store, {kEnd, {}, std::string("pm25")});
    CHECK(v.status == Status::kError);
  }

  TEST_CASE("status against the target") {
    dsl::Target le10{dsl::Comparator::kLe, 10};
    CHECK(kpi_status(8, le10) == Status::kOnTrack);
    CHECK(kpi_status(10, le10) == Status::kOnTrack);
    CHECK(kpi_status(12, le10) == Status::kOffTrack);
    CHECK(kpi_status(12, std::nullopt) == Status::kOk);
    CHECK(kpi_status(10, dsl::Target{dsl::Comparator::kLt, 10}) == Status::kOffTrack);
    CHECK(kpi_status(10, dsl::Target{dsl::Comparator::kGe, 10}) == Status::kOnTrack);
    CHECK(kpi_status(10, dsl::Target{dsl::Comparator::kGt, 10}) == Status::kOffTrack);
    CHECK(kpi_status(10, dsl::Target{dsl::Comparator::kEq, 10}) == Status::kOnTrack);
  }

  TEST_CASE("progress toward the target") {
    CHECK(progress(15, 20, 10) == 0.5);
    CHECK(progress(10, 20, 10) == 1.0);
    CHECK(progress(20, 20, 10) == 0.0);
    CHECK(progress(25, 20, 10) == 0.0);
    CHECK(progress(5, 20, 10) == 1.0);
    CHECK(progress(150, 100, 200) == 0.5);
    CHECK_FALSE(progress(15, 10, 10).has_value());
  }

  TEST_CASE("progress is reported only with a baseline") {
    auto m = cdtest::model_file("city.cbm");
    ingestion::Store store(m);
    std::vector<json> batch = {{{"route", "r1"}, {"tonnes", 400}}, {{"route", "r2"}, {"tonnes", 250}}};
    store.ingest_batch("waste", batch);
    auto v = evaluate_kpi(*m->find_kpi("waste_total"), store, {kEnd, {}, {}});
    CHECK(v.value == 650.0);
    CHECK(v.status == Status::kOffTrack);
    REQUIRE(v.progress);
    CHECK(*v.progress == doctest::Approx(0.5));
  }

  TEST_CASE("window override") {
    Fixture f;
    f.add({pm("S1", kEnd - 2 * kDay, 30), pm("S1", kEnd - 1000, 6)});
    EvalOptions opts{kEnd, dsl::Duration{1, dsl::DurationUnit::kDay}, {}};
    auto v = evaluate_kpi(f.model->kpis[0], f.store, opts);
    CHECK(v.value == 6.0);
    CHECK(v.window == dsl::Duration{1, dsl::DurationUnit::kDay});
  }

  TEST_CASE("random scenarios agree with the brute-force evaluator") {
    cdtest::Rng rng(31337);
    auto model = cdtest::model_from(cdtest::kScenarioModel);
    for (int i = 0; i < 150; ++i) {
      auto sc = cdtest::random_scenario(rng);
      ingestion::Store store(model);
      store.ingest_batch("readings", sc.records);
      for (int q = 0; q < 3; ++q) {
        auto k = cdtest::random_scenario_kpi(rng);
        auto diff = cdtest::compare_kpi(k, sc.samples, store, cdtest::random_at(rng));
        CHECK_MESSAGE(diff.empty(), diff);
      }
      auto w = cdtest::random_scenario_kpi(rng).window.value_or(dsl::Duration{1, dsl::DurationUnit::kDay});
      CHECK(cdtest::partition_holds(store, w, cdtest::random_at(rng)));
    }
  }
}
