// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "bm25_check.hpp"
#include "climadash/agent/retrieval.hpp"
#include "climadash/error.hpp"
#include "paths.hpp"

using namespace climadash;
using namespace climadash::agent;

namespace {

RetrievalIndex three_passages() {
  return RetrievalIndex::from_passages({{"p", 1, "urban heat island mitigation", 0},
                                        {"p", 2, "waste collection routes", 0},
                                        {"p", 3, "heat pump subsidies for buildings", 0}});
}

}  // namespace

TEST_SUITE("retrieval") {
  TEST_CASE("tokenizer") {
    CHECK(tokenize("Urban-Heat, island!") == std::vector<std::string>{"urban", "heat", "island"});
    CHECK(tokenize("PM2.5 levels") == std::vector<std::string>{"pm2", "5", "levels"});
    CHECK(tokenize("Stra\xC3\x9F" "e caf\xC3\xA9") ==
          std::vector<std::string>{"stra\xC3\x9F" "e", "caf\xC3\xA9"});
    CHECK(tokenize(" ,.;").empty());
  }

  TEST_CASE("hand-computed three passage example") {
    auto index = three_passages();
    CHECK(index.size() == 3);
    CHECK(index.avgdl() == 4.0);
    auto hits = index.answer("heat", 3);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].passage.ordinal == 1);
    CHECK(hits[1].passage.ordinal == 3);
    CHECK(std::fabs(hits[0].score - 0.470) < 1e-3);
    CHECK(std::fabs(hits[1].score - 0.426) < 1e-3);
    // Closed forms: idf = ln 1.6; tf parts 2.2/2.2 and 2.2/2.425.
    CHECK(hits[0].score == doctest::Approx(std::log(1.6)).epsilon(1e-12));
    CHECK(hits[1].score == doctest::Approx(std::log(1.6) * 2.2 / 2.425).epsilon(1e-12));
    auto brute = cdtest::brute_force_bm25(
        {"urban heat island mitigation", "waste collection routes", "heat pump subsidies for buildings"},
        "heat");
    CHECK(brute[1] == 0.0);
    CHECK(cdtest::close_rel(hits[0].score, brute[0]));
    CHECK(cdtest::close_rel(hits[1].score, brute[2]));
  }

  TEST_CASE("query without corpus terms returns nothing") {
    CHECK(three_passages().answer("volcano", 3).empty());
    CHECK(three_passages().answer("", 3).empty());
    CHECK(RetrievalIndex{}.answer("heat", 3).empty());
    CHECK_THROWS_AS(three_passages().answer("heat", 0), Error);
  }

  TEST_CASE("a whole unique passage ranks itself first") {
    auto index = three_passages();
    for (const auto& p : index.passages()) {
      auto hits = index.answer(p.text, 3);
      REQUIRE_FALSE(hits.empty());
      CHECK(hits[0].passage.ordinal == p.ordinal);
    }
  }

  TEST_CASE("repeated query terms count once") {
    auto index = three_passages();
    CHECK(index.answer("heat heat HEAT", 1)[0].score == index.answer("heat", 1)[0].score);
  }

  TEST_CASE("ties break by document then position") {
    auto index = RetrievalIndex::from_documents({{"b.md", "solar roof"}, {"a.md", "solar roof"}});
    auto hits = index.answer("solar", 2);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].passage.doc_id == "a.md");
  }

  TEST_CASE("corpus building") {
    cdtest::TempDir empty;
    auto none = RetrievalIndex::build(empty.path());
    CHECK(none.size() == 0);

    cdtest::TempDir one;
    cdtest::write_file(one / "a.txt", "one two three four five six seven eight nine ten\n");
    auto single = RetrievalIndex::build(one.path());
    CHECK(single.size() == 1);
    CHECK(single.avgdl() == 10.0);

    cdtest::TempDir two;
    cdtest::write_file(two / "a.md", "first paragraph here\n\nsecond paragraph\n");
    cdtest::write_file(two / "sub/b.txt", "alpha\n\n\nbeta gamma\n  \ndelta\n");
    cdtest::write_file(two / "ignored.csv", "x,y\n");
    auto five = RetrievalIndex::build(two.path());
    CHECK(five.size() == 5);
    CHECK(five.passages()[2].doc_id == "sub/b.txt");
    CHECK(five.passages()[3].text == "beta gamma");

    CHECK_THROWS_AS(RetrievalIndex::build(two / "missing"), Error);
  }

  TEST_CASE("long paragraphs are cut at 160 tokens") {
    std::string text;
    for (int i = 0; i < 400; ++i) text += "w" + std::to_string(i) + (i % 20 == 19 ? "\n" : " ");
    auto parts = split_document(text);
    REQUIRE(parts.size() == 3);
    CHECK(tokenize(parts[0]).size() == 160);
    CHECK(tokenize(parts[1]).size() == 160);
    CHECK(tokenize(parts[2]).size() == 80);
    CHECK(tokenize(parts[1]).front() == "w160");
    CHECK(split_document("...\n\n!!!").empty());
  }

  TEST_CASE("index save and load") {
    cdtest::TempDir dir;
    auto index = RetrievalIndex::build(cdtest::data_path("corpus"));
    REQUIRE(index.size() > 3);
    index.save(dir / "index.json");
    auto again = RetrievalIndex::load(dir / "index.json");
    CHECK(again.size() == index.size());
    CHECK(again.avgdl() == index.avgdl());
    auto a = index.answer("cooling centres heat", 3);
    auto b = again.answer("cooling centres heat", 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].score == b[i].score);
    CHECK(a[0].passage.doc_id == "heat.md");
    cdtest::write_file(dir / "bad.json", "{\"format\":\"other\"}");
    CHECK_THROWS_AS(RetrievalIndex::load(dir / "bad.json"), Error);
  }

  TEST_CASE("extractive answer") {
    ExtractiveSynthesizer s;
    auto index = three_passages();
    CHECK(s.synthesize("heat", index.answer("heat", 3)) == "urban heat island mitigation");
    CHECK(s.synthesize("volcano", {}) == "No relevant passage found.");
  }

  TEST_CASE("random corpora agree with the brute-force scorer") {
    cdtest::Rng rng(8080);
    for (int c = 0; c < 60; ++c) {
      std::vector<std::string> texts;
      int n = cdtest::uniform_int(rng, 1, 25);
      for (int i = 0; i < n; ++i) texts.push_back(cdtest::random_passage(rng));
      for (int q = 0; q < 5; ++q) {
        auto diff = cdtest::compare_bm25(texts, cdtest::random_passage(rng));
        CHECK_MESSAGE(diff.empty(), diff);
      }
    }
  }
}
