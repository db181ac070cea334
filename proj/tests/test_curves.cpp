// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "rectlaw/curves.hpp"
#include "rectlaw/error.hpp"
#include "rectlaw/ratio.hpp"

using namespace rectlaw;

TEST_SUITE("curves") {
  TEST_CASE("ratio parsing") {
    CHECK(Ratio::parse("1/512") == Ratio(1, 512));
    CHECK(Ratio::parse("0.125") == Ratio(1, 8));
    CHECK(Ratio::parse("2/16") == Ratio(1, 8));
    CHECK(Ratio::parse("1").str() == "1");
    CHECK(Ratio(1, 512).floor_times(1638400) == 3200);
    CHECK(Ratio(1, 3).floor_times(10) == 3);
    CHECK_THROWS_AS(Ratio::parse("1/0"), DomainError);
    CHECK_THROWS_AS(Ratio::parse("abc"), DomainError);
  }

  TEST_CASE("duplicate rows are averaged") {
    std::istringstream in("model,dataset,size,loss\ngpt2,flan,200,4.38\ngpt2,flan,200,4.40\n");
    const auto store = parse_csv(in);
    CHECK(store.curve("gpt2", "flan").size() == 1);
    CHECK(store.curve("gpt2", "flan").require_loss_at(200) == doctest::Approx(4.39).epsilon(1e-12));
  }

  TEST_CASE("malformed input") {
    SUBCASE("non-positive loss") {
      std::istringstream in("model,dataset,size,loss\ngpt2,flan,200,-1.0\n");
      CHECK_THROWS_AS(parse_csv(in), ValidationError);
    }
    SUBCASE("bad number reports its line") {
      std::istringstream in("model,dataset,size,loss\ngpt2,flan,200,4.1\ngpt2,flan,x,4.0\n");
      try {
        (void)parse_csv(in);
        FAIL("expected a parse error");
      } catch (const ParseError& e) {
        CHECK(e.line() == 3);
      }
    }
    SUBCASE("wrong header") {
      std::istringstream in("a,b,c,d\n");
      CHECK_THROWS_AS(parse_csv(in), ParseError);
    }
    SUBCASE("unknown model with metadata") {
      std::istringstream c("model,dataset,size,loss\nghost,flan,200,4.1\n");
      std::istringstream m("model,n_params,family,arch\ngpt2,124000000,gpt2,decoder-only\n");
      CHECK_THROWS_AS(parse_csv(c, m), ReferenceError);
    }
  }

  TEST_CASE("csv round trip") {
    const auto& fx = embedded_fixtures();
    std::ostringstream c, m;
    write_curves_csv(c, fx.curves());
    write_models_csv(m, fx.models());
    std::istringstream ci(c.str()), mi(m.str());
    const CurveStore back = parse_csv(ci, mi);
    REQUIRE(back.curves().size() == fx.curves().size());
    for (std::size_t i = 0; i < back.curves().size(); ++i) CHECK(back.curves()[i] == fx.curves()[i]);
    REQUIRE(back.models().size() == fx.models().size());
    for (std::size_t i = 0; i < back.models().size(); ++i) CHECK(back.models()[i] == fx.models()[i]);
  }

  TEST_CASE("embedded fixtures") {
    const auto& fx = embedded_fixtures();
    CHECK(fx.datasets() == std::vector<std::string>{"flan", "wmt19", "gigaword"});
    CHECK(fx.models().size() == 30);
    std::size_t points = 0;
    for (const auto& c : fx.curves()) {
      CHECK(c.size() == 15);  // size 0 plus 200 * 2^i, i = 0..13
      points += c.size();
    }
    CHECK(fx.curves().size() == 90);
    CHECK(points == 30 * 3 * 15);
    CHECK(fx.warnings().empty());

    CHECK(fx.curve("Cerebras-GPT-2.7B", "flan").require_loss_at(0) == 2.914);
    CHECK(fx.curve("T5-small", "wmt19").require_loss_at(200) == 1.251);
    CHECK(fx.curve("switch-base-32", "gigaword").require_loss_at(1638400) == 1.106);
    CHECK(fx.curve("GPT-2", "flan").require_loss_at(1638400) == 1.791);
    CHECK(fx.model("GPT-2").n_params == 124000000);
    CHECK(fx.model("GPT-2").family == "gpt2");
    CHECK(fx.model("OPT-6.7b").n_params == 6700000000);
    CHECK(fx.model("OPT-6.7b").family == "opt");
  }

  TEST_CASE("the fixture files on disk match the compiled-in copy") {
    for (const std::string name : {"flan", "wmt19", "gigaword", "models"}) {
      std::ifstream f(std::string(RECTLAW_SOURCE_DIR) + "/fixtures/" + name + ".csv", std::ios::binary);
      REQUIRE(f);
      std::ostringstream disk;
      disk << f.rdbuf();
      CHECK(embedded_fixture_text(name) == disk.str());
    }
    CHECK_THROWS(embedded_fixture_text("nope"));
  }

  TEST_CASE("restrict_sizes") {
    const auto& gpt2 = embedded_fixtures().curve("GPT-2", "flan");
    const auto small = restrict_sizes(gpt2, 3200, false);
    CHECK(small.size() == 5);
    CHECK(small.points().front().size == 200);
    CHECK(small.points().back().size == 3200);
    CHECK(restrict_sizes(gpt2, 3200, true).size() == 6);
    CHECK(restrict_sizes(gpt2, 1638400, false).size() == 14);
    CHECK_THROWS_AS(restrict_sizes(gpt2, 199, false), InsufficientDataError);

    // Output is always a subsequence of the input.
    for (std::int64_t cap : {200, 777, 5000, 100000, 2000000}) {
      const auto r = restrict_sizes(gpt2, cap, true);
      std::size_t j = 0;
      for (const auto& p : r.points()) {
        while (j < gpt2.size() && !(gpt2.points()[j] == p)) ++j;
        CHECK(j < gpt2.size());
      }
    }
  }

  TEST_CASE("halving sequence") {
    const auto& gpt2 = embedded_fixtures().curve("GPT-2", "flan");
    const auto seq = halving_sequence(gpt2, 3200);
    REQUIRE(seq.size() == 5);
    CHECK(seq[0].size == 3200);
    CHECK(seq[4].size == 200);
    CHECK(halving_sequence(gpt2, 5000).front().size == 3200);
    CHECK(halving_sequence(gpt2, 1638400, 800).back().size == 800);

    // Ragged grid: each step takes the largest size at or below half the previous.
    const LossCurve ragged("m", "d", {{100, 3.0}, {300, 2.5}, {700, 2.0}, {1000, 1.8}});
    const auto r = halving_sequence(ragged, 1000);
    REQUIRE(r.size() == 3);
    CHECK(r[0].size == 1000);
    CHECK(r[1].size == 300);
    CHECK(r[2].size == 100);
  }

  TEST_CASE("ragged grids warn") {
    const LossCurve a("m1", "d", {{200, 3.0}, {400, 2.0}});
    const LossCurve b("m2", "d", {{200, 3.0}, {800, 2.0}});
    const CurveStore store({a, b}, {}, CurveStore::MetaPolicy::Optional);
    CHECK(!store.warnings().empty());
  }
}
