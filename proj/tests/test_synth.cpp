// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "rectlaw/error.hpp"
#include "rectlaw/fitting.hpp"
#include "rectlaw/synth.hpp"

using namespace rectlaw;
using doctest::Approx;

TEST_SUITE("synth") {
  TEST_CASE("exact evaluation") {
    SynthSpec spec;
    spec.law = RectifiedParams{.b = 2, .d_l = 1, .beta = 1, .e = 0.5};
    spec.sizes = {1};
    const auto c = generate(spec);
    REQUIRE(c.size() == 1);
    CHECK(c.points()[0].loss == Approx(1.5));
  }

  TEST_CASE("noiseless curves sit on the law") {
    for (const LawParams& law : {LawParams{RectifiedParams{.b = 30, .d_l = 500, .beta = 0.7, .e = 0.8}},
                                 LawParams{VanillaParams{.b = 30, .beta = 0.3, .e = 0.8, .alpha = 0.6}}}) {
      SynthSpec spec;
      spec.law = law;
      spec.sizes = paper_grid();
      const auto c = generate(spec);
      CHECK(rmsd_log(law, c.points()) == Approx(0.0).scale(1.0));
    }
  }

  TEST_CASE("determinism") {
    SynthSpec spec;
    spec.law = RectifiedParams{.b = 30, .d_l = 500, .beta = 0.7, .e = 0.8};
    spec.sizes = paper_grid();
    spec.noise_sigma = 0.02;
    spec.seed = 5;
    CHECK(generate(spec) == generate(spec));
    SynthSpec other = spec;
    other.seed = 6;
    CHECK_FALSE(generate(spec) == generate(other));
  }

  TEST_CASE("noise level") {
    SynthSpec spec;
    const RectifiedParams p{.b = 30, .d_l = 500, .beta = 0.7, .e = 0.8};
    spec.law = p;
    spec.noise_sigma = 0.05;
    spec.seed = 123;
    for (std::int64_t s = 1; s <= 10000; ++s) spec.sizes.push_back(s * 10);
    const auto c = generate(spec);
    double sum = 0.0, sq = 0.0;
    for (const auto& q : c.points()) {
      const double r = std::log(q.loss) - std::log(eval_rectified(p, static_cast<double>(q.size)));
      sum += r;
      sq += r * r;
    }
    const double n = static_cast<double>(c.size());
    const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
    CHECK(sd == Approx(0.05).epsilon(0.05));
  }

  TEST_CASE("invalid specs") {
    SynthSpec spec;
    spec.law = RectifiedParams{.b = 1, .d_l = 1, .beta = 1, .e = 1};
    CHECK_THROWS_AS(generate(spec), DomainError);
    spec.sizes = {400, 200};
    CHECK_THROWS_AS(generate(spec), DomainError);
    spec.sizes = {0, 200};
    CHECK_THROWS_AS(generate(spec), DomainError);
    spec.sizes = {200};
    spec.noise_sigma = -1;
    CHECK_THROWS_AS(generate(spec), DomainError);
  }

  TEST_CASE("phase boundary") {
    CHECK(phase_boundary_size({.b = 1, .d_l = 1, .beta = 1, .e = 1}) == Approx(std::sqrt(2.0)));
    CHECK(phase_boundary_size({.b = 1, .d_l = 1, .beta = 0.5, .e = 1}) == Approx(2.0));
    CHECK(phase_boundary_size({.b = 1, .d_l = 100, .beta = 1, .e = 1}) >
          phase_boundary_size({.b = 1, .d_l = 1, .beta = 1, .e = 1}));
    CHECK_THROWS_AS(phase_boundary_size({.b = 1, .d_l = 0, .beta = 1, .e = 1}), DomainError);
  }

  TEST_CASE("paper grid") {
    const auto g = paper_grid();
    REQUIRE(g.size() == 14);
    CHECK(g.front() == 200);
    CHECK(g.back() == 1638400);
  }
}
