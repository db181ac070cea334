// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "rectlaw/curves.hpp"
#include "rectlaw/error.hpp"

namespace rectlaw {

namespace detail {
extern const std::string_view kFixtureFlan;
extern const std::string_view kFixtureWmt19;
extern const std::string_view kFixtureGigaword;
extern const std::string_view kFixtureModels;
}  // namespace detail

std::string_view embedded_fixture_text(std::string_view name) {
  if (name == "flan") return detail::kFixtureFlan;
  if (name == "wmt19") return detail::kFixtureWmt19;
  if (name == "gigaword") return detail::kFixtureGigaword;
  if (name == "models") return detail::kFixtureModels;
  throw ReferenceError("no embedded fixture named '" + std::string(name) + "'");
}

}  // namespace rectlaw
