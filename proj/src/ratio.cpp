// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "rectlaw/ratio.hpp"

#include <charconv>
#include <numeric>

#include "rectlaw/error.hpp"

namespace rectlaw {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DomainError("invalid ratio '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num < 0) {
    throw DomainError("ratio needs num >= 0 and den > 0");
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Ratio Ratio::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Ratio(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) {
      throw DomainError("too many decimals in ratio '" + std::string(text) + "'");
    }
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::string_view whole = text.substr(0, dot);
    const std::int64_t ip = whole.empty() ? 0 : parse_int(whole, text);
    const std::int64_t fp = frac.empty() ? 0 : parse_int(frac, text);
    return Ratio(ip * den + fp, den);
  }
  return Ratio(parse_int(text, text), 1);
}

std::int64_t Ratio::floor_times(std::int64_t n) const {
  const auto wide = static_cast<__int128>(num_) * n;
  return static_cast<std::int64_t>(wide / den_);
}

std::string Ratio::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace rectlaw
