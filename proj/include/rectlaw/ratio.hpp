// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rectlaw {

/// Exact non-negative rational, used for the data budget ratio gamma.
/// Accepts "1/512", "0.125" and "1" on input; always stored reduced.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den);

  static Ratio parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// floor(ratio * n), computed without rounding.
  std::int64_t floor_times(std::int64_t n) const;

  std::string str() const;

  friend bool operator==(const Ratio&, const Ratio&) = default;

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
};

}  // namespace rectlaw
