// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rectlaw/curves.hpp"
#include "rectlaw/ratio.hpp"

namespace rectlaw {

/// Denominator used for the residual standard deviation of a line fit.
enum class ResidualStd {
  Population,  ///< sqrt(SSR / n)
  Sample,      ///< sqrt(SSR / (n - 1))
};

/// Accept-then-Stop settings.
struct AtsConfig {
  int k = 3;            ///< pairs accepted unconditionally before stopping may trigger
  double delta = 5.0;   ///< stop when the candidate sits more than delta sigmas off the line
  std::int64_t full_size = 1638400;  ///< |S|; the budget is floor(budget_ratio * full_size)
  Ratio budget_ratio{1, 1};
  /// Size the line is extrapolated to. Defaults to full_size; set it to the
  /// whole training-corpus size to extrapolate past the measured grid.
  std::optional<std::int64_t> target_size;
  ResidualStd residual_std = ResidualStd::Population;

  std::int64_t extrapolation_size() const { return target_size.value_or(full_size); }
  void validate() const;
};

/// A (log size, log loss) pair.
struct LogPoint {
  double x = 0.0;
  double y = 0.0;
};

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_std = 0.0;

  double operator()(double x) const { return intercept + slope * x; }
};

/// Ordinary least squares. Needs >= 2 points with >= 2 distinct x.
/// residual_std is 0 for two points.
LinFit linfit(std::span<const LogPoint> pts, ResidualStd convention = ResidualStd::Population);

/// |y - line(x)| / sigma. With sigma < 1e-12 it returns 0 when the residual
/// is below 1e-6 and +inf otherwise.
double stop_indicator(const LinFit& fit, LogPoint candidate);

struct AtsResult {
  std::vector<LogPoint> accepted;  ///< in acceptance order, largest size first
  bool stopped_early = false;
  LinFit line;
  double predicted_log_loss = 0.0;
  double score = 0.0;  ///< -predicted_log_loss
};

/// Walks the halving sequence from the largest grid size within budget,
/// accepting pairs until the stop indicator exceeds delta, then extrapolates
/// the line through the accepted pairs to log(extrapolation_size).
AtsResult run_ats(const LossCurve& curve, const AtsConfig& cfg);

}  // namespace rectlaw
