// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rectlaw {

/// L(D) = b / (d_l + D^beta) + e
struct RectifiedParams {
  double b = 1.0;     ///< scale
  double d_l = 0.0;   ///< pre-learned data size, in sample equivalents
  double beta = 1.0;  ///< learning-difficulty exponent
  double e = 0.0;     ///< asymptotic loss

  friend bool operator==(const RectifiedParams&, const RectifiedParams&) = default;
};

/// L(D) = (b / D^beta + e)^alpha
struct VanillaParams {
  double b = 1.0;
  double beta = 1.0;
  double e = 0.0;
  double alpha = 1.0;

  friend bool operator==(const VanillaParams&, const VanillaParams&) = default;
};

using LawParams = std::variant<RectifiedParams, VanillaParams>;

enum class LawKind { Rectified, Vanilla };

std::string_view to_string(LawKind kind);
LawKind parse_law_kind(std::string_view text);
LawKind kind_of(const LawParams& p);

/// Throws DomainError at d = 0 with d_l = 0.
double eval_rectified(const RectifiedParams& p, double d);
/// Throws DomainError for d <= 0.
double eval_vanilla(const VanillaParams& p, double d);
double eval_law(const LawParams& p, double d);

/// log L(exp(x)), evaluated in log space so large |x| neither overflows nor
/// loses the asymptote.
double loglog(const RectifiedParams& p, double x);
double loglog(const VanillaParams& p, double x);
double loglog(const LawParams& p, double x);

/// Closed-form first derivative of the rectified log-log curve.
double loglog_slope(const RectifiedParams& p, double x);
/// Closed-form first derivative of the vanilla log-log curve.
double loglog_slope(const VanillaParams& p, double x);
/// Closed-form second derivative of the rectified log-log curve.
double loglog_curvature(const RectifiedParams& p, double x);

/// Log-size where the rectified log-log curve changes from concave to convex:
/// log(d_l^2 + b d_l / e) / (2 beta). Needs d_l > 0 and e > 0.
double inflection_x0(const RectifiedParams& p);

struct SlopeCheck {
  bool pass = false;
  std::vector<std::string> violations;
};

/// Central differences of the vanilla log-log curve on `x_grid` (ascending,
/// >= 3 points). Passes iff every slope is negative and the slope sequence is
/// non-decreasing up to 1e-6 of the largest |slope|.
SlopeCheck check_vanilla_slope(const VanillaParams& p, std::span<const double> x_grid);

struct InflectionCheck {
  bool pass = false;
  double x0_estimate = 0.0;
  std::vector<std::string> violations;
};

/// Second differences of the rectified log-log curve. Passes iff curvature is
/// strictly negative below x0 and strictly positive above, ignoring points
/// within one local grid step of x0, and the interpolated zero crossing lies
/// within two grid steps of x0. Throws DomainError when the grid does not
/// bracket x0.
InflectionCheck check_rectified_inflection(const RectifiedParams& p, std::span<const double> x_grid);

struct AuditFailure {
  LawParams params;
  std::vector<std::string> violations;
};

struct AuditReport {
  int passed = 0;
  int total = 0;
  std::vector<AuditFailure> failures;
};

/// Draws `draws` random positive parameter sets and runs the matching check on
/// a grid fitted to each draw: x0 +- 4/beta for the rectified law, and
/// B e^(-beta x) / E from 1e6 down to 1e-6 for the vanilla law.
AuditReport audit_law(LawKind kind, int draws, std::uint64_t seed, std::size_t grid_points = 400);

/// Evenly spaced grid of `n` points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace rectlaw
