// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "rectlaw/ats.hpp"

#include <cmath>
#include <limits>

#include "rectlaw/error.hpp"

namespace rectlaw {

void AtsConfig::validate() const {
  if (k < 2) throw DomainError("AtS needs k >= 2");
  if (!(delta > 0.0)) throw DomainError("AtS needs delta > 0");
  if (full_size <= 0) throw DomainError("AtS needs full_size > 0");
  if (budget_ratio.num() <= 0 || budget_ratio.num() > budget_ratio.den()) {
    throw DomainError("budget ratio must lie in (0, 1]");
  }
  if (target_size && *target_size <= 0) throw DomainError("target size must be positive");
}

LinFit linfit(std::span<const LogPoint> pts, ResidualStd convention) {
  const std::size_t n = pts.size();
  if (n < 2) throw InsufficientDataError("line fit needs at least 2 points");
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  if (!(sxx > 0.0)) throw DomainError("line fit is degenerate: all x identical");

  LinFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (const auto& p : pts) {
      const double r = p.y - fit(p.x);
      ssr += r * r;
    }
    const double dof = convention == ResidualStd::Sample ? static_cast<double>(n - 1) : static_cast<double>(n);
    fit.residual_std = std::sqrt(ssr / dof);
  }
  return fit;
}

double stop_indicator(const LinFit& fit, LogPoint candidate) {
  const double residual = std::abs(candidate.y - fit(candidate.x));
  if (fit.residual_std < 1e-12) {
    return residual < 1e-6 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return residual / fit.residual_std;
}

AtsResult run_ats(const LossCurve& curve, const AtsConfig& cfg) {
  cfg.validate();
  const std::int64_t budget = cfg.budget_ratio.floor_times(cfg.full_size);
  const auto sequence = halving_sequence(curve, budget);
  if (sequence.size() < 2) {
    throw InsufficientDataError(curve.model_id() + "/" + curve.dataset_id() + ": AtS needs 2 grid sizes <= " +
                                std::to_string(budget) + ", found " + std::to_string(sequence.size()));
  }

  AtsResult out;
  for (const auto& p : sequence) {
    const LogPoint candidate{std::log(static_cast<double>(p.size)), std::log(p.loss)};
    if (out.accepted.size() >= static_cast<std::size_t>(cfg.k)) {
      const LinFit line = linfit(out.accepted, cfg.residual_std);
      if (stop_indicator(line, candidate) > cfg.delta) {
        out.stopped_early = true;
        break;
      }
    }
    out.accepted.push_back(candidate);
  }

  out.line = linfit(out.accepted, cfg.residual_std);
  out.predicted_log_loss = out.line(std::log(static_cast<double>(cfg.extrapolation_size())));
  out.score = -out.predicted_log_loss;
  return out;
}

}  // namespace rectlaw
