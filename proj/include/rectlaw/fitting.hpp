// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rectlaw/curves.hpp"
#include "rectlaw/error.hpp"
#include "rectlaw/laws.hpp"
#include "rectlaw/logmath.hpp"

namespace rectlaw {

struct FitConfig {
  int n_starts = 50;
  double huber_delta = 1e-3;
  std::uint64_t seed = 0;
  int max_iters = 2000;
  double tol = 1e-10;
};

struct FitResult {
  LawParams params;
  double objective = 0.0;  ///< summed Huber loss of the best start
  double rmsd = 0.0;       ///< log-space RMSD on the fitted points
  int start_index = 0;
  int iterations = 0;
  bool converged = false;
};

/// Thrown when no start reaches a finite objective. Carries the last point tried.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, LawParams best_effort)
      : Error(what), best_effort_(best_effort) {}
  const LawParams& best_effort() const noexcept { return best_effort_; }

 private:
  LawParams best_effort_;
};

/// 0.5 r^2 inside [-delta, delta], delta (|r| - delta / 2) outside.
double huber(double delta, double r);

/// Unconstrained fitting coordinates.
/// Rectified: (log B, log E, log D_l, log beta). Vanilla: (log B, log E, log alpha, log beta).
using Theta = std::array<double, 4>;

RectifiedParams rectified_from_theta(const Theta& theta);
VanillaParams vanilla_from_theta(const Theta& theta);
Theta theta_from(const RectifiedParams& p);
Theta theta_from(const VanillaParams& p);

/// Sum of huber(delta, LSE(log B - log(D_l + D^beta), log E) - log L) over `data`.
/// Non-finite intermediates yield +inf.
double objective_rectified(const Theta& theta, std::span<const LossPoint> data, double delta = 1e-3);
/// Sum of huber(delta, alpha LSE(log B - beta log D, log E) - log L) over `data`.
double objective_vanilla(const Theta& theta, std::span<const LossPoint> data, double delta = 1e-3);

/// Multi-start Nelder-Mead fit of either law. A size-0 point is accepted by the
/// rectified law only. Deterministic for a given (kind, data, cfg); start i draws its
/// initial point from a stream seeded by (cfg.seed, i), so adding starts never
/// changes the earlier ones.
FitResult fit_law(LawKind kind, std::span<const LossPoint> data, const FitConfig& cfg = {});

/// sqrt(mean((log Lhat(D) - log L)^2)).
double rmsd_log(const LawParams& params, std::span<const LossPoint> data);

struct RmsdRow {
  std::string model;
  std::string dataset;
  double rmsd_ours = 0.0;
  double rmsd_vanilla = 0.0;
  double delta = 0.0;  ///< rmsd_vanilla - rmsd_ours
  bool ok = true;
  std::string error;
};

/// Fits both laws to the nonzero points of every curve in `store`. Failed
/// fits mark their row instead of aborting the report.
std::vector<RmsdRow> rmsd_report(const CurveStore& store, const FitConfig& cfg = {});

/// Header `model,dataset,rmsd_ours,rmsd_vanilla,delta`; failed rows carry empty numbers.
void write_rmsd_csv(std::ostream& out, std::span<const RmsdRow> rows);

}  // namespace rectlaw
