// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "rectlaw/fitting.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <set>

#include "rectlaw/nelder_mead.hpp"

namespace rectlaw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct InitRange {
  double lo, hi;
};

// Initial draws in log space, covering losses of 0.5 - 5 nats and sizes up to ~1e6.
constexpr InitRange kLogB{-1.0, 8.0};
constexpr InitRange kLogE{-2.0, 1.6};
constexpr InitRange kLogDl{0.0, 10.0};
constexpr InitRange kLogBeta{-2.0, 0.5};
constexpr InitRange kLogAlpha{-1.0, 1.0};

Theta draw_start(LawKind kind, std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  auto draw = [&rng](InitRange r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };
  Theta t;
  t[0] = draw(kLogB);
  t[1] = draw(kLogE);
  t[2] = draw(kind == LawKind::Rectified ? kLogDl : kLogAlpha);
  t[3] = draw(kLogBeta);
  return t;
}

void check_fit_data(LawKind kind, std::span<const LossPoint> data) {
  std::set<std::int64_t> sizes;
  for (const auto& p : data) {
    // The rectified law is finite at D = 0, the vanilla law is not.
    if (p.size < 0 || (p.size == 0 && kind == LawKind::Vanilla)) {
      throw DomainError("the " + std::string(to_string(kind)) + " law cannot be fitted at size " +
                        std::to_string(p.size));
    }
    if (!(p.loss > 0.0)) throw DomainError("fitting needs positive losses");
    sizes.insert(p.size);
  }
  if (sizes.size() < 4) {
    throw InsufficientDataError("fit is underdetermined: need at least 4 distinct sizes, got " +
                                std::to_string(sizes.size()));
  }
}

}  // namespace

double huber(double delta, double r) {
  const double a = std::abs(r);
  return a <= delta ? 0.5 * r * r : delta * (a - 0.5 * delta);
}

RectifiedParams rectified_from_theta(const Theta& t) {
  return {.b = std::exp(t[0]), .d_l = std::exp(t[2]), .beta = std::exp(t[3]), .e = std::exp(t[1])};
}

VanillaParams vanilla_from_theta(const Theta& t) {
  return {.b = std::exp(t[0]), .beta = std::exp(t[3]), .e = std::exp(t[1]), .alpha = std::exp(t[2])};
}

Theta theta_from(const RectifiedParams& p) {
  return {std::log(p.b), std::log(p.e), std::log(p.d_l), std::log(p.beta)};
}

Theta theta_from(const VanillaParams& p) {
  return {std::log(p.b), std::log(p.e), std::log(p.alpha), std::log(p.beta)};
}

double objective_rectified(const Theta& theta, std::span<const LossPoint> data, double delta) {
  const double log_b = theta[0], log_e = theta[1], log_dl = theta[2], beta = std::exp(theta[3]);
  double total = 0.0;
  for (const auto& p : data) {
    const double log_denom = lse(log_dl, beta * std::log(static_cast<double>(p.size)));
    const double pred = lse(log_b - log_denom, log_e);
    total += huber(delta, pred - std::log(p.loss));
  }
  return std::isfinite(total) ? total : kInf;
}

double objective_vanilla(const Theta& theta, std::span<const LossPoint> data, double delta) {
  const double log_b = theta[0], log_e = theta[1], alpha = std::exp(theta[2]), beta = std::exp(theta[3]);
  double total = 0.0;
  for (const auto& p : data) {
    const double pred = alpha * lse(log_b - beta * std::log(static_cast<double>(p.size)), log_e);
    total += huber(delta, pred - std::log(p.loss));
  }
  return std::isfinite(total) ? total : kInf;
}

FitResult fit_law(LawKind kind, std::span<const LossPoint> data, const FitConfig& cfg) {
  if (cfg.n_starts < 1) throw DomainError("n_starts must be >= 1");
  if (!(cfg.huber_delta > 0.0)) throw DomainError("huber_delta must be positive");
  check_fit_data(kind, data);

  auto objective = [&](const Theta& t) {
    return kind == LawKind::Rectified ? objective_rectified(t, data, cfg.huber_delta)
                                      : objective_vanilla(t, data, cfg.huber_delta);
  };
  const SimplexOptions opt{.initial_step = 0.5, .max_iters = cfg.max_iters, .tol = cfg.tol};

  SimplexResult<4> best;
  int best_index = -1;
  Theta last_tried{};
  for (int i = 0; i < cfg.n_starts; ++i) {
    const Theta start = draw_start(kind, cfg.seed, i);
    auto r = nelder_mead(objective, start, opt);
    last_tried = r.x;
    // Strict comparison: the lowest index wins ties.
    if (std::isfinite(r.value) && r.value < best.value) {
      best = r;
      best_index = i;
    }
  }

  auto to_params = [kind](const Theta& t) -> LawParams {
    if (kind == LawKind::Rectified) return rectified_from_theta(t);
    return vanilla_from_theta(t);
  };
  if (best_index < 0) {
    throw NonConvergenceError("all " + std::to_string(cfg.n_starts) + " starts diverged", to_params(last_tried));
  }

  FitResult out;
  out.params = to_params(best.x);
  out.objective = best.value;
  out.rmsd = rmsd_log(out.params, data);
  out.start_index = best_index;
  out.iterations = best.iterations;
  out.converged = best.converged;
  return out;
}

double rmsd_log(const LawParams& params, std::span<const LossPoint> data) {
  if (data.empty()) throw InsufficientDataError("rmsd of empty data");
  double ss = 0.0;
  for (const auto& p : data) {
    const double r = std::log(eval_law(params, static_cast<double>(p.size))) - std::log(p.loss);
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(data.size()));
}

std::vector<RmsdRow> rmsd_report(const CurveStore& store, const FitConfig& cfg) {
  std::vector<RmsdRow> rows;
  for (const auto& curve : store.curves()) {
    RmsdRow row;
    row.model = curve.model_id();
    row.dataset = curve.dataset_id();
    try {
      const auto pts = curve.nonzero_points();
      row.rmsd_ours = fit_law(LawKind::Rectified, pts, cfg).rmsd;
      row.rmsd_vanilla = fit_law(LawKind::Vanilla, pts, cfg).rmsd;
      row.delta = row.rmsd_vanilla - row.rmsd_ours;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_rmsd_csv(std::ostream& out, std::span<const RmsdRow> rows) {
  out << "model,dataset,rmsd_ours,rmsd_vanilla,delta\n";
  const auto flags = out.flags();
  const auto prec = out.precision(6);
  out.setf(std::ios::fixed, std::ios::floatfield);
  for (const auto& r : rows) {
    out << r.model << ',' << r.dataset << ',';
    if (r.ok) {
      out << r.rmsd_ours << ',' << r.rmsd_vanilla << ',' << r.delta;
    } else {
      out << ",,";
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace rectlaw
