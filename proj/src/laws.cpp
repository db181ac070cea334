// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "rectlaw/laws.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rectlaw/error.hpp"
#include "rectlaw/logmath.hpp"

namespace rectlaw {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_ascending(std::span<const double> x, std::size_t min_points) {
  if (x.size() < min_points) {
    throw DomainError("grid needs at least " + std::to_string(min_points) + " points, got " +
                      std::to_string(x.size()));
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw DomainError("grid must be strictly ascending");
  }
}

std::string describe(double x, double v) {
  std::ostringstream os;
  os.precision(6);
  os << "x=" << x << " value=" << v;
  return os.str();
}

}  // namespace

std::string_view to_string(LawKind kind) {
  return kind == LawKind::Rectified ? "rectified" : "vanilla";
}

LawKind parse_law_kind(std::string_view text) {
  if (text == "rectified") return LawKind::Rectified;
  if (text == "vanilla") return LawKind::Vanilla;
  throw DomainError("unknown law '" + std::string(text) + "'");
}

LawKind kind_of(const LawParams& p) {
  return std::holds_alternative<RectifiedParams>(p) ? LawKind::Rectified : LawKind::Vanilla;
}

double eval_rectified(const RectifiedParams& p, double d) {
  if (d < 0.0) throw DomainError("dataset size must be non-negative");
  const double denom = p.d_l + std::pow(d, p.beta);
  if (!(denom > 0.0)) throw DomainError("rectified law is singular at D = 0 when d_l = 0");
  return p.b / denom + p.e;
}

double eval_vanilla(const VanillaParams& p, double d) {
  if (!(d > 0.0)) throw DomainError("vanilla law needs D > 0");
  return std::pow(p.b / std::pow(d, p.beta) + p.e, p.alpha);
}

double eval_law(const LawParams& p, double d) {
  return std::visit(overloaded{[d](const RectifiedParams& r) { return eval_rectified(r, d); },
                               [d](const VanillaParams& v) { return eval_vanilla(v, d); }},
                    p);
}

double loglog(const RectifiedParams& p, double x) {
  const double log_denom = lse(safe_log(p.d_l), p.beta * x);
  return lse(std::log(p.b) - log_denom, safe_log(p.e));
}

double loglog(const VanillaParams& p, double x) {
  return p.alpha * lse(std::log(p.b) - p.beta * x, safe_log(p.e));
}

double loglog(const LawParams& p, double x) {
  return std::visit([x](const auto& q) { return loglog(q, x); }, p);
}

double loglog_slope(const RectifiedParams& p, double x) {
  // -beta B t / ((d_l + t)(B + E d_l + E t)) with t = exp(beta x), in logs.
  const double log_dt = lse(safe_log(p.d_l), p.beta * x);
  const double log_c = lse(std::log(p.b), safe_log(p.e) + log_dt);
  return -std::exp(std::log(p.beta) + std::log(p.b) + p.beta * x - log_dt - log_c);
}

double loglog_slope(const VanillaParams& p, double x) {
  // -alpha beta / (1 + (E/B) exp(beta x))
  const double u = std::log(p.b) - p.beta * x - safe_log(p.e);
  return -p.alpha * p.beta / (1.0 + std::exp(-u));
}

double loglog_curvature(const RectifiedParams& p, double x) {
  // f'' = f' * beta * (d_l C - E t^2) / ((d_l + t)(C + E t)),  C = B + E d_l
  const double log_dt = lse(safe_log(p.d_l), p.beta * x);
  const double log_c = lse(std::log(p.b), safe_log(p.e) + log_dt);
  const double log_a = log_dt + log_c;
  const double big_c = p.b + p.e * p.d_l;
  const double ratio = std::exp(safe_log(p.d_l * big_c) - log_a) -
                       std::exp(safe_log(p.e) + 2.0 * p.beta * x - log_a);
  return loglog_slope(p, x) * p.beta * ratio;
}

double inflection_x0(const RectifiedParams& p) {
  if (!(p.d_l > 0.0) || !(p.e > 0.0)) {
    throw DomainError("inflection point undefined unless d_l > 0 and e > 0");
  }
  return std::log(p.d_l * p.d_l + p.b * p.d_l / p.e) / (2.0 * p.beta);
}

SlopeCheck check_vanilla_slope(const VanillaParams& p, std::span<const double> x_grid) {
  require_ascending(x_grid, 3);
  std::vector<double> f(x_grid.size());
  std::transform(x_grid.begin(), x_grid.end(), f.begin(), [&](double x) { return loglog(p, x); });

  std::vector<double> slope;
  for (std::size_t i = 1; i + 1 < x_grid.size(); ++i) {
    slope.push_back((f[i + 1] - f[i - 1]) / (x_grid[i + 1] - x_grid[i - 1]));
  }
  double scale = 0.0;
  for (double s : slope) scale = std::max(scale, std::abs(s));
  const double tol = 1e-6 * scale;

  SlopeCheck out;
  for (std::size_t j = 0; j < slope.size(); ++j) {
    if (!(slope[j] < 0.0)) out.violations.push_back("non-negative slope at " + describe(x_grid[j + 1], slope[j]));
    if (j > 0 && slope[j] < slope[j - 1] - tol) {
      out.violations.push_back("slope decreases at " + describe(x_grid[j + 1], slope[j] - slope[j - 1]));
    }
  }
  out.pass = out.violations.empty();
  return out;
}

InflectionCheck check_rectified_inflection(const RectifiedParams& p, std::span<const double> x_grid) {
  require_ascending(x_grid, 3);
  const double x0 = inflection_x0(p);
  const std::size_t n = x_grid.size();
  if (!(x_grid[1] < x0 && x0 < x_grid[n - 2])) {
    throw DomainError("grid does not bracket the inflection point x0=" + std::to_string(x0));
  }

  std::vector<double> f(n);
  std::transform(x_grid.begin(), x_grid.end(), f.begin(), [&](double x) { return loglog(p, x); });

  struct Sample {
    double x, curvature, step;
  };
  std::vector<Sample> samples;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x_grid[i] - x_grid[i - 1];
    const double hr = x_grid[i + 1] - x_grid[i];
    const double d2 = 2.0 * ((f[i + 1] - f[i]) / hr - (f[i] - f[i - 1]) / hl) / (hl + hr);
    samples.push_back({x_grid[i], d2, std::max(hl, hr)});
  }

  InflectionCheck out;
  for (const auto& s : samples) {
    if (std::abs(s.x - x0) <= s.step) continue;
    if (s.x < x0 && !(s.curvature < 0.0)) {
      out.violations.push_back("curvature not negative below x0 at " + describe(s.x, s.curvature));
    } else if (s.x > x0 && !(s.curvature > 0.0)) {
      out.violations.push_back("curvature not positive above x0 at " + describe(s.x, s.curvature));
    }
  }

  bool found = false;
  for (std::size_t j = 0; j + 1 < samples.size(); ++j) {
    const auto& a = samples[j];
    const auto& b = samples[j + 1];
    if (a.curvature < 0.0 && b.curvature >= 0.0) {
      out.x0_estimate = a.x + (b.x - a.x) * (-a.curvature) / (b.curvature - a.curvature);
      const double step = std::max(a.step, b.step);
      if (std::abs(out.x0_estimate - x0) > 2.0 * step) {
        out.violations.push_back("zero crossing " + std::to_string(out.x0_estimate) +
                                 " too far from x0=" + std::to_string(x0));
      }
      found = true;
      break;
    }
  }
  if (!found) out.violations.push_back("no sign change of curvature on the grid");
  out.pass = out.violations.empty();
  return out;
}

AuditReport audit_law(LawKind kind, int draws, std::uint64_t seed, std::size_t grid_points) {
  if (draws < 1) throw DomainError("audit needs at least one draw");
  if (grid_points < 5) throw DomainError("audit grid needs at least 5 points");
  std::mt19937_64 rng(seed);
  auto log_uniform = [&rng](double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
  };
  auto uniform = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  AuditReport report;
  report.total = draws;
  for (int i = 0; i < draws; ++i) {
    AuditFailure f;
    if (kind == LawKind::Rectified) {
      const RectifiedParams p{.b = log_uniform(0.1, 1e4),
                              .d_l = log_uniform(0.01, 1e5),
                              .beta = uniform(0.1, 2.0),
                              .e = log_uniform(0.05, 10.0)};
      const double x0 = inflection_x0(p);
      const auto grid = linspace(x0 - 4.0 / p.beta, x0 + 4.0 / p.beta, grid_points);
      f.params = p;
      f.violations = check_rectified_inflection(p, grid).violations;
    } else {
      const VanillaParams p{.b = log_uniform(0.1, 1e4),
                            .beta = uniform(0.1, 2.0),
                            .e = log_uniform(0.05, 10.0),
                            .alpha = uniform(0.1, 3.0)};
      const double mid = std::log(p.b / p.e) / p.beta;
      const double half = std::log(1e6) / p.beta;
      const auto grid = linspace(mid - half, mid + half, grid_points);
      f.params = p;
      f.violations = check_vanilla_slope(p, grid).violations;
    }
    if (f.violations.empty()) {
      ++report.passed;
    } else {
      report.failures.push_back(std::move(f));
    }
  }
  return report;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace rectlaw
