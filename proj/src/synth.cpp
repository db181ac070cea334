// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "rectlaw/synth.hpp"

#include <cmath>
#include <random>

#include "rectlaw/error.hpp"

namespace rectlaw {

LossCurve generate(const SynthSpec& spec) {
  if (spec.sizes.empty()) throw DomainError("synthetic curve needs at least one size");
  if (!(spec.noise_sigma >= 0.0)) throw DomainError("noise_sigma must be non-negative");
  for (std::size_t i = 0; i < spec.sizes.size(); ++i) {
    if (spec.sizes[i] <= 0 || (i > 0 && spec.sizes[i] <= spec.sizes[i - 1])) {
      throw DomainError("synthetic sizes must be positive and strictly ascending");
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<LossPoint> pts;
  pts.reserve(spec.sizes.size());
  for (auto size : spec.sizes) {
    double log_loss = loglog(spec.law, std::log(static_cast<double>(size)));
    if (spec.noise_sigma > 0.0) log_loss += spec.noise_sigma * noise(rng);
    pts.push_back({size, std::exp(log_loss)});
  }
  return LossCurve(spec.model_id, spec.dataset_id, std::move(pts));
}

double phase_boundary_size(const RectifiedParams& p) { return std::exp(inflection_x0(p)); }

std::vector<std::int64_t> paper_grid() {
  std::vector<std::int64_t> out;
  for (std::int64_t s = 200; s <= 1638400; s *= 2) out.push_back(s);
  return out;
}

}  // namespace rectlaw
