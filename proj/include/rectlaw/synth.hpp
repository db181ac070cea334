// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rectlaw/curves.hpp"
#include "rectlaw/laws.hpp"

namespace rectlaw {

struct SynthSpec {
  LawParams law = RectifiedParams{};
  std::vector<std::int64_t> sizes;  ///< ascending, positive
  double noise_sigma = 0.0;         ///< std of Gaussian noise added to log loss
  std::uint64_t seed = 0;
  std::string model_id = "synthetic";
  std::string dataset_id = "synthetic";
};

/// loss_i = exp(log Lhat(size_i) + eps_i), eps_i ~ N(0, noise_sigma^2).
LossCurve generate(const SynthSpec& spec);

/// exp(inflection_x0(p)): the size where the curve enters its power phase.
double phase_boundary_size(const RectifiedParams& p);

/// 200 * 2^i for i = 0..13, the grid of the bundled loss tables.
std::vector<std::int64_t> paper_grid();

}  // namespace rectlaw
