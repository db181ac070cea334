// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rectlaw/ats.hpp"
#include "rectlaw/curves.hpp"
#include "rectlaw/error.hpp"
#include "rectlaw/fitting.hpp"
#include "rectlaw/ratio.hpp"

namespace rectlaw {

enum class Method { ModelSize, ZeroShot, SubTuning, Ats, OurFit, VanillaFit, AtsFamily };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

/// Ratios 1/8, 1/16, ..., 1/512 in that order.
std::vector<Ratio> standard_budget_ratios();

struct SelectionTask {
  std::string dataset_id;
  std::vector<std::string> model_ids;
  Ratio budget_ratio{1, 1};
  std::int64_t full_size = 1638400;
  Method method = Method::Ats;

  void validate() const;
};

/// Settings for the methods that need them. `ats.full_size` and
/// `ats.budget_ratio` are overridden from the task.
struct SelectionConfigs {
  AtsConfig ats;
  FitConfig fit;
  bool fit_zero_shot = true;  ///< see score_law_fit
};

struct SelectionReport {
  Method method = Method::Ats;
  std::string dataset;
  Ratio gamma{1, 1};
  std::map<std::string, double> scores;      ///< -inf for models a method declines to score
  std::map<std::string, double> truth_loss;  ///< measured loss at full_size
  double pearcorr = 0.0;                     ///< NaN when undefined
  double relacc = 0.0;
  std::string selected;
};

/// Scoring failure attributed to one model.
class ModelError : public Error {
 public:
  ModelError(std::string model, const std::string& what) : Error(model + ": " + what), model_(std::move(model)) {}
  const std::string& model() const noexcept { return model_; }

 private:
  std::string model_;
};

double score_model_size(const ModelMeta& meta);
/// -(zero-shot loss). Throws ReferenceError without a size-0 point.
double score_zero_shot(const LossCurve& curve);
/// -(loss at the largest grid size <= floor(gamma * full_size)).
double score_sub_tuning(const LossCurve& curve, Ratio gamma, std::int64_t full_size);
/// Fits a law on the halving sequence down to size 200 and returns -log Lhat(full_size).
/// With `with_zero_shot`, the rectified fit also gets the size-0 point when the
/// curve has one; the vanilla law diverges there and never uses it.
double score_law_fit(LawKind kind, const LossCurve& curve, Ratio gamma, std::int64_t full_size,
                     const FitConfig& cfg, bool with_zero_shot = true);

/// Pearson correlation. Throws DomainError on length mismatch, fewer than 2
/// values, or zero variance.
double pearcorr(std::span<const double> scores, std::span<const double> perf);

/// Argmax of `scores`; ties go to the lexicographically smallest id.
std::string select_best(const std::map<std::string, double>& scores);

/// (max L - L[argmax score]) / (max L - min L).
double relacc(const std::map<std::string, double>& scores, const std::map<std::string, double>& losses);

/// Models with n_params strictly below `max_params`, order preserved.
std::vector<ModelMeta> stratify(std::span<const ModelMeta> models, std::int64_t max_params);

/// Largest model of each family (ties by smallest id), in first-seen family order.
std::vector<std::string> family_representatives(std::span<const ModelMeta> models);

SelectionReport ats_family(const CurveStore& store, const SelectionTask& task, const AtsConfig& ats_cfg);

struct FlopsEstimate {
  double c_full = 0.0;
  double c_sub = 0.0;
  double c_ats = 0.0;
};

/// 6 N D T H summed over models; AtS sums the halving steps gamma D / 2^i
/// that stay at or above 200 samples.
FlopsEstimate flops_estimates(std::span<const ModelMeta> models, std::int64_t d, std::int64_t t, std::int64_t h,
                              Ratio gamma);

SelectionReport run_selection(const CurveStore& store, const SelectionTask& task, const SelectionConfigs& cfgs);

/// JSON object with keys method, dataset, gamma, scores, truth_loss, pearcorr,
/// relacc, selected (in that order). Non-finite numbers become null.
std::string to_json(const SelectionReport& report, int indent = 2);

/// One block per dataset: rows (metric, gamma), one column per method, values
/// in percent with one decimal.
void write_table_csv(std::ostream& out, std::span<const SelectionReport> reports);

}  // namespace rectlaw
