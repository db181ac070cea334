// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "rectlaw/selection.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rectlaw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::int64_t kSmallestSubset = 200;

struct MethodName {
  Method method;
  std::string_view name;
};
constexpr MethodName kMethodNames[] = {
    {Method::ModelSize, "model_size"}, {Method::ZeroShot, "zero_shot"},   {Method::SubTuning, "sub_tuning"},
    {Method::Ats, "ats"},              {Method::OurFit, "our_fit"},       {Method::VanillaFit, "vanilla_fit"},
    {Method::AtsFamily, "ats_family"},
};

/// Pearson r against negated truth loss, or NaN when undefined.
double pearcorr_or_nan(const std::map<std::string, double>& scores, const std::map<std::string, double>& truth) {
  std::vector<double> s, perf;
  for (const auto& [id, v] : scores) {
    if (!std::isfinite(v)) continue;
    s.push_back(v);
    perf.push_back(-truth.at(id));
  }
  try {
    return pearcorr(s, perf);
  } catch (const DomainError&) {
    return kNaN;
  }
}

nlohmann::ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  for (const auto& [method, name] : kMethodNames) {
    if (name == text) return method;
  }
  throw DomainError("unknown selection method '" + std::string(text) + "'");
}

std::vector<Ratio> standard_budget_ratios() {
  std::vector<Ratio> out;
  for (std::int64_t den = 8; den <= 512; den *= 2) out.emplace_back(1, den);
  return out;
}

void SelectionTask::validate() const {
  if (model_ids.empty()) throw DomainError("selection task has no models");
  if (budget_ratio.num() <= 0 || budget_ratio.num() > budget_ratio.den()) {
    throw DomainError("budget ratio must lie in (0, 1]");
  }
  if (full_size <= 0) throw DomainError("full size must be positive");
}

double score_model_size(const ModelMeta& meta) {
  if (meta.n_params <= 0) throw DomainError(meta.model_id + ": n_params must be positive");
  return std::log(static_cast<double>(meta.n_params));
}

double score_zero_shot(const LossCurve& curve) {
  const auto loss = curve.loss_at(0);
  if (!loss) throw ReferenceError(curve.model_id() + "/" + curve.dataset_id() + " has no zero-shot point");
  return -*loss;
}

double score_sub_tuning(const LossCurve& curve, Ratio gamma, std::int64_t full_size) {
  const std::int64_t budget = gamma.floor_times(full_size);
  const auto seq = halving_sequence(curve, budget);
  if (seq.empty()) {
    throw InsufficientDataError(curve.model_id() + "/" + curve.dataset_id() + ": no grid size <= " +
                                std::to_string(budget));
  }
  return -seq.front().loss;
}

double score_law_fit(LawKind kind, const LossCurve& curve, Ratio gamma, std::int64_t full_size,
                     const FitConfig& cfg, bool with_zero_shot) {
  std::vector<LossPoint> pts = halving_sequence(curve, gamma.floor_times(full_size), kSmallestSubset);
  if (with_zero_shot && kind == LawKind::Rectified) {
    if (const auto l0 = curve.loss_at(0)) pts.push_back({0, *l0});
  }
  const FitResult fit = fit_law(kind, pts, cfg);
  return -loglog(fit.params, std::log(static_cast<double>(full_size)));
}

double pearcorr(std::span<const double> scores, std::span<const double> perf) {
  if (scores.size() != perf.size()) throw DomainError("pearcorr needs equal lengths");
  const std::size_t n = scores.size();
  if (n < 2) throw DomainError("pearcorr needs at least 2 values");
  double ms = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ms += scores[i];
    mp += perf[i];
  }
  ms /= static_cast<double>(n);
  mp /= static_cast<double>(n);
  double sss = 0.0, spp = 0.0, ssp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = scores[i] - ms, b = perf[i] - mp;
    sss += a * a;
    spp += b * b;
    ssp += a * b;
  }
  if (!(sss > 0.0) || !(spp > 0.0)) throw DomainError("pearcorr undefined: zero variance");
  return std::clamp(ssp / std::sqrt(sss * spp), -1.0, 1.0);
}

std::string select_best(const std::map<std::string, double>& scores) {
  if (scores.empty()) throw DomainError("cannot select from an empty score set");
  // std::map iterates in lexicographic order, so strict > keeps the smallest id on ties.
  auto best = scores.begin();
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

double relacc(const std::map<std::string, double>& scores, const std::map<std::string, double>& losses) {
  if (losses.size() < 2) throw DomainError("relacc needs at least 2 models");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [id, l] : losses) {
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  if (!(hi > lo)) throw DomainError("relacc undefined: all losses equal");
  const std::string chosen = select_best(scores);
  auto it = losses.find(chosen);
  if (it == losses.end()) throw ReferenceError("no loss for selected model " + chosen);
  return (hi - it->second) / (hi - lo);
}

std::vector<ModelMeta> stratify(std::span<const ModelMeta> models, std::int64_t max_params) {
  if (max_params <= 0) throw DomainError("max_params must be positive");
  std::vector<ModelMeta> out;
  std::copy_if(models.begin(), models.end(), std::back_inserter(out),
               [max_params](const ModelMeta& m) { return m.n_params < max_params; });
  if (out.empty()) throw InsufficientDataError("no model below " + std::to_string(max_params) + " parameters");
  return out;
}

std::vector<std::string> family_representatives(std::span<const ModelMeta> models) {
  std::vector<std::string> families;
  std::map<std::string, const ModelMeta*> best;
  for (const auto& m : models) {
    if (m.family.empty()) throw ValidationError(m.model_id + " has no family tag");
    auto [it, inserted] = best.try_emplace(m.family, &m);
    if (inserted) {
      families.push_back(m.family);
      continue;
    }
    const ModelMeta* cur = it->second;
    if (m.n_params > cur->n_params || (m.n_params == cur->n_params && m.model_id < cur->model_id)) it->second = &m;
  }
  std::vector<std::string> out;
  for (const auto& f : families) out.push_back(best.at(f)->model_id);
  return out;
}

SelectionReport ats_family(const CurveStore& store, const SelectionTask& task, const AtsConfig& ats_cfg) {
  task.validate();
  std::vector<ModelMeta> metas;
  for (const auto& id : task.model_ids) metas.push_back(store.model(id));
  const auto reps = family_representatives(metas);

  AtsConfig cfg = ats_cfg;
  cfg.full_size = task.full_size;
  cfg.budget_ratio = task.budget_ratio;

  SelectionReport report;
  report.method = Method::AtsFamily;
  report.dataset = task.dataset_id;
  report.gamma = task.budget_ratio;
  for (const auto& id : task.model_ids) {
    const auto& curve = store.curve(id, task.dataset_id);
    report.truth_loss[id] = curve.require_loss_at(task.full_size);
    report.scores[id] = kNegInf;
  }
  for (const auto& id : reps) {
    try {
      report.scores[id] = run_ats(store.curve(id, task.dataset_id), cfg).score;
    } catch (const Error& e) {
      throw ModelError(id, e.what());
    }
  }
  report.pearcorr = pearcorr_or_nan(report.scores, report.truth_loss);
  report.selected = select_best(report.scores);
  report.relacc = relacc(report.scores, report.truth_loss);
  return report;
}

FlopsEstimate flops_estimates(std::span<const ModelMeta> models, std::int64_t d, std::int64_t t, std::int64_t h,
                              Ratio gamma) {
  if (d <= 0 || t <= 0 || h <= 0 || gamma.num() <= 0) throw DomainError("FLOPs inputs must be positive");
  FlopsEstimate out;
  const double g = gamma.value();
  const double sub_d = g * static_cast<double>(d);
  for (const auto& m : models) {
    const double per_sample = 6.0 * static_cast<double>(m.n_params) * static_cast<double>(t) * static_cast<double>(h);
    out.c_full += per_sample * static_cast<double>(d);
    for (double di = sub_d; di >= static_cast<double>(kSmallestSubset); di /= 2.0) out.c_ats += per_sample * di;
  }
  out.c_sub = g * out.c_full;
  return out;
}

SelectionReport run_selection(const CurveStore& store, const SelectionTask& task, const SelectionConfigs& cfgs) {
  task.validate();
  if (task.method == Method::AtsFamily) return ats_family(store, task, cfgs.ats);

  AtsConfig ats_cfg = cfgs.ats;
  ats_cfg.full_size = task.full_size;
  ats_cfg.budget_ratio = task.budget_ratio;

  SelectionReport report;
  report.method = task.method;
  report.dataset = task.dataset_id;
  report.gamma = task.budget_ratio;
  for (const auto& id : task.model_ids) {
    try {
      const auto& curve = store.curve(id, task.dataset_id);
      report.truth_loss[id] = curve.require_loss_at(task.full_size);
      double score = 0.0;
      switch (task.method) {
        case Method::ModelSize: score = score_model_size(store.model(id)); break;
        case Method::ZeroShot: score = score_zero_shot(curve); break;
        case Method::SubTuning: score = score_sub_tuning(curve, task.budget_ratio, task.full_size); break;
        case Method::Ats: score = run_ats(curve, ats_cfg).score; break;
        case Method::OurFit:
          score = score_law_fit(LawKind::Rectified, curve, task.budget_ratio, task.full_size, cfgs.fit,
                                cfgs.fit_zero_shot);
          break;
        case Method::VanillaFit:
          score = score_law_fit(LawKind::Vanilla, curve, task.budget_ratio, task.full_size, cfgs.fit);
          break;
        case Method::AtsFamily: break;
      }
      report.scores[id] = score;
    } catch (const ModelError&) {
      throw;
    } catch (const Error& e) {
      throw ModelError(id, e.what());
    }
  }
  report.pearcorr = pearcorr_or_nan(report.scores, report.truth_loss);
  report.selected = select_best(report.scores);
  report.relacc = relacc(report.scores, report.truth_loss);
  return report;
}

std::string to_json(const SelectionReport& report, int indent) {
  nlohmann::ordered_json j;
  j["method"] = to_string(report.method);
  j["dataset"] = report.dataset;
  j["gamma"] = report.gamma.str();
  nlohmann::ordered_json scores = nlohmann::ordered_json::object();
  for (const auto& [id, v] : report.scores) scores[id] = number_or_null(v);
  j["scores"] = std::move(scores);
  nlohmann::ordered_json truth = nlohmann::ordered_json::object();
  for (const auto& [id, v] : report.truth_loss) truth[id] = v;
  j["truth_loss"] = std::move(truth);
  j["pearcorr"] = number_or_null(report.pearcorr);
  j["relacc"] = number_or_null(report.relacc);
  j["selected"] = report.selected;
  return j.dump(indent);
}

void write_table_csv(std::ostream& out, std::span<const SelectionReport> reports) {
  std::vector<std::string> datasets;
  std::vector<Method> methods;
  std::vector<Ratio> gammas;
  for (const auto& r : reports) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    if (std::find(gammas.begin(), gammas.end(), r.gamma) == gammas.end()) gammas.push_back(r.gamma);
  }

  auto cell = [](double v) {
    if (!std::isfinite(v)) return std::string{};
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << 100.0 * v;
    return os.str();
  };
  auto find = [&](const std::string& ds, Method m, Ratio g) -> const SelectionReport* {
    for (const auto& r : reports) {
      if (r.dataset == ds && r.method == m && r.gamma == g) return &r;
    }
    return nullptr;
  };

  out << "dataset,metric,gamma";
  for (Method m : methods) out << ',' << to_string(m);
  out << '\n';
  for (const auto& ds : datasets) {
    for (const char* metric : {"pearcorr", "relacc"}) {
      const bool is_corr = std::string_view(metric) == "pearcorr";
      std::vector<double> sum(methods.size(), 0.0);
      std::vector<int> count(methods.size(), 0);
      for (const auto& g : gammas) {
        out << ds << ',' << metric << ',' << g.str();
        for (std::size_t k = 0; k < methods.size(); ++k) {
          const auto* r = find(ds, methods[k], g);
          const double v = r == nullptr ? kNaN : (is_corr ? r->pearcorr : r->relacc);
          if (std::isfinite(v)) {
            sum[k] += v;
            count[k] += 1;
          }
          out << ',' << cell(v);
        }
        out << '\n';
      }
      out << ds << ',' << metric << ",avg";
      for (std::size_t k = 0; k < methods.size(); ++k) out << ',' << cell(count[k] ? sum[k] / count[k] : kNaN);
      out << '\n';
    }
  }
}

}  // namespace rectlaw
