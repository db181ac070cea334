// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "rectlaw/ats.hpp"
#include "rectlaw/curves.hpp"
#include "rectlaw/fitting.hpp"
#include "rectlaw/laws.hpp"
#include "rectlaw/selection.hpp"
#include "rectlaw/synth.hpp"

namespace rectlaw::cli {

namespace {

using Json = nlohmann::ordered_json;

/// Bad flags, unreadable files, unknown ids: exit 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
  if (!f) throw UsageError("write to '" + path + "' failed");
}

CurveStore load_curves(const std::string& path) {
  std::istringstream in(read_file(path));
  return parse_csv(in);
}

CurveStore load_store(const std::string& curves_path, const std::string& meta_path) {
  std::istringstream c(read_file(curves_path));
  std::istringstream m(read_file(meta_path));
  return parse_csv(c, m);
}

Ratio parse_gamma(const std::string& text) {
  Ratio g;
  try {
    g = Ratio::parse(text);
  } catch (const Error& e) {
    throw UsageError(std::string("--gamma: ") + e.what());
  }
  if (g.num() <= 0 || g.num() > g.den()) throw UsageError("--gamma must lie in (0, 1], got '" + text + "'");
  return g;
}

/// The dataset to use: the flag when given, else the only dataset in the store.
std::string pick_dataset(const CurveStore& store, const std::string& flag) {
  const auto ds = store.datasets();
  if (!flag.empty()) {
    if (std::find(ds.begin(), ds.end(), flag) == ds.end()) throw UsageError("unknown dataset '" + flag + "'");
    return flag;
  }
  if (ds.size() != 1) throw UsageError("input holds " + std::to_string(ds.size()) + " datasets; pass --dataset");
  return ds.front();
}

Json params_json(const LawParams& p) {
  Json j;
  if (const auto* r = std::get_if<RectifiedParams>(&p)) {
    j["b"] = r->b;
    j["d_l"] = r->d_l;
    j["beta"] = r->beta;
    j["e"] = r->e;
  } else {
    const auto& v = std::get<VanillaParams>(p);
    j["b"] = v.b;
    j["beta"] = v.beta;
    j["e"] = v.e;
    j["alpha"] = v.alpha;
  }
  return j;
}

Json fit_json(LawKind kind, const std::string& model, const std::string& dataset, const FitResult& r,
              std::uint64_t seed) {
  Json j;
  j["law"] = to_string(kind);
  j["model"] = model;
  j["dataset"] = dataset;
  j["params"] = params_json(r.params);
  j["objective"] = r.objective;
  j["rmsd"] = r.rmsd;
  j["converged"] = r.converged;
  j["seed"] = seed;
  j["start_index"] = r.start_index;
  j["iterations"] = r.iterations;
  return j;
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// ---- commands -------------------------------------------------------------

struct FitArgs {
  std::string curves, law = "rectified", model, dataset, out;
  int starts = 50;
  std::uint64_t seed = 0;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  const CurveStore store = load_curves(a.curves);
  if (!store.has_model(a.model) && std::none_of(store.curves().begin(), store.curves().end(), [&](const LossCurve& c) {
        return c.model_id() == a.model;
      })) {
    throw UsageError("model '" + a.model + "' not found in " + a.curves);
  }
  std::string dataset = a.dataset;
  if (dataset.empty()) {
    for (const auto& c : store.curves()) {
      if (c.model_id() != a.model) continue;
      if (!dataset.empty()) throw UsageError("model '" + a.model + "' has several datasets; pass --dataset");
      dataset = c.dataset_id();
    }
  }
  if (!store.has_curve(a.model, dataset)) {
    throw UsageError("model '" + a.model + "' has no curve on dataset '" + dataset + "'");
  }

  std::vector<LawKind> kinds;
  if (a.law == "both") {
    kinds = {LawKind::Rectified, LawKind::Vanilla};
  } else {
    kinds = {parse_law_kind(a.law)};
  }
  FitConfig cfg;
  cfg.n_starts = a.starts;
  cfg.seed = a.seed;
  const auto pts = store.curve(a.model, dataset).nonzero_points();

  Json results = Json::array();
  for (LawKind k : kinds) results.push_back(fit_json(k, a.model, dataset, fit_law(k, pts, cfg), a.seed));
  const Json& doc = a.law == "both" ? results : results.front();
  write_output(a.out, doc.dump(2) + "\n", out);
  return 0;
}

struct AtsArgs {
  std::string curves, dataset, model, gamma = "1", out;
  int k = 3;
  double delta = 5.0;
  std::int64_t full_size = 1638400;
  std::int64_t target_size = 0;
  bool sample_std = false;
};

int cmd_ats(const AtsArgs& a, std::ostream& out) {
  const CurveStore store = load_curves(a.curves);
  const std::string dataset = pick_dataset(store, a.dataset);
  AtsConfig cfg;
  cfg.k = a.k;
  cfg.delta = a.delta;
  cfg.full_size = a.full_size;
  cfg.budget_ratio = parse_gamma(a.gamma);
  if (a.target_size > 0) cfg.target_size = a.target_size;
  if (a.sample_std) cfg.residual_std = ResidualStd::Sample;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }

  std::vector<std::string> models;
  if (a.model.empty()) {
    models = store.models_on(dataset);
  } else {
    if (!store.has_curve(a.model, dataset)) {
      throw UsageError("model '" + a.model + "' has no curve on dataset '" + dataset + "'");
    }
    models = {a.model};
  }

  std::ostringstream csv;
  csv << "model,dataset,gamma,n_accepted,stopped_early,slope,intercept,predicted_log_loss,score\n";
  for (const auto& id : models) {
    AtsResult r;
    try {
      r = run_ats(store.curve(id, dataset), cfg);
    } catch (const Error& e) {
      throw ModelError(id, e.what());
    }
    csv << id << ',' << dataset << ',' << cfg.budget_ratio.str() << ',' << r.accepted.size() << ','
        << (r.stopped_early ? "true" : "false") << ',' << fixed(r.line.slope, 8) << ',' << fixed(r.line.intercept, 8)
        << ',' << fixed(r.predicted_log_loss, 8) << ',' << fixed(r.score, 8) << '\n';
  }
  write_output(a.out, csv.str(), out);
  return 0;
}

struct SelectArgs {
  std::string curves, meta, dataset, out, table;
  std::vector<std::string> gammas{"1/8"};
  std::vector<std::string> methods{"ats"};
  int k = 3;
  double delta = 5.0;
  std::int64_t full_size = 1638400;
  std::int64_t max_params = 0;
  int starts = 50;
  std::uint64_t seed = 0;
};

int cmd_select(const SelectArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<Ratio> gammas;
  for (const auto& g : a.gammas) gammas.push_back(parse_gamma(g));
  std::vector<Method> methods;
  for (const auto& m : a.methods) {
    try {
      methods.push_back(parse_method(m));
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  if (a.full_size <= 0) throw UsageError("--full-size must be positive");

  const CurveStore store = load_store(a.curves, a.meta);
  const std::string dataset = pick_dataset(store, a.dataset);

  SelectionTask task;
  task.dataset_id = dataset;
  task.full_size = a.full_size;
  if (a.max_params > 0) {
    std::vector<ModelMeta> metas;
    for (const auto& id : store.models_on(dataset)) metas.push_back(store.model(id));
    for (const auto& m : stratify(metas, a.max_params)) task.model_ids.push_back(m.model_id);
  } else {
    task.model_ids = store.models_on(dataset);
  }

  SelectionConfigs cfgs;
  cfgs.ats.k = a.k;
  cfgs.ats.delta = a.delta;
  cfgs.fit.n_starts = a.starts;
  cfgs.fit.seed = a.seed;

  std::vector<SelectionReport> reports;
  int failures = 0;
  for (Method m : methods) {
    for (Ratio g : gammas) {
      task.method = m;
      task.budget_ratio = g;
      try {
        reports.push_back(run_selection(store, task, cfgs));
      } catch (const ModelError& e) {
        err << "error: " << to_string(m) << " at gamma " << g.str() << ": model " << e.what() << '\n';
        ++failures;
      }
    }
  }

  if (reports.size() == 1 && failures == 0) {
    write_output(a.out, to_json(reports.front()) + "\n", out);
  } else {
    std::string text = "[";
    for (std::size_t i = 0; i < reports.size(); ++i) text += (i ? ",\n" : "\n") + to_json(reports[i]);
    text += reports.empty() ? "]\n" : "\n]\n";
    write_output(a.out, text, out);
  }
  if (!a.table.empty()) {
    std::ostringstream csv;
    write_table_csv(csv, reports);
    write_output(a.table, csv.str(), out);
  }
  return failures == 0 ? 0 : 1;
}

struct RmsdArgs {
  std::vector<std::string> curves;
  std::string out;
  int starts = 50;
  std::uint64_t seed = 0;
};

int cmd_rmsd(const RmsdArgs& a, std::ostream& out, std::ostream& err) {
  FitConfig cfg;
  cfg.n_starts = a.starts;
  cfg.seed = a.seed;
  std::vector<RmsdRow> rows;
  if (a.curves.empty()) {
    rows = rmsd_report(embedded_fixtures(), cfg);
  } else {
    for (const auto& path : a.curves) {
      auto part = rmsd_report(load_curves(path), cfg);
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  std::ostringstream csv;
  write_rmsd_csv(csv, rows);
  write_output(a.out, csv.str(), out);

  double sum_ours = 0.0, sum_van = 0.0;
  int ok = 0, better = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      err << "error: " << r.model << '/' << r.dataset << ": " << r.error << '\n';
      continue;
    }
    ++ok;
    sum_ours += r.rmsd_ours;
    sum_van += r.rmsd_vanilla;
    if (r.rmsd_ours <= r.rmsd_vanilla + 1e-3) ++better;
  }
  if (ok > 0) {
    err << "pairs " << ok << ", mean rmsd rectified " << fixed(sum_ours / ok, 4) << ", vanilla "
        << fixed(sum_van / ok, 4) << ", rectified within 0.001 of vanilla or better on " << better << '\n';
  }
  return ok == static_cast<int>(rows.size()) ? 0 : 1;
}

struct TheoremArgs {
  std::string law = "rectified";
  int draws = 1000;
  std::uint64_t seed = 0;
};

int cmd_theorem_check(const TheoremArgs& a, std::ostream& out) {
  if (a.draws < 1) throw UsageError("--draws must be at least 1");
  const LawKind kind = parse_law_kind(a.law);
  const AuditReport r = audit_law(kind, a.draws, a.seed);
  out << r.passed << '/' << r.total << " pass\n";
  for (const auto& f : r.failures) {
    out << "fail " << params_json(f.params).dump() << ": " << f.violations.front() << '\n';
  }
  return r.failures.empty() ? 0 : 1;
}

struct SynthArgs {
  std::string law = "rectified", out, model = "synthetic", dataset = "synthetic";
  double b = 100.0, d_l = 100.0, beta = 0.5, e = 1.0, alpha = 1.0, noise = 0.0;
  std::vector<std::int64_t> sizes;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SynthSpec spec;
  const LawKind kind = parse_law_kind(a.law);
  if (!(a.b > 0.0 && a.beta > 0.0 && a.e >= 0.0 && a.d_l >= 0.0 && a.alpha > 0.0)) {
    throw UsageError("law parameters must be positive (d_l and e may be 0)");
  }
  if (kind == LawKind::Rectified) {
    spec.law = RectifiedParams{.b = a.b, .d_l = a.d_l, .beta = a.beta, .e = a.e};
  } else {
    spec.law = VanillaParams{.b = a.b, .beta = a.beta, .e = a.e, .alpha = a.alpha};
  }
  spec.sizes = a.sizes.empty() ? paper_grid() : a.sizes;
  spec.noise_sigma = a.noise;
  spec.seed = a.seed;
  spec.model_id = a.model;
  spec.dataset_id = a.dataset;
  LossCurve curve;
  try {
    curve = generate(spec);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  std::ostringstream csv;
  const std::vector<LossCurve> curves{curve};
  write_curves_csv(csv, curves);
  write_output(a.out, csv.str(), out);
  return 0;
}

struct ParetoArgs {
  std::string curves, meta, dataset, out;
  std::int64_t t = 1, h = 1;
  std::int64_t full_size = 1638400;
};

int cmd_pareto(const ParetoArgs& a, std::ostream& out) {
  if (a.t <= 0 || a.h <= 0) throw UsageError("--t and --h must be positive");
  if (a.full_size <= 0) throw UsageError("--full-size must be positive");
  const CurveStore store = load_store(a.curves, a.meta);
  const std::string dataset = pick_dataset(store, a.dataset);

  SelectionTask task;
  task.dataset_id = dataset;
  task.model_ids = store.models_on(dataset);
  task.full_size = a.full_size;
  std::vector<ModelMeta> metas;
  for (const auto& id : task.model_ids) metas.push_back(store.model(id));

  auto gammas = standard_budget_ratios();
  std::reverse(gammas.begin(), gammas.end());

  std::ostringstream csv;
  csv << "method,gamma,pearcorr,flops\n";
  auto row = [&](Method m, Ratio g, double flops) {
    task.method = m;
    task.budget_ratio = g;
    const SelectionReport r = run_selection(store, task, {});
    csv << to_string(m) << ',' << g.str() << ',' << fixed(r.pearcorr, 10) << ',' << std::scientific
        << std::setprecision(6) << flops << std::defaultfloat << '\n';
  };
  for (Method m : {Method::SubTuning, Method::Ats}) {
    for (Ratio g : gammas) {
      const FlopsEstimate f = flops_estimates(metas, a.full_size, a.t, a.h, g);
      row(m, g, m == Method::Ats ? f.c_ats : f.c_sub);
    }
  }
  const Ratio full{1, 1};
  row(Method::SubTuning, full, flops_estimates(metas, a.full_size, a.t, a.h, full).c_full);
  write_output(a.out, csv.str(), out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit fine-tuning scaling laws and rank models for selection."};
  app.name("rectlaw");
  app.require_subcommand(1, 1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a scaling law to one loss curve");
  fit_cmd->add_option("curves", fit.curves, "Curve CSV")->required();
  fit_cmd->add_option("--law", fit.law, "rectified, vanilla or both")
      ->check(CLI::IsMember({"rectified", "vanilla", "both"}));
  fit_cmd->add_option("--model", fit.model, "Model id")->required();
  fit_cmd->add_option("--dataset", fit.dataset, "Dataset id (needed when the model has several)");
  fit_cmd->add_option("--starts", fit.starts, "Random starts")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit.seed, "Seed for the starting points");
  fit_cmd->add_option("--out", fit.out, "Output path (default stdout)");

  AtsArgs ats;
  auto* ats_cmd = app.add_subcommand("ats", "Run Accept-then-Stop on every model of a dataset");
  ats_cmd->add_option("curves", ats.curves, "Curve CSV")->required();
  ats_cmd->add_option("--dataset", ats.dataset, "Dataset id");
  ats_cmd->add_option("--model", ats.model, "Restrict to one model");
  ats_cmd->add_option("--gamma", ats.gamma, "Budget ratio, e.g. 1/512 or 0.125");
  ats_cmd->add_option("--k", ats.k, "Pairs accepted before stopping may trigger");
  ats_cmd->add_option("--delta", ats.delta, "Stop threshold in residual standard deviations");
  ats_cmd->add_option("--full-size", ats.full_size, "Full training-set size");
  ats_cmd->add_option("--target-size", ats.target_size, "Extrapolate to this size instead of --full-size");
  ats_cmd->add_flag("--sample-std", ats.sample_std, "Use the n-1 residual standard deviation");
  ats_cmd->add_option("--out", ats.out, "Output path (default stdout)");

  SelectArgs sel;
  auto* sel_cmd = app.add_subcommand("select", "Score models and compare against full fine-tuning");
  sel_cmd->add_option("curves", sel.curves, "Curve CSV")->required();
  sel_cmd->add_option("meta", sel.meta, "Model metadata CSV")->required();
  sel_cmd->add_option("--dataset", sel.dataset, "Dataset id");
  sel_cmd->add_option("--gamma", sel.gammas, "Budget ratio; repeat for several")->take_all();
  sel_cmd->add_option("--method", sel.methods, "Method; repeat for several")->take_all();
  sel_cmd->add_option("--k", sel.k, "AtS k");
  sel_cmd->add_option("--delta", sel.delta, "AtS delta");
  sel_cmd->add_option("--full-size", sel.full_size, "Full training-set size");
  sel_cmd->add_option("--max-params", sel.max_params, "Keep models strictly below this parameter count");
  sel_cmd->add_option("--starts", sel.starts, "Random starts for law fits")->check(CLI::PositiveNumber);
  sel_cmd->add_option("--seed", sel.seed, "Seed for law fits");
  sel_cmd->add_option("--out", sel.out, "JSON output path (default stdout)");
  sel_cmd->add_option("--table", sel.table, "Also write the method x gamma CSV table here");

  RmsdArgs rmsd;
  auto* rmsd_cmd = app.add_subcommand("rmsd-report", "Fit both laws to every curve and compare RMSD");
  rmsd_cmd->add_option("curves", rmsd.curves, "Curve CSVs (default: bundled tables)");
  rmsd_cmd->add_option("--starts", rmsd.starts, "Random starts")->check(CLI::PositiveNumber);
  rmsd_cmd->add_option("--seed", rmsd.seed, "Seed for the starting points");
  rmsd_cmd->add_option("--out", rmsd.out, "Output path (default stdout)");

  TheoremArgs thm;
  auto* thm_cmd = app.add_subcommand("theorem-check", "Audit the derivative properties on random parameters");
  thm_cmd->add_option("--law", thm.law, "rectified or vanilla")->check(CLI::IsMember({"rectified", "vanilla"}));
  thm_cmd->add_option("--draws", thm.draws, "Number of parameter draws");
  thm_cmd->add_option("--seed", thm.seed, "Seed");

  SynthArgs syn;
  auto* syn_cmd = app.add_subcommand("synth", "Write a synthetic loss curve");
  syn_cmd->add_option("--law", syn.law, "rectified or vanilla")->check(CLI::IsMember({"rectified", "vanilla"}));
  syn_cmd->add_option("--b", syn.b, "B");
  syn_cmd->add_option("--d-l", syn.d_l, "D_l (rectified)");
  syn_cmd->add_option("--beta", syn.beta, "beta");
  syn_cmd->add_option("--e", syn.e, "E");
  syn_cmd->add_option("--alpha", syn.alpha, "alpha (vanilla)");
  syn_cmd->add_option("--sizes", syn.sizes, "Sizes (default 200 * 2^i, i = 0..13)")->delimiter(',');
  syn_cmd->add_option("--noise", syn.noise, "Std of Gaussian noise on log loss");
  syn_cmd->add_option("--seed", syn.seed, "Noise seed");
  syn_cmd->add_option("--model", syn.model, "Model id to write");
  syn_cmd->add_option("--dataset", syn.dataset, "Dataset id to write");
  syn_cmd->add_option("--out", syn.out, "Output path (default stdout)");

  ParetoArgs par;
  auto* par_cmd = app.add_subcommand("pareto", "Selection quality against training FLOPs");
  par_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  par_cmd->add_option("curves", par.curves, "Curve CSV")->required();
  par_cmd->add_option("meta", par.meta, "Model metadata CSV")->required();
  par_cmd->add_option("--dataset", par.dataset, "Dataset id");
  par_cmd->add_option("--t", par.t, "Training epochs");
  par_cmd->add_option("--h", par.h, "Hyper-parameter search rounds");
  par_cmd->add_option("--full-size", par.full_size, "Full training-set size");
  par_cmd->add_option("--out", par.out, "Output path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit, out);
    if (ats_cmd->parsed()) return cmd_ats(ats, out);
    if (sel_cmd->parsed()) return cmd_select(sel, out, err);
    if (rmsd_cmd->parsed()) return cmd_rmsd(rmsd, out, err);
    if (thm_cmd->parsed()) return cmd_theorem_check(thm, out);
    if (syn_cmd->parsed()) return cmd_synth(syn, out);
    if (par_cmd->parsed()) return cmd_pareto(par, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ReferenceError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rectlaw::cli
