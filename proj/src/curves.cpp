// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "rectlaw/curves.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "rectlaw/error.hpp"

namespace rectlaw {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::int64_t parse_integer(std::string_view field, std::size_t line, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  }
  return v;
}

double parse_decimal(std::string_view field, std::size_t line, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  }
  return v;
}

/// Calls `row(fields, line_no)` for each data row after checking the header.
template <typename RowFn>
void read_table(std::istream& in, std::string_view expected_header, std::size_t n_fields, RowFn&& row) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    if (!have_header) {
      if (trim(view) != expected_header) {
        throw ParseError(line_no, "expected header '" + std::string(expected_header) + "'");
      }
      have_header = true;
      continue;
    }
    auto fields = split_row(view);
    if (fields.size() != n_fields) {
      throw ParseError(line_no, "expected " + std::to_string(n_fields) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    row(fields, line_no);
  }
  if (!have_header) throw ParseError(line_no, "missing header row");
}

}  // namespace

LossCurve::LossCurve(std::string model_id, std::string dataset_id, std::vector<LossPoint> points)
    : model_id_(std::move(model_id)), dataset_id_(std::move(dataset_id)), points_(std::move(points)) {
  std::sort(points_.begin(), points_.end(),
            [](const LossPoint& a, const LossPoint& b) { return a.size < b.size; });
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.size < 0) {
      throw ValidationError(model_id_ + "/" + dataset_id_ + ": negative size " + std::to_string(p.size));
    }
    if (!(p.loss > 0.0) || !std::isfinite(p.loss)) {
      throw ValidationError(model_id_ + "/" + dataset_id_ + ": loss must be positive at size " +
                            std::to_string(p.size));
    }
    if (i > 0 && points_[i - 1].size == p.size) {
      throw ValidationError(model_id_ + "/" + dataset_id_ + ": duplicate size " + std::to_string(p.size));
    }
  }
}

std::optional<double> LossCurve::loss_at(std::int64_t size) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), size,
                             [](const LossPoint& p, std::int64_t s) { return p.size < s; });
  if (it == points_.end() || it->size != size) return std::nullopt;
  return it->loss;
}

double LossCurve::require_loss_at(std::int64_t size) const {
  if (auto v = loss_at(size)) return *v;
  throw ReferenceError(model_id_ + "/" + dataset_id_ + " has no point at size " + std::to_string(size));
}

std::vector<LossPoint> LossCurve::nonzero_points() const {
  std::vector<LossPoint> out;
  std::copy_if(points_.begin(), points_.end(), std::back_inserter(out),
               [](const LossPoint& p) { return p.size > 0; });
  return out;
}

std::string_view to_string(Arch arch) {
  switch (arch) {
    case Arch::DecoderOnly: return "decoder-only";
    case Arch::EncoderDecoder: return "encoder-decoder";
    case Arch::EncoderDecoderMoe: return "encoder-decoder-moe";
  }
  return "unknown";
}

Arch parse_arch(std::string_view text) {
  if (text == "decoder-only") return Arch::DecoderOnly;
  if (text == "encoder-decoder") return Arch::EncoderDecoder;
  if (text == "encoder-decoder-moe") return Arch::EncoderDecoderMoe;
  throw ValidationError("unknown architecture '" + std::string(text) + "'");
}

CurveStore::CurveStore(std::vector<LossCurve> curves, std::vector<ModelMeta> models, MetaPolicy policy)
    : curves_(std::move(curves)), models_(std::move(models)) {
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const auto& m = models_[i];
    if (m.n_params <= 0) throw ValidationError(m.model_id + ": n_params must be positive");
    if (m.family.empty()) throw ValidationError(m.model_id + ": family must be non-empty");
    if (!model_index_.emplace(m.model_id, i).second) {
      throw ValidationError("duplicate model metadata for " + m.model_id);
    }
  }
  for (std::size_t i = 0; i < curves_.size(); ++i) {
    const auto& c = curves_[i];
    if (!curve_index_.emplace(std::pair{c.model_id(), c.dataset_id()}, i).second) {
      throw ValidationError("duplicate curve " + c.model_id() + "/" + c.dataset_id());
    }
    if (policy == MetaPolicy::Required && !model_index_.contains(c.model_id())) {
      throw ReferenceError("curve references unknown model '" + c.model_id() + "'");
    }
  }

  // Within a dataset every grid should be a prefix of the longest one.
  for (const auto& ds : datasets()) {
    const LossCurve* longest = nullptr;
    for (const auto& c : curves_) {
      if (c.dataset_id() == ds && (longest == nullptr || c.size() > longest->size())) longest = &c;
    }
    for (const auto& c : curves_) {
      if (c.dataset_id() != ds) continue;
      const auto a = c.points();
      const auto b = longest->points();
      const bool prefix = std::equal(a.begin(), a.end(), b.begin(),
                                     [](const LossPoint& x, const LossPoint& y) { return x.size == y.size; });
      if (!prefix) {
        warnings_.push_back("ragged size grid: " + c.model_id() + "/" + ds + " differs from " +
                            longest->model_id() + "/" + ds);
      }
    }
  }
}

bool CurveStore::has_curve(std::string_view model, std::string_view dataset) const {
  return curve_index_.contains(std::pair{std::string(model), std::string(dataset)});
}

const LossCurve& CurveStore::curve(std::string_view model, std::string_view dataset) const {
  auto it = curve_index_.find(std::pair{std::string(model), std::string(dataset)});
  if (it == curve_index_.end()) {
    throw ReferenceError("no curve for model '" + std::string(model) + "' on dataset '" +
                         std::string(dataset) + "'");
  }
  return curves_[it->second];
}

bool CurveStore::has_model(std::string_view model) const { return model_index_.contains(model); }

const ModelMeta& CurveStore::model(std::string_view model) const {
  auto it = model_index_.find(model);
  if (it == model_index_.end()) throw ReferenceError("unknown model '" + std::string(model) + "'");
  return models_[it->second];
}

std::vector<std::string> CurveStore::datasets() const {
  std::vector<std::string> out;
  for (const auto& c : curves_) {
    if (std::find(out.begin(), out.end(), c.dataset_id()) == out.end()) out.push_back(c.dataset_id());
  }
  return out;
}

std::vector<std::string> CurveStore::models_on(std::string_view dataset) const {
  std::vector<std::string> out;
  for (const auto& c : curves_) {
    if (c.dataset_id() == dataset) out.push_back(c.model_id());
  }
  return out;
}

std::vector<LossCurve> parse_curves_csv(std::istream& in) {
  struct Acc {
    double sum = 0.0;
    int count = 0;
  };
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::map<std::int64_t, Acc>> rows;

  read_table(in, "model,dataset,size,loss", 4, [&](const auto& f, std::size_t line) {
    if (f[0].empty() || f[1].empty()) throw ParseError(line, "empty model or dataset");
    const std::int64_t size = parse_integer(f[2], line, "size");
    if (size < 0) throw ParseError(line, "negative size");
    const double loss = parse_decimal(f[3], line, "loss");
    if (!(loss > 0.0)) {
      throw ValidationError("line " + std::to_string(line) + ": loss must be positive, got " +
                            std::string(f[3]));
    }
    std::pair key{std::string(f[0]), std::string(f[1])};
    auto [it, inserted] = rows.try_emplace(key);
    if (inserted) order.push_back(key);
    auto& acc = it->second[size];
    acc.sum += loss;
    acc.count += 1;
  });

  std::vector<LossCurve> curves;
  curves.reserve(order.size());
  for (const auto& key : order) {
    std::vector<LossPoint> pts;
    for (const auto& [size, acc] : rows.at(key)) pts.push_back({size, acc.sum / acc.count});
    curves.emplace_back(key.first, key.second, std::move(pts));
  }
  return curves;
}

std::vector<ModelMeta> parse_models_csv(std::istream& in) {
  std::vector<ModelMeta> models;
  read_table(in, "model,n_params,family,arch", 4, [&](const auto& f, std::size_t line) {
    if (f[0].empty()) throw ParseError(line, "empty model id");
    ModelMeta m;
    m.model_id = std::string(f[0]);
    m.n_params = parse_integer(f[1], line, "n_params");
    if (m.n_params <= 0) {
      throw ValidationError("line " + std::to_string(line) + ": n_params must be positive");
    }
    m.family = std::string(f[2]);
    if (m.family.empty()) throw ValidationError("line " + std::to_string(line) + ": empty family");
    try {
      m.arch = parse_arch(f[3]);
    } catch (const ValidationError& e) {
      throw ParseError(line, e.what());
    }
    models.push_back(std::move(m));
  });
  return models;
}

CurveStore parse_csv(std::istream& curves) {
  return CurveStore(parse_curves_csv(curves), {}, CurveStore::MetaPolicy::Optional);
}

CurveStore parse_csv(std::istream& curves, std::istream& models) {
  auto c = parse_curves_csv(curves);
  return CurveStore(std::move(c), parse_models_csv(models), CurveStore::MetaPolicy::Required);
}

void write_curves_csv(std::ostream& out, std::span<const LossCurve> curves) {
  out << "model,dataset,size,loss\n";
  char buf[64];
  for (const auto& c : curves) {
    for (const auto& p : c.points()) {
      // Shortest representation that round-trips.
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p.loss);
      out << c.model_id() << ',' << c.dataset_id() << ',' << p.size << ',' << std::string_view(buf, end - buf)
          << '\n';
    }
  }
}

void write_models_csv(std::ostream& out, std::span<const ModelMeta> models) {
  out << "model,n_params,family,arch\n";
  for (const auto& m : models) {
    out << m.model_id << ',' << m.n_params << ',' << m.family << ',' << to_string(m.arch) << '\n';
  }
}

const CurveStore& embedded_fixtures() {
  static const CurveStore store = [] {
    std::vector<LossCurve> curves;
    for (const char* name : {"flan", "wmt19", "gigaword"}) {
      std::istringstream in{std::string(embedded_fixture_text(name))};
      auto part = parse_curves_csv(in);
      curves.insert(curves.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    std::istringstream meta{std::string(embedded_fixture_text("models"))};
    return CurveStore(std::move(curves), parse_models_csv(meta), CurveStore::MetaPolicy::Required);
  }();
  return store;
}

LossCurve restrict_sizes(const LossCurve& curve, std::int64_t max_size, bool include_zero) {
  std::vector<LossPoint> kept;
  bool any_nonzero = false;
  for (const auto& p : curve.points()) {
    if (p.size == 0 ? include_zero : p.size <= max_size) {
      kept.push_back(p);
      any_nonzero = any_nonzero || p.size > 0;
    }
  }
  if (!any_nonzero) {
    throw InsufficientDataError("no points under budget " + std::to_string(max_size) + " for " +
                                curve.model_id() + "/" + curve.dataset_id());
  }
  return LossCurve(curve.model_id(), curve.dataset_id(), std::move(kept));
}

std::vector<LossPoint> halving_sequence(const LossCurve& curve, std::int64_t max_size, std::int64_t floor_size) {
  const auto pts = curve.points();
  std::vector<LossPoint> out;
  std::int64_t limit = max_size;
  while (true) {
    const LossPoint* pick = nullptr;
    for (const auto& p : pts) {
      if (p.size > 0 && p.size <= limit) pick = &p;
    }
    if (pick == nullptr || pick->size < floor_size) break;
    out.push_back(*pick);
    limit = pick->size / 2;
  }
  return out;
}

}  // namespace rectlaw
