// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rectlaw {

/// One measured (training-set size, test loss) pair. Loss is in nats/token.
struct LossPoint {
  std::int64_t size = 0;
  double loss = 0.0;

  friend bool operator==(const LossPoint&, const LossPoint&) = default;
};

/// A model's loss curve on one fine-tuning dataset.
///
/// Points are kept sorted by strictly increasing size. Size 0 carries the
/// zero-shot loss; fitting and AtS ignore it.
class LossCurve {
 public:
  LossCurve() = default;
  /// Sorts `points` and validates them. Duplicate sizes are rejected here;
  /// the CSV reader averages them before construction.
  LossCurve(std::string model_id, std::string dataset_id, std::vector<LossPoint> points);

  const std::string& model_id() const noexcept { return model_id_; }
  const std::string& dataset_id() const noexcept { return dataset_id_; }
  std::span<const LossPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

  std::optional<double> loss_at(std::int64_t size) const;
  /// Throws ReferenceError when `size` is not on the curve.
  double require_loss_at(std::int64_t size) const;

  /// Points with size > 0.
  std::vector<LossPoint> nonzero_points() const;
  /// Largest measured size, 0 for an empty curve.
  std::int64_t max_size() const noexcept { return points_.empty() ? 0 : points_.back().size; }

  friend bool operator==(const LossCurve&, const LossCurve&) = default;

 private:
  std::string model_id_;
  std::string dataset_id_;
  std::vector<LossPoint> points_;
};

enum class Arch { DecoderOnly, EncoderDecoder, EncoderDecoderMoe };

std::string_view to_string(Arch arch);
Arch parse_arch(std::string_view text);

struct ModelMeta {
  std::string model_id;
  std::int64_t n_params = 0;
  std::string family;
  Arch arch = Arch::DecoderOnly;

  friend bool operator==(const ModelMeta&, const ModelMeta&) = default;
};

/// Immutable collection of curves keyed by (model, dataset) plus model metadata.
/// Insertion order is preserved for iteration so reports come out in input order.
class CurveStore {
 public:
  enum class MetaPolicy { Optional, Required };

  CurveStore() = default;
  CurveStore(std::vector<LossCurve> curves, std::vector<ModelMeta> models,
             MetaPolicy policy = MetaPolicy::Required);

  std::span<const LossCurve> curves() const noexcept { return curves_; }
  std::span<const ModelMeta> models() const noexcept { return models_; }

  bool has_curve(std::string_view model, std::string_view dataset) const;
  const LossCurve& curve(std::string_view model, std::string_view dataset) const;
  bool has_model(std::string_view model) const;
  const ModelMeta& model(std::string_view model) const;

  /// Dataset ids in first-seen order.
  std::vector<std::string> datasets() const;
  /// Model ids having a curve on `dataset`, in curve insertion order.
  std::vector<std::string> models_on(std::string_view dataset) const;

  /// Non-fatal notes collected at construction (ragged size grids).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::vector<LossCurve> curves_;
  std::vector<ModelMeta> models_;
  std::map<std::pair<std::string, std::string>, std::size_t, std::less<>> curve_index_;
  std::map<std::string, std::size_t, std::less<>> model_index_;
  std::vector<std::string> warnings_;
};

/// Reads `model,dataset,size,loss` rows. Rows sharing (model, dataset, size)
/// are averaged. Curves come back in first-seen order.
std::vector<LossCurve> parse_curves_csv(std::istream& in);
/// Reads `model,n_params,family,arch` rows.
std::vector<ModelMeta> parse_models_csv(std::istream& in);

/// Curves only; metadata stays empty.
CurveStore parse_csv(std::istream& curves);
/// Curves plus metadata. Every curve's model must appear in the metadata.
CurveStore parse_csv(std::istream& curves, std::istream& models);

void write_curves_csv(std::ostream& out, std::span<const LossCurve> curves);
void write_models_csv(std::ostream& out, std::span<const ModelMeta> models);

/// Test-loss tables for 30 models on flan, wmt19 and gigaword with their
/// metadata. Built from the CSV files under fixtures/, compiled in.
const CurveStore& embedded_fixtures();

/// Raw text of the compiled-in fixture files, keyed "flan", "wmt19",
/// "gigaword" and "models".
std::string_view embedded_fixture_text(std::string_view name);

/// Points with 0 < size <= max_size, plus the size-0 point when `include_zero`.
LossCurve restrict_sizes(const LossCurve& curve, std::int64_t max_size, bool include_zero);

/// Descends the measured grid from the largest nonzero size <= `max_size`,
/// each step taking the largest grid size <= half the previous one.
/// Returned in descending size order. Stops when no grid size qualifies or
/// the next size would fall below `floor_size`.
std::vector<LossPoint> halving_sequence(const LossCurve& curve, std::int64_t max_size,
                                        std::int64_t floor_size = 1);

}  // namespace rectlaw
