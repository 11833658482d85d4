#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uwbfp/geometry.hpp"

namespace uwbfp {

/// Affine map from true distance to expected measured distance: a * d + b.
struct LinearRangingEq {
  double a = 1.0;
  double b = 0.0;

  double operator()(double true_distance) const noexcept { return a * true_distance + b; }

  /// Throws InvalidArgument unless a is finite and > 0 and b is finite.
  void validate() const;

  friend bool operator==(const LinearRangingEq&, const LinearRangingEq&) = default;
};

/// Unique (a, b) through (true1, meas1) and (true2, meas2).
/// Throws DegeneratePair when true1 == true2 and NonPositiveSlope when a <= 0.
LinearRangingEq fit_pair(double true1, double meas1, double true2, double meas2);

enum class ModelKind { One, Two, Three, Four };

std::string_view to_string(ModelKind kind) noexcept;
/// Accepts "one".."four" in any case; nullopt otherwise.
std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept;

struct CalibrationModel {
  ModelKind kind = ModelKind::One;
  std::array<LinearRangingEq, 3> eqs{};

  const LinearRangingEq& eq(Anchor which) const noexcept { return eqs[static_cast<int>(which)]; }

  static CalibrationModel identity(ModelKind kind = ModelKind::One) { return {kind, {}}; }

  friend bool operator==(const CalibrationModel&, const CalibrationModel&) = default;
};

/// a * true_distance + b for the selected anchor's equation.
double predict_measured(const CalibrationModel& model, Anchor anchor, double true_distance) noexcept;

/// Cleaned reference-point measurements.
///
/// series[p][k] holds the measured distances from reference point p to anchor
/// k. A measurement set j is the j-th value of every series.
struct ObservationData {
  static constexpr std::array<PointMM, 4> kDefaultPoints = {
      PointMM{100.0, 100.0}, PointMM{900.0, 100.0}, PointMM{100.0, 1900.0},
      PointMM{900.0, 1900.0}};

  std::array<PointMM, 4> points = kDefaultPoints;
  std::array<std::array<std::vector<double>, 3>, 4> series;

  /// Length of the shortest series, i.e. the number of complete sets.
  std::size_t set_count() const noexcept;

  /// Throws InsufficientData if any series is empty.
  void validate() const;
};

struct FitOptions {
  std::size_t n_select = 60;
  std::uint64_t seed = 0;
};

struct FitDiagnostics {
  std::size_t requested = 0;
  /// Sets drawn after clamping to availability.
  std::size_t selected = 0;
  /// Sets dropped because one of their pair fits had a non-positive slope.
  std::size_t skipped = 0;
  bool clamped = false;
};

/// Fits one calibration model from reference-point observations.
///
/// Draws n_select distinct set indices uniformly (seeded), computes the
/// model-specific equation per anchor for each set, and averages the (a, b)
/// parameters over the usable sets in selection order. Pair rules, with
/// reference points numbered 1..4:
///
///   One:   A <- A@(1,4)   B <- A@(2,3)   C <- A@(1,4)
///   Two:   A <- A@(1,4)   B <- B@(2,3)   C <- C@(1,4)
///   Three: A <- mean A@(1,2),(1,3),(1,4)
///          B <- mean B@(3,1),(3,2),(3,4)
///          C <- mean C@(4,1),(4,2),(4,3)
///   Four:  A, B as Three; C as Two
///
/// where X@(p,q) is fit_pair over the true and measured distances to anchor X
/// at points p and q.
CalibrationModel fit_model(ModelKind kind, const ObservationData& obs, const AnchorLayout& anchors,
                           const FitOptions& options = {}, FitDiagnostics* diagnostics = nullptr);

/// Equations for one measurement set (no averaging over sets).
CalibrationModel fit_model_for_set(ModelKind kind, const ObservationData& obs,
                                   const AnchorLayout& anchors, std::size_t set_index);

/// Text form: "kind,<name>" then "A,a,b", "B,a,b", "C,a,b" at round-trip precision.
std::string write_calibration(const CalibrationModel& model);
CalibrationModel read_calibration(std::string_view text);

}  // namespace uwbfp
