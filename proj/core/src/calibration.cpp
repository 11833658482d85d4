#include "uwbfp/calibration.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <span>

#include "uwbfp/error.hpp"
#include "uwbfp/random.hpp"
#include "uwbfp/text.hpp"

namespace uwbfp {

void LinearRangingEq::validate() const {
  if (!std::isfinite(a) || !(a > 0.0) || !std::isfinite(b)) {
    throw Error(Errc::InvalidArgument, "ranging equation needs finite a > 0 and finite b");
  }
}

LinearRangingEq fit_pair(double true1, double meas1, double true2, double meas2) {
  for (double v : {true1, meas1, true2, meas2}) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw Error(Errc::InvalidArgument, "fit_pair inputs must be finite and > 0");
    }
  }
  if (true1 == true2) {
    throw Error(Errc::DegeneratePair, "both observations share the same true distance");
  }
  const double a = (meas2 - meas1) / (true2 - true1);
  if (!(a > 0.0)) {
    throw Error(Errc::NonPositiveSlope, "fitted slope " + text::format_exact(a) + " is not positive");
  }
  return {a, meas1 - a * true1};
}

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::One: return "one";
    case ModelKind::Two: return "two";
    case ModelKind::Three: return "three";
    case ModelKind::Four: break;
  }
  return "four";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (ModelKind k : {ModelKind::One, ModelKind::Two, ModelKind::Three, ModelKind::Four}) {
    if (lower == to_string(k)) {
      return k;
    }
  }
  return std::nullopt;
}

double predict_measured(const CalibrationModel& model, Anchor anchor,
                        double true_distance) noexcept {
  return model.eq(anchor)(true_distance);
}

std::size_t ObservationData::set_count() const noexcept {
  std::size_t n = series[0][0].size();
  for (const auto& per_point : series) {
    for (const auto& s : per_point) {
      n = std::min(n, s.size());
    }
  }
  return n;
}

void ObservationData::validate() const {
  if (set_count() == 0) {
    throw Error(Errc::InsufficientData, "every reference point needs at least one measurement per anchor");
  }
  for (const auto& per_point : series) {
    for (const auto& s : per_point) {
      for (double v : s) {
        if (!std::isfinite(v) || !(v > 0.0)) {
          throw Error(Errc::InvalidArgument, "observation values must be finite and > 0");
        }
      }
    }
  }
}

namespace {

// Zero-based point indices.
struct PointPair {
  int p;
  int q;
};

LinearRangingEq fit_anchor_pair(const ObservationData& obs, const AnchorLayout& anchors,
                                Anchor anchor, PointPair pair, std::size_t set) {
  const auto k = static_cast<std::size_t>(anchor);
  const double t1 = distance(obs.points[pair.p], anchors[anchor]);
  const double t2 = distance(obs.points[pair.q], anchors[anchor]);
  return fit_pair(t1, obs.series[pair.p][k][set], t2, obs.series[pair.q][k][set]);
}

LinearRangingEq mean_of(std::span<const LinearRangingEq> eqs) {
  LinearRangingEq sum{0.0, 0.0};
  for (const auto& e : eqs) {
    sum.a += e.a;
    sum.b += e.b;
  }
  const auto n = static_cast<double>(eqs.size());
  return {sum.a / n, sum.b / n};
}

LinearRangingEq three_sided(const ObservationData& obs, const AnchorLayout& anchors, Anchor anchor,
                            int hub, std::size_t set) {
  std::array<LinearRangingEq, 3> eqs;
  std::size_t n = 0;
  for (int other = 0; other < 4; ++other) {
    if (other != hub) {
      eqs[n++] = fit_anchor_pair(obs, anchors, anchor, {hub, other}, set);
    }
  }
  return mean_of(eqs);
}

}  // namespace

CalibrationModel fit_model_for_set(ModelKind kind, const ObservationData& obs,
                                   const AnchorLayout& anchors, std::size_t set) {
  constexpr PointPair diag{0, 3};
  constexpr PointPair anti{1, 2};
  CalibrationModel m{kind, {}};
  switch (kind) {
    case ModelKind::One:
      m.eqs[0] = fit_anchor_pair(obs, anchors, Anchor::A, diag, set);
      m.eqs[1] = fit_anchor_pair(obs, anchors, Anchor::A, anti, set);
      m.eqs[2] = m.eqs[0];
      break;
    case ModelKind::Two:
      m.eqs[0] = fit_anchor_pair(obs, anchors, Anchor::A, diag, set);
      m.eqs[1] = fit_anchor_pair(obs, anchors, Anchor::B, anti, set);
      m.eqs[2] = fit_anchor_pair(obs, anchors, Anchor::C, diag, set);
      break;
    case ModelKind::Three:
      m.eqs[0] = three_sided(obs, anchors, Anchor::A, 0, set);
      m.eqs[1] = three_sided(obs, anchors, Anchor::B, 2, set);
      m.eqs[2] = three_sided(obs, anchors, Anchor::C, 3, set);
      break;
    case ModelKind::Four:
      m.eqs[0] = three_sided(obs, anchors, Anchor::A, 0, set);
      m.eqs[1] = three_sided(obs, anchors, Anchor::B, 2, set);
      m.eqs[2] = fit_anchor_pair(obs, anchors, Anchor::C, diag, set);
      break;
  }
  return m;
}

CalibrationModel fit_model(ModelKind kind, const ObservationData& obs, const AnchorLayout& anchors,
                           const FitOptions& options, FitDiagnostics* diagnostics) {
  obs.validate();
  if (options.n_select == 0) {
    throw Error(Errc::InvalidArgument, "n_select must be at least 1");
  }
  const std::size_t available = obs.set_count();
  const std::size_t n = std::min(options.n_select, available);

  // Partial Fisher-Yates: the first n entries are the selection, in draw order.
  std::vector<std::size_t> order(available);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream rng(options.seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(available - i));
    std::swap(order[i], order[j]);
  }

  std::array<LinearRangingEq, 3> sum{};
  for (auto& e : sum) {
    e = {0.0, 0.0};
  }
  std::size_t used = 0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    CalibrationModel one;
    try {
      one = fit_model_for_set(kind, obs, anchors, order[i]);
    } catch (const Error& e) {
      if (e.code() != Errc::NonPositiveSlope) {
        throw;
      }
      ++skipped;
      continue;
    }
    for (int k = 0; k < 3; ++k) {
      sum[k].a += one.eqs[k].a;
      sum[k].b += one.eqs[k].b;
    }
    ++used;
  }

  if (diagnostics != nullptr) {
    *diagnostics = {options.n_select, n, skipped, n < options.n_select};
  }
  if (used == 0) {
    throw Error(Errc::InsufficientData, "every selected measurement set produced a non-positive slope");
  }

  CalibrationModel model{kind, {}};
  const auto denom = static_cast<double>(used);
  for (int k = 0; k < 3; ++k) {
    model.eqs[k] = {sum[k].a / denom, sum[k].b / denom};
    model.eqs[k].validate();
  }
  return model;
}

std::string write_calibration(const CalibrationModel& model) {
  std::string out = "kind," + std::string(to_string(model.kind)) + "\n";
  for (Anchor k : kAnchors) {
    const auto& e = model.eq(k);
    out += "ABC"[static_cast<int>(k)];
    out += "," + text::format_exact(e.a) + "," + text::format_exact(e.b) + "\n";
  }
  return out;
}

CalibrationModel read_calibration(std::string_view contents) {
  std::vector<std::string_view> rows;
  for (auto line : text::lines(contents)) {
    if (!text::trim(line).empty()) {
      rows.push_back(line);
    }
  }
  if (rows.size() != 4) {
    throw Error(Errc::Parse, "calibration file needs a kind line and three anchor lines");
  }
  const auto head = text::split(rows[0], ',');
  if (head.size() != 2 || text::trim(head[0]) != "kind") {
    throw Error(Errc::Parse, "line 1: expected 'kind,<one|two|three|four>'");
  }
  const auto kind = parse_model_kind(text::trim(head[1]));
  if (!kind) {
    throw Error(Errc::Parse, "line 1: unknown model kind '" + std::string(head[1]) + "'");
  }
  CalibrationModel model{*kind, {}};
  for (int k = 0; k < 3; ++k) {
    const auto f = text::split(rows[k + 1], ',');
    const std::string expected(1, "ABC"[k]);
    if (f.size() != 3 || text::trim(f[0]) != expected) {
      throw Error(Errc::Parse, "line " + std::to_string(k + 2) + ": expected '" + expected + ",a,b'");
    }
    model.eqs[k] = {text::parse_double(f[1], "slope"), text::parse_double(f[2], "intercept")};
    model.eqs[k].validate();
  }
  return model;
}

}  // namespace uwbfp
