#include "uwbfp/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "uwbfp/error.hpp"

namespace uwbfp {

double median(std::span<const double> values) {
  if (values.empty()) {
    throw Error(Errc::EmptySeries, "median of an empty series");
  }
  std::vector<double> v(values.begin(), values.end());
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(v.begin(), mid);
  return lower + 0.5 * (upper - lower);
}

double median_absolute_deviation(std::span<const double> values) {
  const double m = median(values);
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) {
    dev.push_back(std::abs(v - m));
  }
  return median(dev);
}

std::vector<double> mad_filter(std::span<const double> series, MadFilterParams params) {
  if (series.empty()) {
    throw Error(Errc::EmptySeries, "cannot filter an empty series");
  }
  if (!(params.k > 0.0) || !(params.scale > 0.0)) {
    throw Error(Errc::InvalidArgument, "MAD filter k and scale must be > 0");
  }
  const double m = median(series);
  const double cutoff = params.k * params.scale * median_absolute_deviation(series);

  std::vector<double> kept;
  kept.reserve(series.size());
  for (double v : series) {
    if (std::abs(v - m) <= cutoff) {
      kept.push_back(v);
    }
  }
  return kept;
}

void CorrectionPolicy::validate() const {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw Error(Errc::InvalidArgument, "correction threshold must be finite and > 0");
  }
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(Errc::InvalidArgument, "correction ratio must lie in (0, 1]");
  }
}

double correct_range(double measured, const CorrectionPolicy& policy) noexcept {
  return measured > policy.threshold ? measured * policy.ratio : measured;
}

RangeTriple correct_triple(const RangeTriple& r, const CorrectionPolicy& policy) noexcept {
  return {correct_range(r.d_a, policy), correct_range(r.d_b, policy),
          correct_range(r.d_c, policy)};
}

}  // namespace uwbfp
