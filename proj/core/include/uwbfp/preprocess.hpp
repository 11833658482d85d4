#pragma once

#include <span>
#include <vector>

#include "uwbfp/geometry.hpp"

namespace uwbfp {

/// Median of a non-empty sample; mean of the two central values for even sizes.
double median(std::span<const double> values);

/// Median absolute deviation from the median (unscaled).
double median_absolute_deviation(std::span<const double> values);

struct MadFilterParams {
  double k = 3.0;
  /// Consistency constant for normally distributed data.
  double scale = 1.4826;
};

/// Keeps values v with |v - median| <= k * scale * MAD, in their original order.
///
/// When scale * MAD is zero only values equal to the median survive. The output
/// is never empty. Throws EmptySeries on empty input.
std::vector<double> mad_filter(std::span<const double> series, MadFilterParams params = {});

/// Scale-down correction for long measured ranges.
struct CorrectionPolicy {
  double threshold = 1000.0;
  double ratio = 0.9;

  static CorrectionPolicy identity() { return {1000.0, 1.0}; }

  /// Throws InvalidArgument unless threshold > 0 and 0 < ratio <= 1.
  void validate() const;

  friend bool operator==(const CorrectionPolicy&, const CorrectionPolicy&) = default;
};

/// measured * ratio when measured > threshold, otherwise measured unchanged.
double correct_range(double measured, const CorrectionPolicy& policy) noexcept;

RangeTriple correct_triple(const RangeTriple& ranges, const CorrectionPolicy& policy) noexcept;

}  // namespace uwbfp
