#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "uwbfp/calibration.hpp"
#include "uwbfp/geometry.hpp"

namespace uwbfp {

/// Uniform square grid over the test area.
struct GridSpec {
  double width = 1000.0;
  double height = 2000.0;
  double spacing = 25.0;

  /// Throws InvalidArgument unless width and height are positive integer
  /// multiples of spacing.
  void validate() const;

  std::size_t cols() const;
  std::size_t rows() const;
  std::size_t cell_count() const { return cols() * rows(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Row-major cell index (x varies fastest).
struct CellLabel {
  std::uint32_t index = 0;

  friend auto operator<=>(const CellLabel&, const CellLabel&) = default;
};

/// Lower-left vertex of a cell. Throws LabelOutOfRange.
PointMM cell_vertex(const GridSpec& spec, CellLabel label);

/// Label of the cell containing `p`. Points on the far edges (x = width or
/// y = height) belong to the last cell along that axis. Throws OutOfArea.
CellLabel vertex_to_label(const GridSpec& spec, const PointMM& p);

/// One predicted-measurement fingerprint per grid cell.
///
/// Entries are raw model predictions and may be zero where a vertex coincides
/// with an anchor.
class FingerprintDB {
 public:
  FingerprintDB(GridSpec spec, std::vector<RangeTriple> entries);

  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const RangeTriple& operator[](CellLabel label) const { return entries_.at(label.index); }
  const std::vector<RangeTriple>& entries() const noexcept { return entries_; }

  friend bool operator==(const FingerprintDB&, const FingerprintDB&) = default;

 private:
  GridSpec spec_;
  std::vector<RangeTriple> entries_;
};

/// Fingerprint of every cell vertex: the model's predicted measurement of the
/// exact distance to each anchor.
FingerprintDB build_db(const CalibrationModel& model, const GridSpec& spec,
                       const AnchorLayout& anchors, unsigned threads = 1);

/// First line "spacing,width,height" with the grid values, then one
/// "label,x,y,fa,fb,fc" line per cell in ascending label order.
std::string write_db(const FingerprintDB& db);
FingerprintDB read_db(std::string_view text);

}  // namespace uwbfp
