#pragma once

#include <array>

namespace uwbfp {

/// 2-D location in millimeters.
struct PointMM {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PointMM&, const PointMM&) = default;
};

enum class Anchor { A = 0, B = 1, C = 2 };

inline constexpr std::array<Anchor, 3> kAnchors = {Anchor::A, Anchor::B, Anchor::C};

/// One measurement instance: distances to anchors A, B and C.
struct RangeTriple {
  double d_a = 0.0;
  double d_b = 0.0;
  double d_c = 0.0;

  double operator[](Anchor which) const noexcept;
  double& operator[](Anchor which) noexcept;

  friend bool operator==(const RangeTriple&, const RangeTriple&) = default;
};

/// Throws NonFiniteRange unless all components are finite and strictly positive.
void validate_ranges(const RangeTriple& ranges);

double distance(const PointMM& p, const PointMM& q) noexcept;

bool is_finite(const PointMM& p) noexcept;

/// Three pairwise-distinct, non-collinear anchor positions.
class AnchorLayout {
 public:
  /// Triangles with area at or below this (mm²) are treated as collinear.
  static constexpr double kMinTriangleArea = 1e-6;

  /// A=(0,0), B=(0,2000), C=(1000,0).
  AnchorLayout();
  AnchorLayout(PointMM a, PointMM b, PointMM c);

  const PointMM& a() const noexcept { return pos_[0]; }
  const PointMM& b() const noexcept { return pos_[1]; }
  const PointMM& c() const noexcept { return pos_[2]; }
  const PointMM& operator[](Anchor which) const noexcept { return pos_[static_cast<int>(which)]; }

  /// Exact distances from `p` to the three anchors.
  RangeTriple ranges_from(const PointMM& p) const noexcept;

  friend bool operator==(const AnchorLayout&, const AnchorLayout&) = default;

 private:
  std::array<PointMM, 3> pos_;
};

/// Linearized least-squares position from three ranges.
///
/// The circle equation of anchor A is subtracted from those of B and C, which
/// leaves a 2x2 linear system in (x, y). The system is formed relative to
/// anchor A so the result does not lose precision far from the origin.
/// Consistent ranges reproduce the true point; inconsistent ones resolve to the
/// intersection of the two radical lines. The result is not clamped.
PointMM trilaterate(const AnchorLayout& anchors, const RangeTriple& ranges);

}  // namespace uwbfp
