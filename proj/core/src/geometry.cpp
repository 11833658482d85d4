#include "uwbfp/geometry.hpp"

#include <cmath>
#include <sstream>

#include "uwbfp/error.hpp"

namespace uwbfp {

namespace {

double cross(const PointMM& o, const PointMM& p, const PointMM& q) noexcept {
  return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
}

}  // namespace

double RangeTriple::operator[](Anchor which) const noexcept {
  switch (which) {
    case Anchor::A: return d_a;
    case Anchor::B: return d_b;
    case Anchor::C: break;
  }
  return d_c;
}

double& RangeTriple::operator[](Anchor which) noexcept {
  switch (which) {
    case Anchor::A: return d_a;
    case Anchor::B: return d_b;
    case Anchor::C: break;
  }
  return d_c;
}

void validate_ranges(const RangeTriple& r) {
  for (Anchor k : kAnchors) {
    const double v = r[k];
    if (!std::isfinite(v) || v <= 0.0) {
      std::ostringstream os;
      os << "range to anchor " << "ABC"[static_cast<int>(k)] << " is " << v
         << " (must be finite and > 0)";
      throw Error(Errc::NonFiniteRange, os.str());
    }
  }
}

double distance(const PointMM& p, const PointMM& q) noexcept {
  return std::hypot(p.x - q.x, p.y - q.y);
}

bool is_finite(const PointMM& p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

AnchorLayout::AnchorLayout() : AnchorLayout({0.0, 0.0}, {0.0, 2000.0}, {1000.0, 0.0}) {}

AnchorLayout::AnchorLayout(PointMM a, PointMM b, PointMM c) : pos_{a, b, c} {
  if (!is_finite(a) || !is_finite(b) || !is_finite(c)) {
    throw Error(Errc::InvalidArgument, "anchor coordinates must be finite");
  }
  if (a == b || b == c || a == c) {
    throw Error(Errc::CollinearAnchors, "anchor positions must be pairwise distinct");
  }
  if (0.5 * std::abs(cross(a, b, c)) <= kMinTriangleArea) {
    throw Error(Errc::CollinearAnchors, "anchors are collinear");
  }
}

RangeTriple AnchorLayout::ranges_from(const PointMM& p) const noexcept {
  return {distance(p, pos_[0]), distance(p, pos_[1]), distance(p, pos_[2])};
}

PointMM trilaterate(const AnchorLayout& anchors, const RangeTriple& ranges) {
  validate_ranges(ranges);

  const PointMM& a = anchors.a();
  // B and C relative to A.
  const double bx = anchors.b().x - a.x, by = anchors.b().y - a.y;
  const double cx = anchors.c().x - a.x, cy = anchors.c().y - a.y;

  const double da2 = ranges.d_a * ranges.d_a;
  // 2 bx x + 2 by y = da² - db² + |B|²
  const double r1 = 0.5 * (da2 - ranges.d_b * ranges.d_b + bx * bx + by * by);
  const double r2 = 0.5 * (da2 - ranges.d_c * ranges.d_c + cx * cx + cy * cy);

  const double det = bx * cy - by * cx;
  if (0.5 * std::abs(det) <= AnchorLayout::kMinTriangleArea) {
    throw Error(Errc::CollinearAnchors, "trilateration system is singular");
  }
  const double x = (r1 * cy - by * r2) / det;
  const double y = (bx * r2 - r1 * cx) / det;
  return {a.x + x, a.y + y};
}

}  // namespace uwbfp
