#include "uwbfp/fingerprint.hpp"

#include <algorithm>
#include <cmath>

#include "uwbfp/error.hpp"
#include "uwbfp/parallel.hpp"
#include "uwbfp/text.hpp"

namespace uwbfp {

namespace {

std::size_t whole_multiple(double length, double spacing, const char* what) {
  const double q = length / spacing;
  const double r = std::round(q);
  if (!(r >= 1.0) || std::abs(q - r) > 1e-9 * r || r > 1e8) {
    throw Error(Errc::InvalidArgument,
                std::string("grid ") + what + " must be a positive integer multiple of the spacing");
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

void GridSpec::validate() const {
  if (!std::isfinite(spacing) || !(spacing > 0.0)) {
    throw Error(Errc::InvalidArgument, "grid spacing must be finite and > 0");
  }
  whole_multiple(width, spacing, "width");
  whole_multiple(height, spacing, "height");
}

std::size_t GridSpec::cols() const { return whole_multiple(width, spacing, "width"); }
std::size_t GridSpec::rows() const { return whole_multiple(height, spacing, "height"); }

PointMM cell_vertex(const GridSpec& spec, CellLabel label) {
  const std::size_t cols = spec.cols();
  if (label.index >= spec.cell_count()) {
    throw Error(Errc::LabelOutOfRange, "label " + std::to_string(label.index) + " outside grid of " +
                                           std::to_string(spec.cell_count()) + " cells");
  }
  return {static_cast<double>(label.index % cols) * spec.spacing,
          static_cast<double>(label.index / cols) * spec.spacing};
}

CellLabel vertex_to_label(const GridSpec& spec, const PointMM& p) {
  if (!is_finite(p) || p.x < 0.0 || p.y < 0.0 || p.x > spec.width || p.y > spec.height) {
    throw Error(Errc::OutOfArea, "point (" + text::format_exact(p.x) + "," +
                                     text::format_exact(p.y) + ") outside the grid");
  }
  const std::size_t cols = spec.cols();
  const std::size_t rows = spec.rows();
  const auto col = std::min(cols - 1, static_cast<std::size_t>(std::floor(p.x / spec.spacing)));
  const auto row = std::min(rows - 1, static_cast<std::size_t>(std::floor(p.y / spec.spacing)));
  return {static_cast<std::uint32_t>(row * cols + col)};
}

FingerprintDB::FingerprintDB(GridSpec spec, std::vector<RangeTriple> entries)
    : spec_(spec), entries_(std::move(entries)) {
  spec_.validate();
  if (entries_.size() != spec_.cell_count()) {
    throw Error(Errc::InvalidArgument, "fingerprint count " + std::to_string(entries_.size()) +
                                           " does not match " +
                                           std::to_string(spec_.cell_count()) + " cells");
  }
  for (const auto& e : entries_) {
    if (!std::isfinite(e.d_a) || !std::isfinite(e.d_b) || !std::isfinite(e.d_c)) {
      throw Error(Errc::NonFiniteRange, "fingerprint entries must be finite");
    }
  }
}

FingerprintDB build_db(const CalibrationModel& model, const GridSpec& spec,
                       const AnchorLayout& anchors, unsigned threads) {
  spec.validate();
  std::vector<RangeTriple> entries(spec.cell_count());
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    const PointMM v = cell_vertex(spec, {static_cast<std::uint32_t>(i)});
    const RangeTriple exact = anchors.ranges_from(v);
    RangeTriple& out = entries[i];
    for (Anchor k : kAnchors) {
      out[k] = predict_measured(model, k, exact[k]);
    }
  });
  return FingerprintDB(spec, std::move(entries));
}

std::string write_db(const FingerprintDB& db) {
  const GridSpec& s = db.spec();
  std::string out = text::format_exact(s.spacing) + "," + text::format_exact(s.width) + "," +
                    text::format_exact(s.height) + "\n";
  for (std::uint32_t i = 0; i < db.size(); ++i) {
    const PointMM v = cell_vertex(s, {i});
    const RangeTriple& f = db.entries()[i];
    out += std::to_string(i) + "," + text::format_exact(v.x) + "," + text::format_exact(v.y) + "," +
           text::format_exact(f.d_a) + "," + text::format_exact(f.d_b) + "," +
           text::format_exact(f.d_c) + "\n";
  }
  return out;
}

FingerprintDB read_db(std::string_view contents) {
  const auto all = text::lines(contents);
  if (all.empty()) {
    throw Error(Errc::Parse, "empty fingerprint database");
  }
  const auto head = text::split(all[0], ',');
  if (head.size() != 3) {
    throw Error(Errc::Parse, "line 1: expected 'spacing,width,height'");
  }
  GridSpec spec{text::parse_double(head[1], "width"), text::parse_double(head[2], "height"),
                text::parse_double(head[0], "spacing")};
  spec.validate();

  std::vector<RangeTriple> entries;
  entries.reserve(spec.cell_count());
  for (std::size_t n = 1; n < all.size(); ++n) {
    if (text::trim(all[n]).empty()) {
      continue;
    }
    const std::string where = "line " + std::to_string(n + 1);
    const auto f = text::split(all[n], ',');
    if (f.size() != 6) {
      throw Error(Errc::Parse, where + ": expected 'label,x,y,fa,fb,fc'");
    }
    if (text::parse_integer(f[0], "label") != static_cast<long long>(entries.size())) {
      throw Error(Errc::Parse, where + ": labels must be consecutive from 0");
    }
    const PointMM v{text::parse_double(f[1], "x"), text::parse_double(f[2], "y")};
    if (entries.size() >= spec.cell_count() ||
        !(cell_vertex(spec, {static_cast<std::uint32_t>(entries.size())}) == v)) {
      throw Error(Errc::Parse, where + ": vertex does not match its label");
    }
    entries.push_back({text::parse_double(f[3], "fa"), text::parse_double(f[4], "fb"),
                       text::parse_double(f[5], "fc")});
  }
  return FingerprintDB(spec, std::move(entries));
}

}  // namespace uwbfp
