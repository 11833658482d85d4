#include "uwbfp/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "uwbfp/error.hpp"
#include "uwbfp/parallel.hpp"
#include "uwbfp/text.hpp"

namespace uwbfp {

void NoiseConfig::validate() const {
  if (!(slope > 0.0) || !std::isfinite(slope)) {
    throw Error(Errc::InvalidArgument, "noise slope must be finite and > 0");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::InvalidArgument, "noise sigma must be finite and >= 0");
  }
  if (!(inflation_factor >= 1.0) || !std::isfinite(inflation_factor)) {
    throw Error(Errc::InvalidArgument, "inflation factor must be finite and >= 1");
  }
  if (!std::isfinite(offset) || !std::isfinite(inflation_threshold)) {
    throw Error(Errc::InvalidArgument, "noise offset and threshold must be finite");
  }
  if (!(p_outlier >= 0.0 && p_outlier <= 1.0)) {
    throw Error(Errc::InvalidArgument, "outlier probability must lie in [0, 1]");
  }
}

double simulate_range(double true_distance, const NoiseConfig& cfg, RandomStream& stream) {
  double base = cfg.slope * true_distance + cfg.offset + cfg.sigma * stream.normal();
  if (cfg.p_outlier > 0.0 && stream.uniform() < cfg.p_outlier) {
    base *= stream.uniform(1.5, 3.0);
  }
  const double measured = base > cfg.inflation_threshold ? base * cfg.inflation_factor : base;
  return std::max(measured, 1.0);
}

void Campaign::validate() const {
  if (reps < 1) {
    throw Error(Errc::InvalidArgument, "campaign needs at least one repetition");
  }
  noise.validate();
  for (const PointMM& p : locations) {
    if (!is_finite(p) || p.x < 0.0 || p.y < 0.0 || p.x > area_width || p.y > area_height) {
      throw Error(Errc::OutOfArea, "campaign location outside the test area");
    }
  }
}

std::uint64_t measurement_seed(std::uint64_t seed, std::size_t location, std::size_t rep,
                               Anchor anchor) noexcept {
  return derive_seed(seed, {location, rep, static_cast<std::uint64_t>(anchor)});
}

RangeTriple simulate_triple(const AnchorLayout& anchors, const PointMM& location,
                            const NoiseConfig& noise, std::size_t location_index,
                            std::size_t rep) {
  const RangeTriple exact = anchors.ranges_from(location);
  RangeTriple out;
  for (Anchor k : kAnchors) {
    RandomStream stream(measurement_seed(noise.seed, location_index, rep, k));
    out[k] = simulate_range(exact[k], noise, stream);
  }
  return out;
}

std::vector<MeasurementSet> simulate_campaign(const Campaign& c, unsigned threads) {
  c.validate();
  std::vector<MeasurementSet> rows(c.locations.size() * c.reps);
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const std::size_t loc = i / c.reps;
    const std::size_t rep = i % c.reps;
    rows[i] = {c.locations[loc], simulate_triple(c.anchors, c.locations[loc], c.noise, loc, rep)};
  });
  return rows;
}

namespace {
constexpr std::string_view kMeasurementHeader = "loc_x,loc_y,d_a,d_b,d_c";
}  // namespace

std::string write_measurements(std::span<const MeasurementSet> rows) {
  std::string out(kMeasurementHeader);
  out += "\n";
  for (const auto& r : rows) {
    out += text::format_exact(r.location.x) + "," + text::format_exact(r.location.y) + "," +
           text::format_exact(r.ranges.d_a) + "," + text::format_exact(r.ranges.d_b) + "," +
           text::format_exact(r.ranges.d_c) + "\n";
  }
  return out;
}

std::vector<MeasurementSet> read_measurements(std::string_view contents) {
  const auto all = text::lines(contents);
  if (all.empty() || text::trim(all[0]) != kMeasurementHeader) {
    throw Error(Errc::Parse, "line 1: expected header '" + std::string(kMeasurementHeader) + "'");
  }
  std::vector<MeasurementSet> rows;
  rows.reserve(all.size() - 1);
  for (std::size_t n = 1; n < all.size(); ++n) {
    if (text::trim(all[n]).empty()) {
      continue;
    }
    const std::string where = "line " + std::to_string(n + 1);
    const auto f = text::split(all[n], ',');
    if (f.size() != 5) {
      throw Error(Errc::Parse, where + ": expected 5 fields, found " + std::to_string(f.size()));
    }
    MeasurementSet row;
    try {
      row.location = {text::parse_double(f[0], "loc_x"), text::parse_double(f[1], "loc_y")};
      row.ranges = {text::parse_double(f[2], "d_a"), text::parse_double(f[3], "d_b"),
                    text::parse_double(f[4], "d_c")};
      validate_ranges(row.ranges);
    } catch (const Error& e) {
      throw Error(Errc::Parse, where + ": " + e.what());
    }
    if (!is_finite(row.location)) {
      throw Error(Errc::Parse, where + ": location must be finite");
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace uwbfp
