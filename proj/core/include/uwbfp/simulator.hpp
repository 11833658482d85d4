#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uwbfp/geometry.hpp"
#include "uwbfp/random.hpp"

namespace uwbfp {

/// Synthetic TOA ranging error model.
///
/// base = slope * d + offset + N(0, sigma²); with probability p_outlier the base
/// is multiplied by U(1.5, 3); values above inflation_threshold are then
/// multiplied by inflation_factor. Results are clamped to at least 1 mm.
struct NoiseConfig {
  double slope = 1.0;
  double offset = 20.0;
  double sigma = 30.0;
  double inflation_threshold = 1000.0;
  double inflation_factor = 1.0 / 0.9;
  double p_outlier = 0.0;
  std::uint64_t seed = 0;

  /// Noise-free, unbiased ranging.
  static NoiseConfig exact(std::uint64_t seed = 0) { return {1.0, 0.0, 0.0, 1000.0, 1.0, 0.0, seed}; }

  void validate() const;
};

/// One simulated measurement; consumes a fixed number of draws from `stream`.
double simulate_range(double true_distance, const NoiseConfig& cfg, RandomStream& stream);

struct MeasurementSet {
  PointMM location;
  RangeTriple ranges;

  friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;
};

struct Campaign {
  std::vector<PointMM> locations;
  std::size_t reps = 500;
  AnchorLayout anchors;
  NoiseConfig noise;
  /// Area used to validate locations.
  double area_width = 1000.0;
  double area_height = 2000.0;

  void validate() const;
};

/// Seed of the stream feeding the draw for (location, rep, anchor).
std::uint64_t measurement_seed(std::uint64_t seed, std::size_t location, std::size_t rep,
                               Anchor anchor) noexcept;

/// Simulated triple for one (location, rep) cell of a campaign.
RangeTriple simulate_triple(const AnchorLayout& anchors, const PointMM& location,
                            const NoiseConfig& noise, std::size_t location_index,
                            std::size_t rep);

/// Rows ordered by location, then repetition. Every draw comes from its own
/// substream, so the output does not depend on `threads`.
std::vector<MeasurementSet> simulate_campaign(const Campaign& campaign, unsigned threads = 1);

/// Measurement file: header "loc_x,loc_y,d_a,d_b,d_c", one row per set, values
/// at round-trip precision. The same format ingests real hardware logs.
std::string write_measurements(std::span<const MeasurementSet> rows);

/// Throws Parse naming the offending line; ranges must be finite and > 0.
std::vector<MeasurementSet> read_measurements(std::string_view text);

}  // namespace uwbfp
