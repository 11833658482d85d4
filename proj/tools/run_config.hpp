#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uwbfp/eval.hpp"

namespace uwbfp::cli {

/// Invalid configuration text or values; carries the offending line when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `section.key = value` settings with documented defaults.
///
/// Later assignments (config file, then flags) override earlier ones; unknown
/// keys are rejected.
class RunConfig {
 public:
  RunConfig();

  /// Parses config-file text. `origin` prefixes diagnostics.
  void load(std::string_view text, std::string_view origin = "config");

  /// Sets one key, marking it as explicitly given.
  void set(const std::string& key, const std::string& value, std::string_view origin = "flag");

  const std::string& get(const std::string& key) const;
  bool explicitly_set(const std::string& key) const { return explicit_.count(key) != 0; }

  /// All keys with their resolved values, in key order.
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  // Typed views. All throw ConfigError naming the key on malformed values.
  std::uint64_t seed() const;
  GridSpec grid() const;
  AnchorLayout anchors() const;
  NoiseConfig noise() const;
  CorrectionPolicy correction() const;
  std::optional<ModelKind> model() const;
  Campaign campaign() const;
  /// Also checks the model/classifier combination.
  PipelineConfig pipeline() const;
  bool with_baseline() const;

 private:
  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  PointMM point(const std::string& key) const;
  std::vector<PointMM> points(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::set<std::string> explicit_;
};

/// Parses "x y; x y; ..." point lists.
std::vector<PointMM> parse_points(std::string_view text);
/// Parses "KNN:TREE".
VoteWeights parse_weights(std::string_view text);

}  // namespace uwbfp::cli
