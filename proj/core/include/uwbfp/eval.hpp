#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uwbfp/calibration.hpp"
#include "uwbfp/fingerprint.hpp"
#include "uwbfp/geometry.hpp"
#include "uwbfp/learners.hpp"
#include "uwbfp/preprocess.hpp"
#include "uwbfp/simulator.hpp"

namespace uwbfp {

enum class ClassifierKind { Knn, Tree, Forest, SoftVote };

std::string_view to_string(ClassifierKind kind) noexcept;
/// Accepts knn, tree, forest, vote.
std::optional<ClassifierKind> parse_classifier_kind(std::string_view text) noexcept;

struct LearnerConfig {
  std::size_t k = 1;
  TreeParams tree;
  std::size_t n_trees = 100;
  std::size_t features_per_split = 1;
  bool bootstrap = true;
  /// Noisy copies of each fingerprint added to the training set.
  std::size_t augment_copies = 0;
  double augment_sigma = 0.0;
};

inline const std::vector<PointMM> kDefaultTestPoints = {
    {250.0, 1500.0}, {250.0, 500.0}, {500.0, 0.0}, {500.0, 2000.0}, {750.0, 1500.0}, {750.0, 500.0}};

/// Everything one experiment needs except the anchor layout and grid.
///
/// `noise.seed` is ignored; every random stream is derived from `seed`
/// (see the kStream* constants).
struct PipelineConfig {
  std::optional<ModelKind> model_kind = ModelKind::Four;
  CorrectionPolicy correction;
  ClassifierKind classifier = ClassifierKind::SoftVote;
  VoteWeights vote_weights;
  std::size_t n_trials = 400;
  std::vector<PointMM> test_points = kDefaultTestPoints;
  std::uint64_t seed = 0;

  NoiseConfig noise;
  /// Repetitions simulated at each reference point for fitting.
  std::size_t obs_reps = 300;
  std::size_t n_select = 60;
  MadFilterParams mad;
  std::array<PointMM, 4> reference_points = ObservationData::kDefaultPoints;
  LearnerConfig learners;
  unsigned threads = 1;

  void validate(const GridSpec& area) const;
};

// Substream keys under PipelineConfig::seed.
inline constexpr std::uint64_t kStreamTrials = 1;
inline constexpr std::uint64_t kStreamObservations = 2;
inline constexpr std::uint64_t kStreamSelection = 3;
inline constexpr std::uint64_t kStreamForest = 4;
inline constexpr std::uint64_t kStreamAugment = 5;

struct PointError {
  PointMM point;
  double avg_error = 0.0;
  /// Absent in reference tables that only list averages.
  std::optional<double> max_error;
  std::size_t trials = 0;
  std::size_t failed = 0;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct ErrorReport {
  std::vector<PointError> points;
  Metadata metadata;

  /// Throws InvalidArgument unless 0 <= avg <= max at every point.
  void validate() const;
  const std::string* find(std::string_view key) const noexcept;
};

/// Mean and maximum of per-trial errors in trial order.
PointError aggregate(const PointMM& point, std::span<const std::optional<double>> errors);

/// Trilateration without learning: simulate, correct, trilaterate.
ErrorReport run_baseline(const PipelineConfig& cfg, const AnchorLayout& anchors,
                         const GridSpec& area = {});

/// Groups measurement rows by reference point, then per anchor applies the MAD
/// filter followed by the range correction. Rows at other locations are
/// ignored. Throws MissingReferencePoint when a point has no rows.
ObservationData observations_from_rows(std::span<const MeasurementSet> rows,
                                       const std::array<PointMM, 4>& reference_points,
                                       const MadFilterParams& mad, const CorrectionPolicy& correction);

/// Simulates the reference-point campaign and cleans it as above.
ObservationData collect_observations(const PipelineConfig& cfg, const AnchorLayout& anchors);

struct MlArtifacts {
  CalibrationModel model;
  FitDiagnostics fit;
};

/// Fit, build the fingerprint grid, train, then classify every trial.
ErrorReport run_ml(const PipelineConfig& cfg, const AnchorLayout& anchors, const GridSpec& spec,
                   MlArtifacts* artifacts = nullptr);

/// Resolved settings as config-style key/value pairs. The thread count is left
/// out because it never changes a result.
Metadata describe(const PipelineConfig& cfg, const AnchorLayout& anchors, const GridSpec& spec);

/// 64-bit FNV-1a of "key=value\n" lines.
std::uint64_t metadata_hash(const Metadata& entries);

struct ComparisonRow {
  PointMM point;
  double avg_error;
  std::optional<double> max_error;
  double baseline_avg;
  /// 100 * (baseline - avg) / baseline.
  double reduction_pct;
};

struct ComparisonTable {
  /// One block of rows per candidate, candidates in input order after the baseline.
  std::vector<std::vector<ComparisonRow>> blocks;
  std::vector<std::string> names;
};

/// reports[0] is the baseline. Throws MismatchedTestPoints when fewer than two
/// reports are given or their test points differ.
ComparisonTable compare(const std::vector<ErrorReport>& reports);

enum class ReportFormat { TextTable, Delimited };

/// Delimited: "# key=value" metadata lines, then
/// "point_x,point_y,avg_error_mm,max_error_mm" and one row per point with five
/// decimals. An absent maximum is an empty field.
std::string emit_report(const ErrorReport& report, ReportFormat format);
ErrorReport parse_report(std::string_view text);

/// Delimited comparison adds baseline_avg_mm and reduction_pct columns.
std::string emit_comparison(const ComparisonTable& table, ReportFormat format);

}  // namespace uwbfp
