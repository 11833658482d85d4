#include "uwbfp/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "uwbfp/error.hpp"
#include "uwbfp/parallel.hpp"
#include "uwbfp/random.hpp"
#include "uwbfp/text.hpp"

namespace uwbfp {

std::string_view to_string(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::Tree: return "tree";
    case ClassifierKind::Forest: return "forest";
    case ClassifierKind::SoftVote: break;
  }
  return "vote";
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view text) noexcept {
  for (ClassifierKind k : {ClassifierKind::Knn, ClassifierKind::Tree, ClassifierKind::Forest,
                           ClassifierKind::SoftVote}) {
    if (text == to_string(k)) {
      return k;
    }
  }
  return std::nullopt;
}

namespace {

bool in_area(const PointMM& p, const GridSpec& area) {
  return is_finite(p) && p.x >= 0.0 && p.y >= 0.0 && p.x <= area.width && p.y <= area.height;
}

NoiseConfig with_seed(NoiseConfig noise, std::uint64_t seed) {
  noise.seed = seed;
  return noise;
}

std::string point_text(const PointMM& p) {
  return "(" + text::format_exact(p.x) + "," + text::format_exact(p.y) + ")";
}

/// Runs every (point, trial) through `estimate` and aggregates per point.
template <class Estimator>
std::vector<PointError> run_trials(const PipelineConfig& cfg, const AnchorLayout& anchors,
                                   Estimator&& estimate) {
  const NoiseConfig noise = with_seed(cfg.noise, derive_seed(cfg.seed, {kStreamTrials}));
  const std::size_t per_point = cfg.n_trials;
  std::vector<std::optional<double>> errors(cfg.test_points.size() * per_point);
  parallel_for(errors.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t p = i / per_point;
    const PointMM& truth = cfg.test_points[p];
    const RangeTriple measured = simulate_triple(anchors, truth, noise, p, i % per_point);
    const RangeTriple corrected = correct_triple(measured, cfg.correction);
    try {
      errors[i] = distance(estimate(corrected), truth);
    } catch (const Error&) {
      errors[i].reset();
    }
  });

  std::vector<PointError> out;
  out.reserve(cfg.test_points.size());
  for (std::size_t p = 0; p < cfg.test_points.size(); ++p) {
    out.push_back(aggregate(cfg.test_points[p],
                            std::span(errors).subspan(p * per_point, per_point)));
  }
  return out;
}

void add_run_metadata(ErrorReport& report, const Metadata& described) {
  report.metadata = described;
  std::size_t failed = 0;
  for (const auto& p : report.points) {
    failed += p.failed;
  }
  std::ostringstream hash;
  hash << std::hex << metadata_hash(described);
  report.metadata.emplace_back("failed_trials", std::to_string(failed));
  report.metadata.emplace_back("config_hash", hash.str());
}

}  // namespace

void PipelineConfig::validate(const GridSpec& area) const {
  if (n_trials < 1) {
    throw Error(Errc::InvalidArgument, "n_trials must be at least 1");
  }
  for (const auto& p : test_points) {
    if (!in_area(p, area)) {
      throw Error(Errc::OutOfArea, "test point " + point_text(p) + " outside the area");
    }
  }
  correction.validate();
  noise.validate();
  vote_weights.validate();
  if (model_kind) {
    if (obs_reps < 1 || n_select < 1) {
      throw Error(Errc::InvalidArgument, "observation reps and n_select must be at least 1");
    }
    for (const auto& p : reference_points) {
      if (!in_area(p, area)) {
        throw Error(Errc::OutOfArea, "reference point " + point_text(p) + " outside the area");
      }
    }
  }
}

void ErrorReport::validate() const {
  for (const auto& p : points) {
    const bool ok = p.avg_error >= 0.0 && (!p.max_error || *p.max_error >= p.avg_error);
    if (!ok) {
      throw Error(Errc::InvalidArgument, "report at " + point_text(p.point) +
                                             " violates 0 <= avg <= max");
    }
  }
}

const std::string* ErrorReport::find(std::string_view key) const noexcept {
  for (const auto& [k, v] : metadata) {
    if (k == key) {
      return &v;
    }
  }
  return nullptr;
}

PointError aggregate(const PointMM& point, std::span<const std::optional<double>> errors) {
  PointError out{point, 0.0, 0.0, errors.size(), 0};
  double sum = 0.0;
  double worst = 0.0;
  std::size_t ok = 0;
  for (const auto& e : errors) {
    if (!e) {
      ++out.failed;
      continue;
    }
    sum += *e;
    worst = std::max(worst, *e);
    ++ok;
  }
  if (ok > 0) {
    out.avg_error = std::min(sum / static_cast<double>(ok), worst);
  }
  out.max_error = worst;
  return out;
}

ErrorReport run_baseline(const PipelineConfig& cfg, const AnchorLayout& anchors,
                         const GridSpec& area) {
  cfg.validate(area);
  ErrorReport report;
  report.points = run_trials(cfg, anchors, [&](const RangeTriple& r) { return trilaterate(anchors, r); });
  PipelineConfig described = cfg;
  described.model_kind.reset();
  add_run_metadata(report, describe(described, anchors, area));
  report.metadata.insert(report.metadata.begin(), {"pipeline", "baseline"});
  return report;
}

ObservationData observations_from_rows(std::span<const MeasurementSet> rows,
                                       const std::array<PointMM, 4>& reference_points,
                                       const MadFilterParams& mad, const CorrectionPolicy& correction) {
  ObservationData obs;
  obs.points = reference_points;
  for (std::size_t p = 0; p < 4; ++p) {
    std::array<std::vector<double>, 3> columns;
    for (const auto& row : rows) {
      if (row.location == reference_points[p]) {
        for (Anchor k : kAnchors) {
          columns[static_cast<int>(k)].push_back(row.ranges[k]);
        }
      }
    }
    if (columns[0].empty()) {
      throw Error(Errc::MissingReferencePoint,
                  "no measurements at reference point " + point_text(reference_points[p]));
    }
    for (int k = 0; k < 3; ++k) {
      auto& cleaned = obs.series[p][k];
      cleaned = mad_filter(columns[k], mad);
      for (double& v : cleaned) {
        v = correct_range(v, correction);
      }
    }
  }
  return obs;
}

ObservationData collect_observations(const PipelineConfig& cfg, const AnchorLayout& anchors) {
  Campaign campaign;
  campaign.locations.assign(cfg.reference_points.begin(), cfg.reference_points.end());
  campaign.reps = cfg.obs_reps;
  campaign.anchors = anchors;
  campaign.noise = with_seed(cfg.noise, derive_seed(cfg.seed, {kStreamObservations}));
  campaign.area_width = std::numeric_limits<double>::max();
  campaign.area_height = std::numeric_limits<double>::max();
  const auto rows = simulate_campaign(campaign, cfg.threads);
  return observations_from_rows(rows, cfg.reference_points, cfg.mad, cfg.correction);
}

ErrorReport run_ml(const PipelineConfig& cfg, const AnchorLayout& anchors, const GridSpec& spec,
                   MlArtifacts* artifacts) {
  if (!cfg.model_kind) {
    throw Error(Errc::InvalidArgument, "the learning pipeline needs a calibration model kind");
  }
  cfg.validate(spec);

  const ObservationData obs = collect_observations(cfg, anchors);
  FitDiagnostics diag;
  const CalibrationModel model =
      fit_model(*cfg.model_kind, obs, anchors,
                {cfg.n_select, derive_seed(cfg.seed, {kStreamSelection})}, &diag);
  const FingerprintDB db = build_db(model, spec, anchors, cfg.threads);
  const TrainingSet train = training_set_from_db(db, cfg.learners.augment_copies,
                                                 cfg.learners.augment_sigma,
                                                 derive_seed(cfg.seed, {kStreamAugment}));

  std::optional<KnnClassifier> knn;
  std::optional<TreeClassifier> tree;
  std::optional<ForestClassifier> forest;
  const ClassifierKind kind = cfg.classifier;
  if (kind == ClassifierKind::Knn || kind == ClassifierKind::SoftVote) {
    knn = KnnClassifier::train(train, cfg.learners.k);
  }
  if (kind == ClassifierKind::Tree || kind == ClassifierKind::SoftVote) {
    tree = TreeClassifier::train(train, cfg.learners.tree);
  }
  if (kind == ClassifierKind::Forest) {
    ForestParams fp;
    fp.n_trees = cfg.learners.n_trees;
    fp.features_per_split = cfg.learners.features_per_split;
    fp.bootstrap = cfg.learners.bootstrap;
    fp.tree = cfg.learners.tree;
    fp.seed = derive_seed(cfg.seed, {kStreamForest});
    forest = ForestClassifier::train(train, fp, cfg.threads);
  }

  auto classify = [&](const RangeTriple& q) -> CellLabel {
    switch (kind) {
      case ClassifierKind::Knn: return knn->predict_proba(q).argmax();
      case ClassifierKind::Tree: return tree->predict_proba(q).argmax();
      case ClassifierKind::Forest: return forest->predict_proba(q).argmax();
      case ClassifierKind::SoftVote: break;
    }
    return soft_vote(knn->predict_proba(q), tree->predict_proba(q), cfg.vote_weights);
  };

  ErrorReport report;
  report.points = run_trials(cfg, anchors, [&](const RangeTriple& q) { return localize(classify(q), spec); });
  add_run_metadata(report, describe(cfg, anchors, spec));
  report.metadata.insert(report.metadata.begin(), {"pipeline", "ml"});
  for (Anchor k : kAnchors) {
    const std::string name(1, "ABC"[static_cast<int>(k)]);
    report.metadata.emplace_back("fit." + name + ".a", text::format_exact(model.eq(k).a));
    report.metadata.emplace_back("fit." + name + ".b", text::format_exact(model.eq(k).b));
  }
  report.metadata.emplace_back("fit.selected", std::to_string(diag.selected));
  report.metadata.emplace_back("fit.skipped", std::to_string(diag.skipped));

  if (artifacts != nullptr) {
    *artifacts = {model, diag};
  }
  return report;
}

Metadata describe(const PipelineConfig& cfg, const AnchorLayout& anchors, const GridSpec& spec) {
  using text::format_exact;
  auto points = [](std::span<const PointMM> pts) {
    std::string s;
    for (const auto& p : pts) {
      if (!s.empty()) {
        s += ";";
      }
      s += format_exact(p.x) + " " + format_exact(p.y);
    }
    return s;
  };
  auto pt = [](const PointMM& p) { return format_exact(p.x) + " " + format_exact(p.y); };

  Metadata m = {
      {"run.seed", std::to_string(cfg.seed)},
      {"grid.width", format_exact(spec.width)},
      {"grid.height", format_exact(spec.height)},
      {"grid.spacing", format_exact(spec.spacing)},
      {"anchors.a", pt(anchors.a())},
      {"anchors.b", pt(anchors.b())},
      {"anchors.c", pt(anchors.c())},
      {"noise.slope", format_exact(cfg.noise.slope)},
      {"noise.offset", format_exact(cfg.noise.offset)},
      {"noise.sigma", format_exact(cfg.noise.sigma)},
      {"noise.inflation_threshold", format_exact(cfg.noise.inflation_threshold)},
      {"noise.inflation_factor", format_exact(cfg.noise.inflation_factor)},
      {"noise.p_outlier", format_exact(cfg.noise.p_outlier)},
      {"correction.threshold", format_exact(cfg.correction.threshold)},
      {"correction.ratio", format_exact(cfg.correction.ratio)},
      {"eval.n_trials", std::to_string(cfg.n_trials)},
      {"eval.test_points", points(cfg.test_points)},
      {"calibration.model", cfg.model_kind ? std::string(to_string(*cfg.model_kind)) : "none"},
  };
  if (cfg.model_kind) {
    const Metadata ml = {
        {"calibration.obs_reps", std::to_string(cfg.obs_reps)},
        {"calibration.n_select", std::to_string(cfg.n_select)},
        {"calibration.mad_k", format_exact(cfg.mad.k)},
        {"calibration.mad_scale", format_exact(cfg.mad.scale)},
        {"calibration.reference_points", points(cfg.reference_points)},
        {"learners.classifier", std::string(to_string(cfg.classifier))},
        {"learners.weights", format_exact(cfg.vote_weights.knn) + ":" + format_exact(cfg.vote_weights.tree)},
        {"learners.k", std::to_string(cfg.learners.k)},
        {"learners.max_depth", std::to_string(cfg.learners.tree.max_depth)},
        {"learners.min_leaf", std::to_string(cfg.learners.tree.min_leaf)},
        {"learners.n_trees", std::to_string(cfg.learners.n_trees)},
        {"learners.features_per_split", std::to_string(cfg.learners.features_per_split)},
        {"learners.bootstrap", cfg.learners.bootstrap ? "true" : "false"},
        {"learners.augment_copies", std::to_string(cfg.learners.augment_copies)},
        {"learners.augment_sigma", format_exact(cfg.learners.augment_sigma)},
    };
    m.insert(m.end(), ml.begin(), ml.end());
  }
  return m;
}

std::uint64_t metadata_hash(const Metadata& entries) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : entries) {
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  return h;
}

ComparisonTable compare(const std::vector<ErrorReport>& reports) {
  if (reports.size() < 2) {
    throw Error(Errc::MismatchedTestPoints, "comparison needs a baseline and at least one report");
  }
  const ErrorReport& base = reports.front();
  ComparisonTable table;
  for (std::size_t r = 1; r < reports.size(); ++r) {
    const ErrorReport& cand = reports[r];
    if (cand.points.size() != base.points.size()) {
      throw Error(Errc::MismatchedTestPoints, "report " + std::to_string(r) +
                                                  " has a different number of test points");
    }
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < base.points.size(); ++i) {
      const auto& b = base.points[i];
      const auto& c = cand.points[i];
      if (!(b.point == c.point)) {
        throw Error(Errc::MismatchedTestPoints, "report " + std::to_string(r) + " lists " +
                                                    point_text(c.point) + " where the baseline has " +
                                                    point_text(b.point));
      }
      double reduction = 0.0;
      if (b.avg_error != c.avg_error) {
        reduction = 100.0 * (b.avg_error - c.avg_error) / b.avg_error;
      }
      rows.push_back({c.point, c.avg_error, c.max_error, b.avg_error, reduction});
    }
    table.blocks.push_back(std::move(rows));
    const std::string* name = cand.find("name");
    table.names.push_back(name ? *name : "report" + std::to_string(r));
  }
  return table;
}

namespace {

constexpr std::string_view kReportHeader = "point_x,point_y,avg_error_mm,max_error_mm";

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) {
    s.append(width - s.size(), ' ');
  }
  return s;
}

std::string optional_fixed(const std::optional<double>& v) {
  return v ? text::format_fixed(*v, 5) : std::string();
}

}  // namespace

std::string emit_report(const ErrorReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::TextTable) {
    out += pad("Point", 16) + pad("Average error", 16) + "Maximum error\n";
    for (const auto& p : report.points) {
      out += pad(point_text(p.point), 16) + pad(text::format_fixed(p.avg_error, 5), 16) +
             (p.max_error ? text::format_fixed(*p.max_error, 5) : "-") + "\n";
    }
    return out;
  }
  for (const auto& [k, v] : report.metadata) {
    out += "# " + k + "=" + v + "\n";
  }
  out += kReportHeader;
  out += "\n";
  for (const auto& p : report.points) {
    out += text::format_exact(p.point.x) + "," + text::format_exact(p.point.y) + "," +
           text::format_fixed(p.avg_error, 5) + "," + optional_fixed(p.max_error) + "\n";
  }
  return out;
}

ErrorReport parse_report(std::string_view contents) {
  ErrorReport report;
  bool header_seen = false;
  std::size_t line_no = 0;
  for (std::string_view raw : text::lines(contents)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    const std::string_view line = text::trim(raw);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '#') {
      const std::string_view body = text::trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        continue;  // free-form comment
      }
      report.metadata.emplace_back(std::string(text::trim(body.substr(0, eq))),
                                   std::string(text::trim(body.substr(eq + 1))));
      continue;
    }
    if (!header_seen) {
      if (line != kReportHeader) {
        throw Error(Errc::Parse, where + ": expected header '" + std::string(kReportHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = text::split(line, ',');
    if (f.size() != 4) {
      throw Error(Errc::Parse, where + ": expected 4 fields");
    }
    PointError p;
    p.point = {text::parse_double(f[0], "point_x"), text::parse_double(f[1], "point_y")};
    p.avg_error = text::parse_double(f[2], "avg_error_mm");
    if (!text::trim(f[3]).empty()) {
      p.max_error = text::parse_double(f[3], "max_error_mm");
    }
    report.points.push_back(p);
  }
  if (!header_seen) {
    throw Error(Errc::Parse, "missing report header");
  }
  report.validate();
  return report;
}

std::string emit_comparison(const ComparisonTable& table, ReportFormat format) {
  std::string out;
  for (std::size_t b = 0; b < table.blocks.size(); ++b) {
    if (format == ReportFormat::TextTable) {
      out += table.names[b] + "\n";
      out += pad("Point", 16) + pad("Average error", 16) + pad("Maximum error", 16) +
             pad("Baseline avg", 16) + "Reduction\n";
      for (const auto& r : table.blocks[b]) {
        out += pad(point_text(r.point), 16) + pad(text::format_fixed(r.avg_error, 5), 16) +
               pad(r.max_error ? text::format_fixed(*r.max_error, 5) : "-", 16) +
               pad(text::format_fixed(r.baseline_avg, 5), 16) +
               text::format_fixed(r.reduction_pct, 2) + "%\n";
      }
      continue;
    }
    if (b == 0) {
      out += std::string(kReportHeader) + ",baseline_avg_mm,reduction_pct\n";
    }
    out += "# candidate=" + table.names[b] + "\n";
    for (const auto& r : table.blocks[b]) {
      out += text::format_exact(r.point.x) + "," + text::format_exact(r.point.y) + "," +
             text::format_fixed(r.avg_error, 5) + "," + optional_fixed(r.max_error) + "," +
             text::format_fixed(r.baseline_avg, 5) + "," + text::format_fixed(r.reduction_pct, 2) +
             "\n";
    }
  }
  return out;
}

}  // namespace uwbfp
