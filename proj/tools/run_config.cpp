#include "run_config.hpp"

#include <algorithm>
#include <charconv>

#include "uwbfp/error.hpp"
#include "uwbfp/text.hpp"

namespace uwbfp::cli {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"run.seed", "0"},
      {"grid.width", "1000"},
      {"grid.height", "2000"},
      {"grid.spacing", "25"},
      {"anchors.a", "0 0"},
      {"anchors.b", "0 2000"},
      {"anchors.c", "1000 0"},
      {"noise.slope", "1"},
      {"noise.offset", "20"},
      {"noise.sigma", "30"},
      {"noise.inflation_threshold", "1000"},
      {"noise.inflation_factor", text::format_exact(1.0 / 0.9)},
      {"noise.p_outlier", "0"},
      {"correction.threshold", "1000"},
      {"correction.ratio", "0.9"},
      {"campaign.locations",
       "100 100; 900 100; 100 1900; 900 1900; 250 1500; 250 500; 500 0; 500 2000; 750 1500; 750 500"},
      {"campaign.reps", "500"},
      {"calibration.model", "four"},
      {"calibration.obs_reps", "300"},
      {"calibration.n_select", "60"},
      {"calibration.mad_k", "3"},
      {"calibration.mad_scale", "1.4826"},
      {"calibration.reference_points", "100 100; 900 100; 100 1900; 900 1900"},
      {"learners.classifier", "vote"},
      {"learners.weights", "3:1"},
      {"learners.k", "1"},
      {"learners.max_depth", "0"},
      {"learners.min_leaf", "1"},
      {"learners.n_trees", "100"},
      {"learners.features_per_split", "1"},
      {"learners.bootstrap", "true"},
      {"learners.augment_copies", "0"},
      {"learners.augment_sigma", "0"},
      {"eval.n_trials", "400"},
      {"eval.test_points", "250 1500; 250 500; 500 0; 500 2000; 750 1500; 750 500"},
      {"eval.baseline", "true"},
      {"eval.threads", "1"},
      {"io.measurements", "measurements.csv"},
      {"io.calibration", "calibration.csv"},
      {"io.db", "fingerprints.csv"},
      {"io.report", "report.csv"},
  };
  return d;
}

bool parse_bool(std::string_view v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + std::string(v) + "'");
}

}  // namespace

std::vector<PointMM> parse_points(std::string_view s) {
  std::vector<PointMM> out;
  if (text::trim(s).empty()) {
    return out;
  }
  for (auto item : text::split(s, ';')) {
    const std::string_view t = text::trim(item);
    const auto sp = t.find_first_of(" \t,");
    if (sp == std::string_view::npos) {
      throw Error(Errc::Parse, "point '" + std::string(t) + "' needs two coordinates");
    }
    out.push_back({text::parse_double(t.substr(0, sp), "x"),
                   text::parse_double(text::trim(t.substr(sp + 1)), "y")});
  }
  return out;
}

VoteWeights parse_weights(std::string_view s) {
  const auto f = text::split(s, ':');
  if (f.size() != 2) {
    throw Error(Errc::Parse, "weights must look like KNN:TREE, got '" + std::string(s) + "'");
  }
  VoteWeights w{text::parse_double(f[0], "knn weight"), text::parse_double(f[1], "tree weight")};
  w.validate();
  return w;
}

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::load(std::string_view contents, std::string_view origin) {
  std::size_t line_no = 0;
  for (std::string_view raw : text::lines(contents)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = text::trim(line);
    if (line.empty()) {
      continue;
    }
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'section.key = value'");
    }
    set(std::string(text::trim(line.substr(0, eq))), std::string(text::trim(line.substr(eq + 1))),
        where);
  }
}

void RunConfig::set(const std::string& key, const std::string& value, std::string_view origin) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError(std::string(origin) + ": unknown key '" + key + "'");
  }
  it->second = value;
  explicit_.insert(key);
}

const std::string& RunConfig::get(const std::string& key) const { return values_.at(key); }

double RunConfig::number(const std::string& key) const {
  try {
    return text::parse_double(get(key), key);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::size_t RunConfig::count(const std::string& key) const {
  long long v = 0;
  try {
    v = text::parse_integer(get(key), key);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (v < 0) {
    throw ConfigError(key + ": must be non-negative");
  }
  return static_cast<std::size_t>(v);
}

PointMM RunConfig::point(const std::string& key) const {
  const auto pts = points(key);
  if (pts.size() != 1) {
    throw ConfigError(key + ": expected a single 'x y' point");
  }
  return pts.front();
}

std::vector<PointMM> RunConfig::points(const std::string& key) const {
  try {
    return parse_points(get(key));
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::uint64_t RunConfig::seed() const {
  const std::string& s = get("run.seed");
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("run.seed: expected an unsigned integer, got '" + s + "'");
  }
  return v;
}

GridSpec RunConfig::grid() const {
  GridSpec g{number("grid.width"), number("grid.height"), number("grid.spacing")};
  try {
    g.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return g;
}

AnchorLayout RunConfig::anchors() const {
  try {
    return AnchorLayout(point("anchors.a"), point("anchors.b"), point("anchors.c"));
  } catch (const Error& e) {
    throw ConfigError(std::string("anchors: ") + e.what());
  }
}

NoiseConfig RunConfig::noise() const {
  NoiseConfig n;
  n.slope = number("noise.slope");
  n.offset = number("noise.offset");
  n.sigma = number("noise.sigma");
  n.inflation_threshold = number("noise.inflation_threshold");
  n.inflation_factor = number("noise.inflation_factor");
  n.p_outlier = number("noise.p_outlier");
  n.seed = derive_seed(seed(), {kStreamObservations});
  try {
    n.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return n;
}

CorrectionPolicy RunConfig::correction() const {
  CorrectionPolicy c{number("correction.threshold"), number("correction.ratio")};
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::optional<ModelKind> RunConfig::model() const {
  const std::string& m = get("calibration.model");
  if (m == "none") {
    return std::nullopt;
  }
  const auto kind = parse_model_kind(m);
  if (!kind) {
    throw ConfigError("calibration.model: expected one, two, three, four or none, got '" + m + "'");
  }
  return kind;
}

Campaign RunConfig::campaign() const {
  Campaign c;
  const GridSpec g = grid();
  c.locations = points("campaign.locations");
  c.reps = count("campaign.reps");
  c.anchors = anchors();
  c.noise = noise();
  c.area_width = g.width;
  c.area_height = g.height;
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("campaign: ") + e.what());
  }
  return c;
}

bool RunConfig::with_baseline() const { return parse_bool(get("eval.baseline"), "eval.baseline"); }

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.model_kind = model();
  if (!p.model_kind && explicitly_set("learners.classifier")) {
    throw ConfigError("calibration.model = none runs trilateration only; a classifier cannot be requested");
  }
  p.correction = correction();
  const auto cls = parse_classifier_kind(get("learners.classifier"));
  if (!cls) {
    throw ConfigError("learners.classifier: expected knn, tree, forest or vote, got '" +
                      get("learners.classifier") + "'");
  }
  p.classifier = *cls;
  try {
    p.vote_weights = parse_weights(get("learners.weights"));
  } catch (const Error& e) {
    throw ConfigError(std::string("learners.weights: ") + e.what());
  }
  p.n_trials = count("eval.n_trials");
  p.test_points = points("eval.test_points");
  p.seed = seed();
  p.noise = noise();
  p.obs_reps = count("calibration.obs_reps");
  p.n_select = count("calibration.n_select");
  p.mad = {number("calibration.mad_k"), number("calibration.mad_scale")};
  const auto refs = points("calibration.reference_points");
  if (refs.size() != 4) {
    throw ConfigError("calibration.reference_points: expected exactly four points");
  }
  std::copy(refs.begin(), refs.end(), p.reference_points.begin());
  p.learners.k = count("learners.k");
  p.learners.tree = {count("learners.max_depth"), count("learners.min_leaf")};
  p.learners.n_trees = count("learners.n_trees");
  p.learners.features_per_split = count("learners.features_per_split");
  p.learners.bootstrap = parse_bool(get("learners.bootstrap"), "learners.bootstrap");
  p.learners.augment_copies = count("learners.augment_copies");
  p.learners.augment_sigma = number("learners.augment_sigma");
  p.threads = static_cast<unsigned>(count("eval.threads"));
  try {
    p.validate(grid());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return p;
}

}  // namespace uwbfp::cli
