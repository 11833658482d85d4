// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uwbfp/calibration.hpp"
#include "uwbfp/eval.hpp"
#include "uwbfp/fingerprint.hpp"
#include "uwbfp/geometry.hpp"
#include "uwbfp/learners.hpp"
#include "uwbfp/preprocess.hpp"
#include "uwbfp/simulator.hpp"

using namespace uwbfp;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // <= 0: no runtime bound
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const AnchorLayout kAnchorsDefault;
const GridSpec kGrid;

Outcome trilateration_exactness() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> ux(0.0, kGrid.width), uy(0.0, kGrid.height);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const PointMM p{ux(rng), uy(rng)};
    RangeTriple r;
    for (Anchor a : kAnchors) {
      const PointMM q = kAnchorsDefault[a];
      const double d = oracle::dist2d(p.x, p.y, q.x, q.y);
      (a == Anchor::A ? r.d_a : a == Anchor::B ? r.d_b : r.d_c) = d;
    }
    const PointMM est = trilaterate(kAnchorsDefault, r);
    worst = std::max(worst, oracle::dist2d(est.x, est.y, p.x, p.y));
  }
  return {worst < 1e-6, "max error " + fmt("%.3e", worst) + " mm over 1000 points"};
}

PipelineConfig noiseless_identity() {
  PipelineConfig cfg;
  cfg.noise = NoiseConfig::exact();
  cfg.correction = CorrectionPolicy::identity();
  cfg.classifier = ClassifierKind::Knn;
  cfg.learners.k = 1;
  cfg.n_trials = 20;
  cfg.test_points = {{500.0, 2000.0}};
  cfg.seed = 2;
  return cfg;
}

Outcome grid_quantization() {
  const ErrorReport r = run_ml(noiseless_identity(), kAnchorsDefault, kGrid);
  const PointError& p = r.points.at(0);
  const bool ok = p.avg_error == 25.0 && p.max_error && *p.max_error == 25.0 && p.failed == 0;
  return {ok, "avg " + fmt("%.17g", p.avg_error) + " max " +
                  fmt("%.17g", p.max_error.value_or(-1.0)) + " at (500,2000)"};
}

Outcome calibration_round_trip() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> ua(0.8, 1.3), ub(-50.0, 100.0);
  constexpr std::size_t kSets = 12;
  double worst_a = 0.0, worst_b = 0.0;
  for (int w = 0; w < 100; ++w) {
    const double a = ua(rng), b = ub(rng);
    ObservationData obs;
    for (int p = 0; p < 4; ++p) {
      for (Anchor k : kAnchors) {
        const PointMM q = kAnchorsDefault[k];
        const double t = oracle::dist2d(obs.points[p].x, obs.points[p].y, q.x, q.y);
        obs.series[p][static_cast<int>(k)].assign(kSets, a * t + b);
      }
    }
    for (ModelKind kind : {ModelKind::One, ModelKind::Two, ModelKind::Three, ModelKind::Four}) {
      const CalibrationModel m =
          fit_model(kind, obs, kAnchorsDefault, {kSets, static_cast<std::uint64_t>(w)});
      for (const auto& e : m.eqs) {
        worst_a = std::max(worst_a, std::abs(e.a - a) / std::abs(a));
        worst_b = std::max(worst_b, std::abs(e.b - b) / std::abs(b));
      }
    }
  }
  return {worst_a <= 1e-9 && worst_b <= 1e-9,
          "max relative error a " + fmt("%.3e", worst_a) + ", b " + fmt("%.3e", worst_b)};
}

Outcome mad_properties() {
  std::mt19937_64 rng(4004);
  std::uniform_int_distribution<int> len(1, 80);
  std::uniform_real_distribution<double> u(1.0, 3000.0);
  std::uniform_int_distribution<int> small(1, 3);
  std::size_t violations = 0, zero_mad = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(static_cast<std::size_t>(len(rng)));
    const bool tied = t % 4 == 0;
    for (auto& x : v) x = tied ? 50.0 * small(rng) : u(rng);
    const auto kept = mad_filter(v);
    if (kept.empty()) ++violations;

    std::size_t j = 0;
    for (double x : v) {
      if (j < kept.size() && kept[j] == x) ++j;
    }
    if (j != kept.size()) ++violations;

    const double m = oracle::median(v);
    const double cutoff = 3.0 * 1.4826 * oracle::mad(v);
    const auto expected = static_cast<std::size_t>(
        std::count_if(v.begin(), v.end(), [&](double x) { return std::abs(x - m) <= cutoff; }));
    if (kept.size() != expected) ++violations;
    for (double x : kept) {
      if (std::abs(x - m) > cutoff) ++violations;
    }
    if (cutoff == 0.0) {
      ++zero_mad;
      for (double x : kept) {
        if (x != m) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations, " + std::to_string(zero_mad) +
                               " series with MAD = 0"};
}

Outcome correction_round_trip() {
  NoiseConfig noise = NoiseConfig::exact();
  noise.inflation_factor = 1.0 / 0.9;
  const CorrectionPolicy policy{1000.0, 0.9};
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> u(1000.0, 2300.0);
  RandomStream stream(5);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const double d = u(rng);
    if (!(d > 1000.0)) continue;
    const double back = correct_range(simulate_range(d, noise, stream), policy);
    worst = std::max(worst, std::abs(back - d) / d);
    ++checked;
  }
  return {worst <= 1e-9 && checked > 0,
          "max relative error " + fmt("%.3e", worst) + " over " + std::to_string(checked) + " ranges"};
}

Outcome classifier_oracles() {
  std::mt19937_64 rng(6006);
  std::uniform_real_distribution<double> ua(0.8, 1.3), ub(-50.0, 100.0);
  std::uniform_real_distribution<double> uq(-100.0, 2600.0);
  std::size_t knn_bad = 0, forest_bad = 0, vote_bad = 0, queries = 0, rows_checked = 0;

  for (int db_i = 0; db_i < 20; ++db_i) {
    CalibrationModel model = CalibrationModel::identity();
    for (auto& e : model.eqs) e = {ua(rng), ub(rng)};
    const TrainingSet rows = training_set_from_db(build_db(model, kGrid, kAnchorsDefault));

    const auto knn = KnnClassifier::train(rows, 1);
    for (int q = 0; q < 100; ++q) {
      const RangeTriple query{uq(rng), uq(rng), uq(rng)};
      const CellLabel want = rows[oracle::nearest(rows, query.d_a, query.d_b, query.d_c)].label;
      knn_bad += knn.predict_proba(query).argmax() != want;
      ++queries;
    }

    ForestParams fp;
    fp.n_trees = 1;
    fp.features_per_split = 3;
    fp.bootstrap = false;
    fp.seed = static_cast<std::uint64_t>(db_i);
    const auto forest = ForestClassifier::train(rows, fp);
    const auto tree = TreeClassifier::train(rows);
    for (const auto& r : rows) {
      forest_bad += !(forest.predict_proba(r.features) == tree.predict_proba(r.features));
      ++rows_checked;
    }
  }

  std::uniform_real_distribution<double> up(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> ul(0, 40);
  std::uniform_int_distribution<int> un(1, 6);
  for (int i = 0; i < 1000; ++i) {
    std::vector<ClassProbabilities::Entry> a, b;
    const int na = un(rng), nb = un(rng);
    for (int j = 0; j < na; ++j) a.emplace_back(CellLabel{ul(rng)}, up(rng) + 1e-3);
    for (int j = 0; j < nb; ++j) b.emplace_back(CellLabel{ul(rng)}, up(rng) + 1e-3);
    const auto pa = ClassProbabilities::from_weights(a);
    const auto pb = ClassProbabilities::from_weights(b);
    vote_bad += soft_vote(pa, pb, {1, 2}) != soft_vote(pa, pb, {2, 4});
  }

  return {knn_bad == 0 && forest_bad == 0 && vote_bad == 0,
          "1-NN mismatches " + std::to_string(knn_bad) + "/" + std::to_string(queries) +
              ", forest/tree mismatches " + std::to_string(forest_bad) + "/" +
              std::to_string(rows_checked) + ", vote scaling mismatches " +
              std::to_string(vote_bad) + "/1000"};
}

PipelineConfig reference_setup(unsigned threads) {
  PipelineConfig cfg;
  cfg.model_kind = ModelKind::Four;
  cfg.classifier = ClassifierKind::SoftVote;
  cfg.vote_weights = {3.0, 1.0};
  cfg.n_trials = 400;
  cfg.seed = 20240501;
  cfg.threads = threads;
  return cfg;
}

Outcome qualitative_claims() {
  const PipelineConfig cfg = reference_setup(1);
  const ErrorReport ml = run_ml(cfg, kAnchorsDefault, kGrid);
  const ErrorReport base = run_baseline(cfg, kAnchorsDefault, kGrid);
  bool below_everywhere = true;
  int under_150 = 0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < ml.points.size(); ++i) {
    const auto& m = ml.points[i];
    const auto& b = base.points[i];
    below_everywhere = below_everywhere && m.avg_error < b.avg_error;
    under_150 += m.avg_error < 150.0;
    detail << (i ? "; " : "") << "(" << m.point.x << "," << m.point.y << ") "
           << fmt("%.1f", m.avg_error) << " vs " << fmt("%.1f", b.avg_error);
  }
  const bool ok = below_everywhere && under_150 >= 5 && ml.points.size() == 6;
  return {ok, std::string(below_everywhere ? "ML below" : "ML NOT below") +
                  " baseline at every point, " + std::to_string(under_150) +
                  "/6 under 150 mm [" + detail.str() + "]"};
}

Outcome determinism() {
  const auto emit_ml = [](unsigned threads) {
    return emit_report(run_ml(reference_setup(threads), kAnchorsDefault, kGrid), ReportFormat::Delimited);
  };
  const auto emit_base = [](unsigned threads) {
    return emit_report(run_baseline(reference_setup(threads), kAnchorsDefault, kGrid),
                       ReportFormat::Delimited);
  };
  const std::string ml1 = emit_ml(1), ml1b = emit_ml(1), ml4 = emit_ml(4);
  const std::string b1 = emit_base(1), b1b = emit_base(1), b4 = emit_base(4);
  const bool ok = ml1 == ml1b && ml1 == ml4 && b1 == b1b && b1 == b4;
  return {ok, std::string("ML reports ") + (ml1 == ml1b && ml1 == ml4 ? "identical" : "DIFFER") +
                  ", baseline reports " + (b1 == b1b && b1 == b4 ? "identical" : "DIFFER") +
                  " across repeats and 1 vs 4 threads"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "trilateration exactness", 1.0, trilateration_exactness},
      {2, "grid quantization reproduction", 10.0, grid_quantization},
      {3, "calibration round trip", 5.0, calibration_round_trip},
      {4, "MAD filter properties", 5.0, mad_properties},
      {5, "correction round trip", 0.0, correction_round_trip},
      {6, "classifier oracles", 30.0, classifier_oracles},
      {7, "qualitative claims under the default simulator", 120.0, qualitative_claims},
      {8, "determinism", 0.0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s <= 0.0 || secs < c.budget_s;
    const bool pass = o.ok && in_time;
    failures += !pass;
    std::printf("%s criterion %d: %s - %s [%.3f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs,
                c.budget_s > 0.0 ? (in_time ? (" < " + fmt("%g", c.budget_s) + " s").c_str()
                                            : (" exceeds " + fmt("%g", c.budget_s) + " s").c_str())
                                 : "");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
