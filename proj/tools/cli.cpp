#include "cli.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "uwbfp/error.hpp"
#include "uwbfp/eval.hpp"
#include "uwbfp/random.hpp"
#include "uwbfp/text.hpp"

namespace uwbfp::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::string seed;
  std::string out;
  std::string model;
  std::string ratio;
  std::string classifier;
  std::string weights;
  std::string threads;
  std::vector<std::string> sets;
};

RunConfig resolve(const Flags& f, const char* out_key) {
  RunConfig cfg;
  if (!f.config.empty()) {
    cfg.load(text::read_file(f.config), f.config);
  }
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    }
    cfg.set(std::string(text::trim(std::string_view(kv).substr(0, eq))),
            std::string(text::trim(std::string_view(kv).substr(eq + 1))), "--set");
  }
  const auto flag = [&](const std::string& value, const char* key, const char* name) {
    if (!value.empty()) cfg.set(key, value, name);
  };
  flag(f.seed, "run.seed", "--seed");
  flag(f.model, "calibration.model", "--model");
  flag(f.ratio, "correction.ratio", "--ratio");
  flag(f.classifier, "learners.classifier", "--classifier");
  flag(f.weights, "learners.weights", "--weights");
  flag(f.threads, "eval.threads", "--threads");
  if (out_key != nullptr) {
    flag(f.out, out_key, "--out");
  }
  return cfg;
}

unsigned threads_of(const RunConfig& cfg) {
  const long long n = text::parse_integer(cfg.get("eval.threads"), "eval.threads");
  if (n < 0) {
    throw ConfigError("eval.threads: must be non-negative");
  }
  return static_cast<unsigned>(n);
}

std::string baseline_path(const std::string& report_path) {
  const auto slash = report_path.find_last_of('/');
  const auto dot = report_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return report_path + ".baseline.csv";
  }
  return report_path.substr(0, dot) + ".baseline.csv";
}

/// Prepends the report name and any resolved keys the pipeline does not echo.
void annotate(ErrorReport& report, const std::string& name, const RunConfig& cfg) {
  Metadata head = {{"name", name}};
  for (const auto& [key, value] : cfg.values()) {
    if (key.rfind("io.", 0) == 0 || key == "eval.threads") continue;
    const bool present = std::any_of(report.metadata.begin(), report.metadata.end(),
                                     [&](const auto& e) { return e.first == key; });
    if (!present) head.emplace_back(key, value);
  }
  report.metadata.insert(report.metadata.begin(), head.begin(), head.end());
}

int cmd_simulate(const Flags& f, std::ostream& out) {
  const RunConfig cfg = resolve(f, "io.measurements");
  const Campaign campaign = cfg.campaign();
  const auto rows = simulate_campaign(campaign, threads_of(cfg));
  const std::string& path = cfg.get("io.measurements");
  text::write_file(path, write_measurements(rows));
  out << rows.size() << " measurement rows written to " << path << '\n';
  return kOk;
}

int cmd_fit(const Flags& f, const std::string& input, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(f, "io.calibration");
  const auto kind = cfg.model();
  if (!kind) {
    throw ConfigError("calibration.model = none has nothing to fit");
  }
  const PipelineConfig p = cfg.pipeline();
  const AnchorLayout anchors = cfg.anchors();
  const auto rows = read_measurements(text::read_file(input));
  const ObservationData obs = observations_from_rows(rows, p.reference_points, p.mad, p.correction);
  FitDiagnostics diag;
  const CalibrationModel model =
      fit_model(*kind, obs, anchors, {p.n_select, derive_seed(p.seed, {kStreamSelection})}, &diag);
  if (diag.clamped) {
    err << "warning: n_select " << diag.requested << " exceeds the " << diag.selected
        << " available measurement sets\n";
  }
  if (diag.skipped > 0) {
    err << "warning: " << diag.skipped << " sets skipped for non-positive slopes\n";
  }
  const std::string& path = cfg.get("io.calibration");
  text::write_file(path, write_calibration(model));
  out << "model " << to_string(model.kind) << " from " << diag.selected - diag.skipped
      << " sets written to " << path << '\n';
  for (Anchor a : kAnchors) {
    out << "  " << "ABC"[static_cast<int>(a)] << ": a=" << text::format_fixed(model.eq(a).a, 6)
        << " b=" << text::format_fixed(model.eq(a).b, 3) << '\n';
  }
  return kOk;
}

int cmd_build_db(const Flags& f, const std::string& input, std::ostream& out) {
  const RunConfig cfg = resolve(f, "io.db");
  const CalibrationModel model = read_calibration(text::read_file(input));
  const FingerprintDB db = build_db(model, cfg.grid(), cfg.anchors(), threads_of(cfg));
  const std::string& path = cfg.get("io.db");
  text::write_file(path, write_db(db));
  out << db.entries().size() << " fingerprints written to " << path << '\n';
  return kOk;
}

int cmd_evaluate(const Flags& f, std::ostream& out) {
  const RunConfig cfg = resolve(f, "io.report");
  const PipelineConfig p = cfg.pipeline();
  const AnchorLayout anchors = cfg.anchors();
  const GridSpec grid = cfg.grid();
  const std::string& path = cfg.get("io.report");

  const auto emit = [&](ErrorReport& report, const std::string& name, const std::string& file) {
    annotate(report, name, cfg);
    text::write_file(file, emit_report(report, ReportFormat::Delimited));
    out << name << " -> " << file << '\n' << emit_report(report, ReportFormat::TextTable);
  };

  if (!p.model_kind) {
    ErrorReport base = run_baseline(p, anchors, grid);
    emit(base, "baseline", path);
    return kOk;
  }
  ErrorReport ml = run_ml(p, anchors, grid);
  emit(ml, std::string("model-") + std::string(to_string(*p.model_kind)) + "-" +
               std::string(to_string(p.classifier)),
       path);
  if (cfg.with_baseline()) {
    ErrorReport base = run_baseline(p, anchors, grid);
    emit(base, "baseline", baseline_path(path));
  }
  return kOk;
}

int cmd_compare(const Flags& f, const std::vector<std::string>& inputs, std::ostream& out) {
  if (inputs.size() < 2) {
    throw UsageError("compare needs a baseline report and at least one candidate");
  }
  std::vector<ErrorReport> reports;
  for (const auto& path : inputs) {
    try {
      reports.push_back(parse_report(text::read_file(path)));
    } catch (const Error& e) {
      if (e.code() != Errc::Parse) throw;
      throw Error(Errc::Parse, path + ": " + e.what());
    }
  }
  const ComparisonTable table = compare(reports);
  if (!f.out.empty()) {
    text::write_file(f.out, emit_comparison(table, ReportFormat::Delimited));
    out << "comparison written to " << f.out << '\n';
  }
  out << emit_comparison(table, ReportFormat::TextTable);
  return kOk;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Parse:
    case Errc::MissingReferencePoint:
    case Errc::MismatchedTestPoints:
      return kInput;
    case Errc::Io:
      return kIo;
    default:
      return kPipeline;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"UWB fingerprint positioning experiments", "uwbfp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Flags f;
  app.add_option("--config", f.config, "Config file with section.key = value lines");
  app.add_option("--seed", f.seed, "Top-level seed (run.seed)");
  app.add_option("--out", f.out, "Output path for the subcommand");
  app.add_option("--model", f.model, "Calibration model (calibration.model)")
      ->check(CLI::IsMember({"one", "two", "three", "four", "none"}));
  app.add_option("--ratio", f.ratio, "Correction ratio (correction.ratio)");
  app.add_option("--classifier", f.classifier, "Classifier (learners.classifier)")
      ->check(CLI::IsMember({"knn", "tree", "forest", "vote"}));
  app.add_option("--weights", f.weights, "Soft-vote weights KNN:TREE (learners.weights)");
  app.add_option("--threads", f.threads, "Worker threads, 0 for all cores (eval.threads)");
  app.add_option("--set", f.sets, "Override any config key, KEY=VALUE");

  std::string input;
  std::vector<std::string> inputs;
  auto* simulate = app.add_subcommand("simulate", "Simulate the measurement campaign");
  auto* fit = app.add_subcommand("fit", "Fit a calibration model from measurements");
  fit->add_option("measurements", input, "Measurement file")->required();
  auto* build = app.add_subcommand("build-db", "Build the fingerprint database");
  build->add_option("calibration", input, "Calibration file")->required();
  auto* evaluate = app.add_subcommand("evaluate", "Run the baseline and learning pipelines");
  auto* cmp = app.add_subcommand("compare", "Compare reports against the first one");
  cmp->add_option("reports", inputs, "Baseline report followed by candidates");
  for (auto* sub : {simulate, fit, build, evaluate, cmp}) {
    sub->fallthrough();
  }

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("uwbfp");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(f, out);
    if (fit->parsed()) return cmd_fit(f, input, out, err);
    if (build->parsed()) return cmd_build_db(f, input, out);
    if (evaluate->parsed()) return cmd_evaluate(f, out);
    return cmd_compare(f, inputs, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPipeline;
  }
}

}  // namespace uwbfp::cli
