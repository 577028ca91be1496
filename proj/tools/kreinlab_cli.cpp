// Command-line workbench: loads a model config, runs one of the boundary
// calculus tasks, and writes a deterministic JSON report (plus optional CSV
// for tabular tasks).
//
// Exit codes: 0 success / all checks pass, 1 runtime failure, 2 verification
// failure (some check failed), 3 invalid configuration or usage.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kreinlab/boundary_ops.hpp"
#include "kreinlab/dirac.hpp"
#include "kreinlab/discrete.hpp"
#include "kreinlab/errors.hpp"
#include "kreinlab/graph_backend.hpp"
#include "kreinlab/graph_function.hpp"
#include "kreinlab/model_config.hpp"
#include "kreinlab/report.hpp"
#include "kreinlab/verify.hpp"

namespace kl = kreinlab;

namespace {

struct CommonArgs {
  std::string model_path;
  std::string output_path;  // empty: stdout
  std::string csv_path;     // tabular tasks only
  bool timings = false;
  std::string fault = "none";
  double tol_scale = 0.0;  // 0: unset, fall back to env / 1.0
};

double resolve_tol_scale(double flag_value) {
  if (flag_value > 0.0) return flag_value;
  if (const char* env = std::getenv("KREINLAB_TOL_SCALE")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
      throw kl::ConfigError(
          "environment variable KREINLAB_TOL_SCALE must be a positive "
          "number");
    return v;
  }
  return 1.0;
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

void emit_report(kl::Report& report, const CommonArgs& args,
                 const Stopwatch& watch) {
  if (args.timings)
    report.timings.set("total_ms", kl::JsonValue::number(watch.elapsed_ms()));
  const std::string text = report.serialize();
  if (args.output_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    kl::write_text_file(args.output_path, text);
  }
}

void emit_csv(const CommonArgs& args, const std::string& content) {
  if (!args.csv_path.empty()) kl::write_text_file(args.csv_path, content);
}

int exit_code_from(const std::vector<kl::CheckResult>& checks) {
  return kl::all_passed(checks) ? 0 : 2;
}

std::vector<std::pair<int, double>> field_samples(
    const kl::MetricGraph& graph, int per_edge) {
  std::vector<std::pair<int, double>> pts;
  for (int e = 0; e < graph.edge_count(); ++e) {
    const double len = graph.edge(e).length;
    for (int k = 0; k < per_edge; ++k)
      pts.emplace_back(e, len * (k + 0.5) / per_edge);
  }
  return pts;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int run_verify(const CommonArgs& args) {
  Stopwatch watch;
  const kl::ModelConfig cfg = kl::load_config(args.model_path);
  kl::VerifyOptions opts;
  opts.fault = kl::parse_fault(args.fault);
  opts.tolerance_scale = resolve_tol_scale(args.tol_scale);
  const auto checks = kl::verify_model(cfg, opts);

  kl::Report report;
  report.task = "verify";
  report.config = cfg.to_json();
  report.options.set("fault", kl::JsonValue::string(kl::fault_name(opts.fault)));
  report.options.set("tolerance_scale",
                     kl::JsonValue::number(opts.tolerance_scale));
  report.checks = checks;
  emit_report(report, args, watch);
  return exit_code_from(checks);
}

// ---------------------------------------------------------------------------
// dtn
// ---------------------------------------------------------------------------

struct DtnArgs {
  std::vector<double> re{-4.0, 2.0};
  double im = 0.0;
  int count = 25;
};

int run_dtn(const CommonArgs& args, const DtnArgs& dargs) {
  Stopwatch watch;
  const kl::ModelConfig cfg = kl::load_config(args.model_path);
  if (dargs.count < 1) throw kl::ConfigError("--count must be >= 1");
  if (dargs.re[1] < dargs.re[0])
    throw kl::ConfigError("--re window must satisfy lo <= hi");

  std::vector<kl::DtnGridRow> rows;
  kl::JsonValue excluded = kl::JsonValue::array();
  auto push_matrix = [&rows](kl::Complex z, const kl::Matrix& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        rows.push_back({z, i, j, m(i, j)});
  };

  for (int k = 0; k < dargs.count; ++k) {
    const double t = dargs.count == 1
                         ? 0.0
                         : static_cast<double>(k) / (dargs.count - 1);
    const kl::Complex z(dargs.re[0] + t * (dargs.re[1] - dargs.re[0]),
                        dargs.im);
    try {
      if (cfg.is_discrete()) {
        const kl::DiscreteModel model = cfg.discrete_model();
        push_matrix(z, kl::flux_dtn(model, z));
      } else {
        kl::GraphBackend bk(cfg.graph());
        bk.guard_regular(z);
        push_matrix(z, kl::dtn(bk, z));
      }
    } catch (const kl::NearDirichletSpectrum&) {
      excluded.push(kl::JsonValue::number(z.real()));
    } catch (const kl::SingularSystem&) {
      excluded.push(kl::JsonValue::number(z.real()));
    }
  }

  kl::Report report;
  report.task = "dtn";
  report.config = cfg.to_json();
  report.options.set("re_lo", kl::JsonValue::number(dargs.re[0]));
  report.options.set("re_hi", kl::JsonValue::number(dargs.re[1]));
  report.options.set("im", kl::JsonValue::number(dargs.im));
  report.options.set("count", kl::JsonValue::integer(dargs.count));
  report.add_table("dtn_grid", kl::dtn_grid_table(rows));
  report.add_table("excluded_z", excluded);
  emit_report(report, args, watch);
  emit_csv(args, kl::dtn_grid_csv(rows));
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumArgs {
  std::string robin = "zero";
  std::vector<double> window;
  std::string method = "both";
};

int run_spectrum(const CommonArgs& args, const SpectrumArgs& sargs) {
  Stopwatch watch;
  const kl::ModelConfig cfg = kl::load_config(args.model_path);
  if (cfg.is_discrete())
    throw kl::ConfigError(
        "spectrum requires a continuum model (type interval or "
        "metric_graph)");
  if (sargs.method != "dtn" && sargs.method != "direct" &&
      sargs.method != "both")
    throw kl::ConfigError("--method must be dtn, direct, or both (got \"" +
                          sargs.method + "\")");
  const kl::Window window{sargs.window[0], sargs.window[1]};
  if (!(window.lo < window.hi))
    throw kl::ConfigError("--window must satisfy lo < hi");
  const double tol_scale = resolve_tol_scale(args.tol_scale);

  kl::GraphBackend bk(cfg.graph());
  const kl::Matrix btilde = kl::parse_robin(sargs.robin, bk.boundary_dim());

  std::vector<kl::SpectrumRow> rows;
  std::vector<kl::CheckResult> checks;
  kl::JsonValue excluded = kl::JsonValue::array();

  kl::SpectralScanResult scan;
  std::vector<kl::EigenPair> direct;
  if (sargs.method != "direct") {
    scan = kl::spectral_relation_scan(bk, window, btilde);
    int index = 0;
    for (const auto& root : scan.roots)
      rows.push_back({index++, root.value, root.multiplicity, "dtn"});
    for (const double x : scan.excluded)
      excluded.push(kl::JsonValue::number(x));
  }
  if (sargs.method != "dtn") {
    direct = bk.robin_spectrum(window, btilde);
    int index = 0;
    for (const auto& ev : direct)
      rows.push_back({index++, ev.value, ev.multiplicity, "direct"});
  }

  if (sargs.method == "both") {
    // Cross-match the two lists; eigenvalues embedded in the Dirichlet
    // spectrum are invisible to the boundary-relation scan and are exempt.
    const auto exclusions = bk.dirichlet_exclusions(window);
    double worst = 0.0;
    int unmatched = 0;
    for (const auto& ev : direct) {
      bool embedded = false;
      for (const auto& ex : exclusions)
        if (std::abs(ev.value - ex.center) <= 2.0 * ex.radius) embedded = true;
      if (embedded) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& root : scan.roots)
        best = std::min(best, std::abs(root.value - ev.value));
      if (!std::isfinite(best)) ++unmatched;
      else worst = std::max(worst, best);
    }
    for (const auto& root : scan.roots) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& ev : direct)
        best = std::min(best, std::abs(root.value - ev.value));
      if (!std::isfinite(best)) ++unmatched;
      else worst = std::max(worst, best);
    }
    const double residual = unmatched > 0 ? 1.0 + unmatched : worst;
    checks.push_back(kl::CheckResult::measured(
        "spectral-correspondence", "krein.dn", residual, 1e-6 * tol_scale,
        unmatched > 0 ? std::to_string(unmatched) + " unmatched eigenvalue(s)"
                      : "both methods agree"));
  }

  kl::Report report;
  report.task = "spectrum";
  report.config = cfg.to_json();
  report.options.set("robin", kl::JsonValue::string(sargs.robin));
  report.options.set("window_lo", kl::JsonValue::number(window.lo));
  report.options.set("window_hi", kl::JsonValue::number(window.hi));
  report.options.set("method", kl::JsonValue::string(sargs.method));
  report.options.set("tolerance_scale", kl::JsonValue::number(tol_scale));
  report.checks = checks;
  report.add_table("spectra", kl::spectra_table(rows));
  report.add_table("excluded_z", excluded);
  emit_report(report, args, watch);
  emit_csv(args, kl::spectra_csv(rows));
  return exit_code_from(checks);
}

// ---------------------------------------------------------------------------
// krein
// ---------------------------------------------------------------------------

struct KreinArgs {
  std::string robin = "zero";
  std::vector<double> re{-3.0, 1.5};
  std::vector<double> im{0.4, 1.8};
  int count = 12;
};

int run_krein(const CommonArgs& args, const KreinArgs& kargs) {
  Stopwatch watch;
  const kl::ModelConfig cfg = kl::load_config(args.model_path);
  if (cfg.is_discrete())
    throw kl::ConfigError(
        "krein requires a continuum model (type interval or metric_graph)");
  if (kargs.count < 1) throw kl::ConfigError("--count must be >= 1");
  const double tol_scale = resolve_tol_scale(args.tol_scale);

  kl::GraphBackend bk(cfg.graph());
  const int nb = bk.boundary_dim();
  const kl::Matrix btilde = kl::parse_robin(kargs.robin, nb);
  const auto pts = field_samples(bk.graph(), 10);
  std::vector<kl::CheckResult> checks;

  // Closed-form reference on the interval: with zero coupling, constant
  // probe and z = -1 the predicted difference is cosh(x - L/2) / cosh(L/2).
  if (cfg.single_interval()) {
    const double len = bk.graph().edge(0).length;
    const auto probe = bk.constant(kl::Complex(1.0, 0.0));
    const auto predicted = kl::predicted_resolvent_diff(
        bk, kl::Complex(-1.0, 0.0), kl::Matrix::Zero(2, 2), probe);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double x = len * (k + 0.5) / 100.0;
      const double oracle =
          std::cosh(x - 0.5 * len) / std::cosh(0.5 * len);
      worst = std::max(worst, std::abs(predicted->value(0, x) -
                                       kl::Complex(oracle, 0.0)));
    }
    checks.push_back(kl::CheckResult::measured("krein-reference-point",
                                               "krein", worst,
                                               1e-8 * tol_scale));
  } else {
    checks.push_back(kl::CheckResult::skipped(
        "krein-reference-point", "krein",
        "closed form available only on a single interval"));
  }

  // Predicted vs direct resolvent difference on the z-grid.
  kl::Rng rng(0x6b725a67726964ULL);
  kl::JsonValue grid = kl::JsonValue::array();
  double worst = 0.0;
  int skipped = 0;
  for (int k = 0; k < kargs.count; ++k) {
    const double sign = k % 2 ? -1.0 : 1.0;
    const kl::Complex z(rng.uniform(kargs.re[0], kargs.re[1]),
                        sign * rng.uniform(kargs.im[0], kargs.im[1]));
    const auto h = kl::random_edge_smooth(bk, rng, cfg.probe_quadrature());
    double point_worst = 0.0;
    try {
      const auto predicted = kl::predicted_resolvent_diff(bk, z, btilde, h);
      const auto coupled = bk.robin_resolve(z, btilde, h);
      const auto dirichlet = bk.resolvent(z, h);
      for (const auto& [e, t] : pts) {
        const kl::Complex direct =
            coupled->value(e, t) - dirichlet->value(e, t);
        point_worst =
            std::max(point_worst, std::abs(predicted->value(e, t) - direct));
      }
    } catch (const kl::NearDirichletSpectrum&) {
      ++skipped;
      continue;
    } catch (const kl::EigenvalueAt&) {
      ++skipped;
      continue;
    }
    worst = std::max(worst, point_worst);
    kl::JsonValue row = kl::JsonValue::object();
    row.set("z_re", kl::JsonValue::number(z.real()));
    row.set("z_im", kl::JsonValue::number(z.imag()));
    row.set("residual", kl::JsonValue::number(point_worst));
    grid.push(std::move(row));
  }
  checks.push_back(kl::CheckResult::measured(
      "krein-difference", "krein", worst, 1e-7 * tol_scale,
      skipped > 0 ? std::to_string(skipped) + " point(s) skipped near spectra"
                  : ""));

  kl::Report report;
  report.task = "krein";
  report.config = cfg.to_json();
  report.options.set("robin", kl::JsonValue::string(kargs.robin));
  report.options.set("re_lo", kl::JsonValue::number(kargs.re[0]));
  report.options.set("re_hi", kl::JsonValue::number(kargs.re[1]));
  report.options.set("im_lo", kl::JsonValue::number(kargs.im[0]));
  report.options.set("im_hi", kl::JsonValue::number(kargs.im[1]));
  report.options.set("count", kl::JsonValue::integer(kargs.count));
  report.options.set("tolerance_scale", kl::JsonValue::number(tol_scale));
  report.checks = checks;
  report.add_table("krein_grid", grid);
  emit_report(report, args, watch);
  return exit_code_from(checks);
}

// ---------------------------------------------------------------------------
// dirac
// ---------------------------------------------------------------------------

int run_dirac(const CommonArgs& args) {
  Stopwatch watch;
  const kl::ModelConfig cfg = kl::load_config(args.model_path);
  if (cfg.is_discrete() || !cfg.single_interval())
    throw kl::ConfigError("dirac requires a single-interval model");
  kl::VerifyOptions opts;
  opts.tolerance_scale = resolve_tol_scale(args.tol_scale);
  const auto checks = kl::first_order_checks(cfg, opts);

  kl::Report report;
  report.task = "dirac";
  report.config = cfg.to_json();
  report.options.set("tolerance_scale",
                     kl::JsonValue::number(opts.tolerance_scale));
  report.checks = checks;
  emit_report(report, args, watch);
  return exit_code_from(checks);
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

struct ConvergeArgs {
  std::vector<int> levels{8, 16, 32};
  std::string scheme = "fem-p1";
  double z_re = -1.0;
  double z_im = 0.0;
};

int run_converge(const CommonArgs& args, const ConvergeArgs& cargs) {
  Stopwatch watch;
  const kl::ModelConfig cfg = kl::load_config(args.model_path);
  const kl::Scheme scheme = kl::parse_scheme(cargs.scheme);
  const kl::Complex z(cargs.z_re, cargs.z_im);
  const auto study =
      kl::convergence_study(cfg.graph(), z, cargs.levels, scheme);

  kl::JsonValue table = kl::JsonValue::array();
  std::vector<kl::CsvConvergenceRow> csv_rows;
  for (const auto& row : study) {
    kl::JsonValue item = kl::JsonValue::object();
    item.set("n", kl::JsonValue::integer(row.n));
    item.set("h", kl::JsonValue::number(row.h));
    item.set("flux_error", kl::JsonValue::number(row.flux_error));
    item.set("flux_rate", kl::JsonValue::number(row.flux_rate));
    item.set("conormal_error", kl::JsonValue::number(row.conormal_error));
    item.set("conormal_rate", kl::JsonValue::number(row.conormal_rate));
    table.push(std::move(item));
    csv_rows.push_back({row.n, row.h, row.flux_error, row.flux_rate});
  }

  kl::Report report;
  report.task = "converge";
  report.config = cfg.to_json();
  kl::JsonValue levels = kl::JsonValue::array();
  for (const int n : cargs.levels) levels.push(kl::JsonValue::integer(n));
  report.options.set("levels", std::move(levels));
  report.options.set("scheme", kl::JsonValue::string(cargs.scheme));
  report.options.set("z_re", kl::JsonValue::number(cargs.z_re));
  report.options.set("z_im", kl::JsonValue::number(cargs.z_im));
  report.add_table("convergence", std::move(table));
  emit_report(report, args, watch);
  emit_csv(args, kl::convergence_csv(csv_rows));
  return 0;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_csv,
                bool with_fault) {
  cmd->add_option("-m,--model", args.model_path, "model config JSON file")
      ->required();
  cmd->add_option("-o,--output", args.output_path,
                  "report JSON path (default: stdout)");
  if (with_csv)
    cmd->add_option("--csv", args.csv_path, "CSV export path for the table");
  cmd->add_flag("--timings", args.timings, "include wall-clock timings");
  if (with_fault)
    cmd->add_option("--inject-fault", args.fault,
                    "deliberate defect: none | flip-flux-sign");
  cmd->add_option("--tol-scale", args.tol_scale,
                  "multiply all check tolerances (overrides "
                  "KREINLAB_TOL_SCALE)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary calculus workbench: Dirichlet-to-Neumann families, "
               "resolvent-difference formulas, spectra, and discrete "
               "counterparts on metric graphs"};
  app.set_version_flag("--version",
                       std::string(kl::kToolName) + " " + kl::kToolVersion);
  app.require_subcommand(1);

  CommonArgs common;
  DtnArgs dtn_args;
  SpectrumArgs spectrum_args;
  KreinArgs krein_args;
  ConvergeArgs converge_args;

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the full named check suite");
  add_common(verify_cmd, common, /*csv=*/false, /*fault=*/true);

  CLI::App* dtn_cmd = app.add_subcommand(
      "dtn", "tabulate the Dirichlet-to-Neumann family over a z-grid");
  add_common(dtn_cmd, common, /*csv=*/true, /*fault=*/false);
  dtn_cmd->add_option("--re", dtn_args.re, "real-axis window lo hi")
      ->expected(2);
  dtn_cmd->add_option("--im", dtn_args.im, "constant imaginary offset");
  dtn_cmd->add_option("--count", dtn_args.count, "number of grid points");

  CLI::App* spectrum_cmd = app.add_subcommand(
      "spectrum", "coupled eigenvalues via boundary relation and/or secular "
                  "determinant");
  add_common(spectrum_cmd, common, /*csv=*/true, /*fault=*/false);
  spectrum_cmd
      ->add_option("--robin", spectrum_args.robin,
                   "coupling: identity | zero | scalar | JSON matrix")
      ->capture_default_str();
  spectrum_cmd->add_option("--window", spectrum_args.window, "scan window lo hi")
      ->expected(2)
      ->required();
  spectrum_cmd
      ->add_option("--method", spectrum_args.method, "dtn | direct | both")
      ->capture_default_str();

  CLI::App* krein_cmd = app.add_subcommand(
      "krein", "resolvent-difference formula residuals over a complex grid");
  add_common(krein_cmd, common, /*csv=*/false, /*fault=*/false);
  krein_cmd
      ->add_option("--robin", krein_args.robin,
                   "coupling: identity | zero | scalar | JSON matrix")
      ->capture_default_str();
  krein_cmd->add_option("--re", krein_args.re, "real part range lo hi")
      ->expected(2);
  krein_cmd->add_option("--im", krein_args.im, "imaginary magnitude range lo hi")
      ->expected(2);
  krein_cmd->add_option("--count", krein_args.count, "number of grid points");

  CLI::App* dirac_cmd = app.add_subcommand(
      "dirac", "first-order (off-diagonal block) suite on a single interval");
  add_common(dirac_cmd, common, /*csv=*/false, /*fault=*/false);

  CLI::App* converge_cmd = app.add_subcommand(
      "converge", "discretization study against the continuum flux map");
  add_common(converge_cmd, common, /*csv=*/true, /*fault=*/false);
  converge_cmd->add_option("--levels", converge_args.levels,
                           "subdivision counts per edge");
  converge_cmd->add_option("--scheme", converge_args.scheme,
                           "dec-lumped | fem-p1")
      ->capture_default_str();
  converge_cmd->add_option("--z", converge_args.z_re,
                           "spectral parameter (real part)");
  converge_cmd->add_option("--zim", converge_args.z_im,
                           "spectral parameter (imaginary part)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (verify_cmd->parsed()) return run_verify(common);
    if (dtn_cmd->parsed()) return run_dtn(common, dtn_args);
    if (spectrum_cmd->parsed()) return run_spectrum(common, spectrum_args);
    if (krein_cmd->parsed()) return run_krein(common, krein_args);
    if (dirac_cmd->parsed()) return run_dirac(common);
    if (converge_cmd->parsed()) return run_converge(common, converge_args);
    std::fprintf(stderr, "%s: error: no subcommand\n", kl::kToolName);
    return 3;
  } catch (const kl::ConfigError& e) {
    std::fprintf(stderr, "%s: error: %s\n", kl::kToolName, e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: error: %s\n", kl::kToolName, e.what());
    return 1;
  }
}
