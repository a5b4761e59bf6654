#include <poldoa/complexity.hpp>
#include <poldoa/config.hpp>
#include <poldoa/experiments.hpp>
#include <poldoa/report_io.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace poldoa;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> grid_step_doa, grid_step_pol;
  std::optional<int> trials, snapshots;
  std::optional<std::string> method;
  std::optional<unsigned> threads;
  std::optional<bool> refine;
  std::vector<std::string> sets;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "Key-value config file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "Base RNG seed");
  app->add_option("--out", f.out, "Output file (default stdout)");
  app->add_option("--grid-step-doa", f.grid_step_doa, "DOA grid step (deg)");
  app->add_option("--grid-step-pol", f.grid_step_pol, "Polarisation grid step (deg)");
  app->add_option("--trials", f.trials, "Monte-Carlo trials");
  app->add_option("--snapshots", f.snapshots, "Snapshots per trial");
  app->add_option("--method", f.method, "det, mineig, music4d (comma list)");
  app->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  app->add_option("--refine", f.refine, "Refine peaks on a 10x finer grid (true/false)");
  app->add_option("--set", f.sets, "Override a config key, key=value (repeatable)");
}

ExperimentConfig resolve(const CommonFlags& f, ExperimentConfig base) {
  ExperimentConfig c = f.config.empty() ? base : load_config(f.config, base);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + kv + "'");
    apply_config_key(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) c.seed = *f.seed;
  if (f.grid_step_doa) c.grid.doa_step_deg = *f.grid_step_doa;
  if (f.grid_step_pol) c.grid.pol_step_deg = *f.grid_step_pol;
  if (f.trials) c.trials = *f.trials;
  if (f.snapshots) c.snapshots = *f.snapshots;
  if (f.method) apply_config_key(c, "method", *f.method);
  if (f.threads) c.grid.threads = *f.threads;
  if (f.refine) c.grid.refine = *f.refine;
  if (!f.out.empty()) c.output = f.out;
  c.validate();
  return c;
}

void emit(const ExperimentConfig& c, const std::string& text) {
  if (c.output.empty()) std::cout << text;
  else write_text_file(c.output, text);
}

ExperimentConfig sweep_base(std::vector<SourceParams> sources) {
  ExperimentConfig c;
  c.sources = std::move(sources);
  c.grid.refine = true;
  c.grid.window_4d_deg = 5.0;
  return c;
}

std::string sidecar_path(const std::string& csv) {
  const auto dot = csv.rfind('.');
  const auto slash = csv.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return csv.substr(0, dot) + ".json";
  return csv + ".json";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarisation-sensitive array DOA and polarisation estimation toolkit"};
  app.require_subcommand(1);

  CommonFlags spectrum_f, rmse_f, est_f, geo_f, crb_f, amb_f;
  auto* spectrum = app.add_subcommand("spectrum", "Export a MUSIC spectrum grid (CSV + JSON sidecar)");
  add_common(spectrum, spectrum_f);
  auto* rmse = app.add_subcommand("rmse", "Monte-Carlo RMSE vs SNR with sqrt(CRB)");
  add_common(rmse, rmse_f);
  auto* est = app.add_subcommand("compare-estimators", "Paired det / min-eig RMSE on shared data");
  add_common(est, est_f);
  auto* geo = app.add_subcommand("compare-geometry", "RMSE and CRB on two geometries");
  add_common(geo, geo_f);
  auto* crb = app.add_subcommand("crb", "sqrt(CRB) vs SNR");
  add_common(crb, crb_f);
  auto* amb = app.add_subcommand("ambiguity", "Steering-vector ambiguity report");
  add_common(amb, amb_f);
  double scan_step = 2.0;
  amb->add_option("--scan-step", scan_step, "Tripole scan grid step (deg)");

  auto* cx = app.add_subcommand("complexity", "Multiplication counts of the three searches");
  std::int64_t N = 4, M = 2, L = 181;
  std::string cx_out;
  cx->add_option("-N,--sensors", N, "Sensors");
  cx->add_option("-M,--sources", M, "Sources");
  cx->add_option("-L,--grid-points", L, "Grid points per angle axis");
  cx->add_option("--out", cx_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed()) {
      ExperimentConfig base;
      base.geometry = ArrayGeometry::linear(SensorKind::CrossedDipole, 5, 0.5);
      base.sources = {default_spectrum_source()};
      base.noise_free = true;
      const auto c = resolve(spectrum_f, base);
      const auto grid = run_spectrum_export(c);
      emit(c, format_spectrum_csv(grid));
      if (!c.output.empty())
        write_text_file(sidecar_path(c.output),
                        format_spectrum_json(grid, c.geometry.describe() + ", method " +
                                                       to_string(c.methods.front())));
    } else if (rmse->parsed()) {
      const auto c = resolve(rmse_f, sweep_base(default_two_sources()));
      emit(c, format_rmse_csv(run_rmse_sweep(c)));
    } else if (est->parsed()) {
      const auto c = resolve(est_f, sweep_base({SourceParams::from_degrees(10, 20, 15, 30)}));
      emit(c, format_rmse_csv(run_estimator_comparison(c)));
    } else if (geo->parsed()) {
      const auto c = resolve(geo_f, sweep_base(default_two_sources()));
      emit(c, format_rmse_csv(run_geometry_comparison(c)));
    } else if (crb->parsed()) {
      ExperimentConfig base;
      base.sources = default_two_sources();
      const auto c = resolve(crb_f, base);
      emit(c, format_crb_csv(run_crb_sweep(c)));
    } else if (amb->parsed()) {
      ExperimentConfig base;
      base.geometry = ArrayGeometry::linear(SensorKind::Tripole, 5, 0.5);
      base.sources = {default_spectrum_source()};
      const auto c = resolve(amb_f, base);
      ScanOptions scan;
      scan.step_deg = scan_step;
      scan.threads = c.grid.threads;
      emit(c, format_ambiguity_csv(run_ambiguity_report(c, scan)));
    } else if (cx->parsed()) {
      const std::string text = format_complexity_csv(N, M, L, complexity_report(N, M, L));
      if (cx_out.empty()) std::cout << text;
      else write_text_file(cx_out, text);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "poldoa: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
