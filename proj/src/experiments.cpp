#include <poldoa/experiments.hpp>
#include <poldoa/parallel.hpp>
#include <poldoa/random.hpp>
#include <poldoa/signal_sim.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace poldoa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Diagonal loading of the noise-free covariance.
constexpr double kNoiseFreeLoading = 1e-12;

std::string fmt_deg(const SourceParams& s) {
  const auto d = s.degrees();
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g %.6g %.6g %.6g)", d[0], d[1], d[2], d[3]);
  return buf;
}

CovarianceMatrix noise_free_covariance(const ArrayGeometry& geometry,
                                       const std::vector<SourceParams>& sources,
                                       const std::vector<double>& powers) {
  CovarianceMatrix R = ideal_covariance(geometry, sources, powers, 0.0);
  R.data.diagonal().array() += kNoiseFreeLoading;
  return R;
}

std::optional<CrbReport> try_crb(const ArrayGeometry& geometry, const std::vector<SourceParams>& sources,
                                 double snr, int snapshots) {
  if (sources.empty()) return std::nullopt;
  try {
    const CrbScenario sc{geometry, sources,
                         std::vector<double>(sources.size(), power_from_snr_db(snr)), 1.0};
    return crb_bounds(sc, snapshots);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

const RmseRow& RmseTable::find(double snr_db, const std::string& parameter, int source,
                               const std::string& method, const std::string& geometry) const {
  for (const auto& r : rows)
    if (std::abs(r.snr_db - snr_db) < 1e-9 && r.parameter == parameter && r.source == source &&
        r.method == method && (geometry.empty() || r.geometry == geometry))
      return r;
  throw Error("RMSE table has no row for " + parameter + "_" + std::to_string(source) + " / " + method);
}

ParameterErrors match_estimates(const std::vector<SourceParams>& truth,
                                const std::vector<SourceParams>& estimates) {
  if (truth.size() != estimates.size())
    throw Error("estimate count " + std::to_string(estimates.size()) + " differs from source count " +
                std::to_string(truth.size()));
  const std::size_t m = truth.size();
  std::vector<std::size_t> perm(m), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto t = truth[i].degrees(), e = estimates[perm[i]].degrees();
      const double dth = e[0] - t[0], dph = wrapped_diff_deg(e[1], t[1]);
      cost += dth * dth + dph * dph;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  ParameterErrors out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto t = truth[i].degrees(), e = estimates[best[i]].degrees();
    out[i] = {e[0] - t[0], wrapped_diff_deg(e[1], t[1]), e[2] - t[2], wrapped_diff_deg(e[3], t[3])};
  }
  return out;
}

double grid_floor(double step_deg) { return step_deg / std::sqrt(12.0); }

RmseTable run_rmse_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.sources.empty()) throw Error("RMSE sweep needs at least one source");
  const auto& truth = config.sources;
  const std::size_t n_methods = config.methods.size();
  const std::size_t n_src = truth.size();
  const int trials = config.noise_free ? 1 : config.trials;
  GridConfig inner = config.grid;
  inner.threads = 1;

  RmseTable table;
  for (const double snr : config.snr_points()) {
    // results[t][method] holds the matched errors or nothing on failure.
    std::vector<std::vector<std::optional<ParameterErrors>>> results(
        static_cast<std::size_t>(trials), std::vector<std::optional<ParameterErrors>>(n_methods));
    parallel_for(results.size(), config.grid.threads, [&](std::size_t t) {
      CovarianceMatrix R;
      if (config.noise_free) {
        R = noise_free_covariance(config.geometry, truth,
                                  std::vector<double>(n_src, power_from_snr_db(snr)));
      } else {
        const auto sim = SimulationConfig::at_snr(truth, snr, config.snapshots,
                                                  trial_seed(config.seed, t));
        R = sample_covariance(generate_snapshots(sim, config.geometry));
      }
      for (std::size_t k = 0; k < n_methods; ++k) {
        try {
          const auto est = estimate(R, config.geometry, config.num_signals(), config.methods[k],
                                    inner, truth);
          results[t][k] = match_estimates(truth, est.sources);
        } catch (const Error&) {
          results[t][k].reset();
        }
      }
    });

    const auto crb = config.noise_free ? std::nullopt
                                       : try_crb(config.geometry, truth, snr, config.snapshots);
    for (std::size_t k = 0; k < n_methods; ++k)
      for (std::size_t m = 0; m < n_src; ++m)
        for (int p = 0; p < 4; ++p) {
          double sum = 0.0;
          int ok = 0;
          for (const auto& r : results)
            if (r[k]) {
              const double e = (*r[k])[m][static_cast<std::size_t>(p)];
              sum += e * e;
              ++ok;
            }
          RmseRow row;
          row.snr_db = snr;
          row.parameter = kParameterNames[static_cast<std::size_t>(p)];
          row.source = static_cast<int>(m) + 1;
          row.rmse_deg = ok > 0 ? std::sqrt(sum / ok) : kNaN;
          row.crb_deg = crb ? crb->std_deg(m, p) : kNaN;
          row.grid_step_deg = p < 2 ? config.grid.final_doa_step() : config.grid.final_pol_step();
          row.grid_floor_deg = grid_floor(row.grid_step_deg);
          row.trials = ok;
          row.failures = trials - ok;
          row.method = to_string(config.methods[k]);
          row.geometry = config.geometry.describe();
          row.snapshots = config.noise_free ? 0 : config.snapshots;
          table.rows.push_back(row);
        }
  }
  return table;
}

RmseTable run_estimator_comparison(ExperimentConfig config) {
  config.methods = {Method::Reduced2DDet, Method::Reduced2DEig};
  return run_rmse_sweep(config);
}

RmseTable run_geometry_comparison(const ExperimentConfig& config) {
  if (config.geometry.dipole_count() != config.compare_geometry.dipole_count())
    throw Error("geometry comparison needs equal dipole counts: " + config.geometry.describe() +
                " has " + std::to_string(config.geometry.dipole_count()) + ", " +
                config.compare_geometry.describe() + " has " +
                std::to_string(config.compare_geometry.dipole_count()));
  RmseTable out = run_rmse_sweep(config);
  ExperimentConfig other = config;
  other.geometry = config.compare_geometry;
  const RmseTable b = run_rmse_sweep(other);
  out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
  return out;
}

std::vector<CrbRow> run_crb_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.sources.empty()) throw Error("CRB sweep needs at least one source");
  std::vector<CrbRow> rows;
  for (const double snr : config.snr_points()) {
    const CrbScenario sc{config.geometry, config.sources,
                         std::vector<double>(config.sources.size(), power_from_snr_db(snr)), 1.0};
    const CrbReport r = crb_bounds(sc, config.snapshots);
    for (std::size_t m = 0; m < config.sources.size(); ++m)
      for (int p = 0; p < 4; ++p)
        rows.push_back({snr, kParameterNames[static_cast<std::size_t>(p)], static_cast<int>(m) + 1,
                        r.std_deg(m, p), config.geometry.describe(), config.snapshots});
  }
  return rows;
}

SpectrumGrid run_spectrum_export(const ExperimentConfig& config) {
  config.validate();
  const auto& g = config.geometry;
  const int m = config.num_signals();
  if (m < 1) throw Error("spectrum export needs signals >= 1 when no sources are given");
  const std::vector<double> powers(config.sources.size(), power_from_snr_db(config.snr_start_db));
  CovarianceMatrix R;
  if (config.noise_free) {
    if (config.sources.empty()) throw Error("a noise-free spectrum needs at least one source");
    R = ideal_covariance(g, config.sources, powers, 0.0);
  } else {
    SimulationConfig sim;
    sim.sources = config.sources;
    sim.source_powers = powers;
    sim.snapshots = config.snapshots;
    sim.seed = config.seed;
    R = sample_covariance(generate_snapshots(sim, g));
  }
  const CMatrix Un = decompose(R, m).noise_basis;
  const double s = config.grid.doa_step_deg;
  const Method method = config.methods.front();
  if (method == Method::Music4D)
    return music_spectrum_4d(Un, g,
                             {theta_axis(s), phi_axis(s), gamma_axis(config.grid.pol_step_deg),
                              eta_axis(config.grid.pol_step_deg)},
                             config.grid.threads);
  const std::array<Axis, 2> axes{theta_axis(s), phi_axis(s)};
  return method == Method::Reduced2DDet ? doa_spectrum_det(Un, g, axes, config.grid.threads)
                                        : doa_spectrum_mineig(Un, g, axes, config.grid.threads);
}

AmbiguityReport run_ambiguity_report(const ExperimentConfig& config, const ScanOptions& scan) {
  AmbiguityReport rep;
  const ArrayGeometry& geo = config.geometry;
  const ArrayGeometry line = geo.is_planar()
                                 ? ArrayGeometry::linear(geo.sensor_kind(), geo.element_count(), geo.spacing())
                                 : geo;

  // Linear-polarisation examples and their partners.
  for (const auto& a1 : {SourceParams::from_degrees(30, 60, 90, 20), SourceParams::from_degrees(0, 90, 90, 20),
                         SourceParams::from_degrees(30, 0, 0, 30)}) {
    const auto partner = linear_polarisation_partner(a1, line);
    if (!partner) {
      rep.rows.push_back({"linear-partner", fmt_deg(a1), "-", "no ambiguity", 0.0, false});
      continue;
    }
    const auto cls = classify_pair(a1, partner->first, line);
    rep.rows.push_back({"linear-partner", fmt_deg(a1), fmt_deg(partner->first),
                        "case " + std::to_string(cls.ambiguity.id) + (cls.ambiguity.swapped ? " (swapped)" : "") +
                            ": " + cls.ambiguity.constraint,
                        cls.verdict.cosine, cls.verdict.parallel});
  }
  // No-ambiguity controls.
  const std::vector<std::pair<SourceParams, SourceParams>> controls{
      {SourceParams::from_degrees(30, 60, 90, 20), SourceParams::from_degrees(40, 50, 35, 0)},
      {SourceParams::from_degrees(30, 60, 40, 0), SourceParams::from_degrees(50, 20, 25, 0)}};
  for (const auto& [a1, a2] : controls) {
    const auto cls = classify_pair(a1, a2, line);
    rep.rows.push_back({"linear-control", fmt_deg(a1), fmt_deg(a2),
                        "case " + std::to_string(cls.ambiguity.id) + ": " + cls.ambiguity.constraint,
                        cls.verdict.cosine, cls.verdict.parallel});
  }

  std::vector<SourceParams> nonlinear;
  for (const auto& s : config.sources)
    if (!s.is_linearly_polarised()) nonlinear.push_back(s);
  if (config.sources.empty()) nonlinear.push_back(default_spectrum_source());

  // Crossed-dipole partners at θ₂ = 60°.
  const ArrayGeometry cd = ArrayGeometry::linear(SensorKind::CrossedDipole, line.element_count(), line.spacing());
  for (const auto& a1 : nonlinear)
    for (const double phi2 : doa_parallel_direction(a1.theta, a1.phi, deg2rad(60.0))) {
      const auto a2 = crossed_dipole_partner(a1, deg2rad(60.0), phi2);
      const auto v = is_parallel(joint_steering(cd, a1), joint_steering(cd, a2));
      rep.rows.push_back({"crossed-dipole-partner", fmt_deg(a1), fmt_deg(a2), cd.describe(), v.cosine,
                          v.parallel});
    }

  // Tripole certificate.
  const ArrayGeometry tri = ArrayGeometry::linear(SensorKind::Tripole, line.element_count(), line.spacing());
  for (const auto& a1 : nonlinear) {
    const auto r = tripole_no_ambiguity_scan(a1, tri, scan);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s; step %.6g deg; exclusion %.6g deg; distance %.6g deg; %s",
                  tri.describe().c_str(), scan.step_deg, scan.exclusion_radius_deg, r.distance_deg,
                  r.certified ? "certified" : "not certified");
    const auto& l = r.location;
    rep.rows.push_back({"tripole-scan", fmt_deg(a1),
                        fmt_deg(SourceParams::from_degrees(l.theta_deg, l.phi_deg, l.gamma_deg, l.eta_deg)), buf,
                        r.max_cosine, r.max_cosine >= 1.0 - kParallelTol});
  }
  return rep;
}

}  // namespace poldoa
