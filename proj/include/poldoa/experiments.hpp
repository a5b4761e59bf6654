#pragma once

#include <poldoa/ambiguity.hpp>
#include <poldoa/config.hpp>
#include <poldoa/crb.hpp>
#include <poldoa/spectrum.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace poldoa {

struct RmseRow {
  double snr_db = 0.0;
  std::string parameter;  // theta, phi, gamma, eta
  int source = 1;         // 1-based
  double rmse_deg = 0.0;  // NaN when every trial failed
  double crb_deg = 0.0;   // √CRB; NaN when unavailable
  double grid_floor_deg = 0.0;
  int trials = 0;         // successful trials
  int failures = 0;
  std::string method;
  std::string geometry;
  int snapshots = 0;
  double grid_step_deg = 0.0;  // final (refined) step of the parameter's axis
};

struct RmseTable {
  std::vector<RmseRow> rows;

  /// First row matching the key; throws when absent.
  const RmseRow& find(double snr_db, const std::string& parameter, int source,
                      const std::string& method, const std::string& geometry = "") const;
};

/// Per-parameter errors of one trial after matching estimates to truth,
/// degrees, with φ and η wrapped into (-180, 180].
using ParameterErrors = std::vector<std::array<double, 4>>;

/// One-to-one assignment of estimates to true sources minimising the summed
/// squared (θ, wrapped φ) distance. Returns errors in truth order.
ParameterErrors match_estimates(const std::vector<SourceParams>& truth,
                                const std::vector<SourceParams>& estimates);

/// Grid-quantisation floor step/√12 for a uniformly distributed offset.
double grid_floor(double step_deg);

/// Monte-Carlo RMSE over the SNR sweep for every configured method; all
/// methods see the same snapshots in a given trial. Trial t uses seed
/// seed + t at every SNR point.
RmseTable run_rmse_sweep(const ExperimentConfig& config);

/// run_rmse_sweep with the det and min-eig estimators on shared data.
RmseTable run_estimator_comparison(ExperimentConfig config);

/// run_rmse_sweep on config.geometry and config.compare_geometry; the two
/// must have the same dipole count.
RmseTable run_geometry_comparison(const ExperimentConfig& config);

struct CrbRow {
  double snr_db = 0.0;
  std::string parameter;
  int source = 1;
  double crb_deg = 0.0;
  std::string geometry;
  int snapshots = 0;
};

std::vector<CrbRow> run_crb_sweep(const ExperimentConfig& config);

/// DOA spectrum (det or min-eig) or, for the 4-D method, the 4-D spectrum
/// of one realisation: the ideal covariance when noise_free, otherwise the
/// sample covariance at snr_start. With no sources the data is noise only
/// and `signals` sets the assumed source count.
SpectrumGrid run_spectrum_export(const ExperimentConfig& config);

struct AmbiguityRow {
  std::string kind;
  std::string alpha1;
  std::string alpha2;
  std::string detail;
  double cosine = 0.0;
  bool parallel = false;
};

struct AmbiguityReport {
  std::vector<AmbiguityRow> rows;
};

/// Linear-polarisation example pairs, no-ambiguity controls, crossed-dipole
/// partner construction and the tripole scan certificate for every
/// nonlinearly polarised configured source.
AmbiguityReport run_ambiguity_report(const ExperimentConfig& config, const ScanOptions& scan = {});

}  // namespace poldoa
