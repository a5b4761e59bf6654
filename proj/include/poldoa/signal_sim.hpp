#pragma once

#include <poldoa/array_model.hpp>

#include <cstdint>
#include <vector>

namespace poldoa {

struct SimulationConfig {
  std::vector<SourceParams> sources;
  std::vector<double> source_powers;  // linear, one per source
  double noise_power = 1.0;           // per scalar component
  int snapshots = 1000;
  std::uint64_t seed = 1;

  /// Equal-power sources at the given per-source SNR (dB) over unit noise.
  static SimulationConfig at_snr(std::vector<SourceParams> sources, double snr_db,
                                 int snapshots, std::uint64_t seed);

  void validate() const;
};

double snr_db(double source_power, double noise_power);
double power_from_snr_db(double snr_db, double noise_power = 1.0);

struct SnapshotMatrix {
  CMatrix data;  // dimension × K
  ArrayGeometry geometry;
};

struct CovarianceMatrix {
  CMatrix data;

  Eigen::Index size() const { return data.rows(); }
  /// Throws unless square and Hermitian to tol (relative to the largest entry).
  void check_hermitian(double tol = 1e-12) const;
};

/// x[k] = Σ_m v_m s_m[k] + n[k] with circular Gaussian sources and noise.
SnapshotMatrix generate_snapshots(const SimulationConfig& config, const ArrayGeometry& geometry);

/// R̂ = (1/K) Σ_k x[k] x[k]^H, made exactly Hermitian.
CovarianceMatrix sample_covariance(const SnapshotMatrix& snapshots);

/// R = Σ_m σ_m² v_m v_m^H + σ_n² I.
CovarianceMatrix ideal_covariance(const ArrayGeometry& geometry,
                                  const std::vector<SourceParams>& sources,
                                  const std::vector<double>& powers, double noise_power);

}  // namespace poldoa
