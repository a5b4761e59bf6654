#include <poldoa/random.hpp>
#include <poldoa/signal_sim.hpp>

namespace poldoa {

double snr_db(double source_power, double noise_power) {
  return 10.0 * std::log10(source_power / noise_power);
}

double power_from_snr_db(double snr, double noise_power) {
  return noise_power * std::pow(10.0, snr / 10.0);
}

SimulationConfig SimulationConfig::at_snr(std::vector<SourceParams> sources, double snr,
                                          int snapshots, std::uint64_t seed) {
  SimulationConfig c;
  c.source_powers.assign(sources.size(), power_from_snr_db(snr, 1.0));
  c.sources = std::move(sources);
  c.noise_power = 1.0;
  c.snapshots = snapshots;
  c.seed = seed;
  return c;
}

void SimulationConfig::validate() const {
  if (snapshots < 1) throw Error("snapshot count must be at least 1");
  if (sources.size() != source_powers.size())
    throw Error("one source power is required per source");
  for (double p : source_powers)
    if (!(p > 0.0)) throw Error("source powers must be positive");
  if (!(noise_power >= 0.0)) throw Error("noise power must be non-negative");
  if (sources.empty() && noise_power == 0.0)
    throw Error("no sources and zero noise power: data would be identically zero");
  for (const auto& s : sources) s.validate();
}

void CovarianceMatrix::check_hermitian(double tol) const {
  if (data.rows() != data.cols()) throw Error("covariance matrix is not square");
  const double scale = std::max(1.0, data.cwiseAbs().maxCoeff());
  if ((data - data.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
    throw Error("covariance matrix is not Hermitian");
}

SnapshotMatrix generate_snapshots(const SimulationConfig& config, const ArrayGeometry& geometry) {
  config.validate();
  const int dim = geometry.dimension();
  const int K = config.snapshots;
  Rng rng(config.seed);

  std::vector<CVector> steering;
  steering.reserve(config.sources.size());
  for (const auto& s : config.sources) steering.push_back(joint_steering(geometry, s));

  // Draw order is fixed: per snapshot, all source samples then all noise samples.
  CMatrix X = CMatrix::Zero(dim, K);
  for (int k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < steering.size(); ++m)
      X.col(k) += steering[m] * rng.complex_normal(config.source_powers[m]);
    if (config.noise_power > 0.0)
      for (int i = 0; i < dim; ++i) X(i, k) += rng.complex_normal(config.noise_power);
  }
  return {std::move(X), geometry};
}

CovarianceMatrix sample_covariance(const SnapshotMatrix& snapshots) {
  const auto& X = snapshots.data;
  if (X.cols() < 1) throw Error("sample covariance needs at least one snapshot");
  CMatrix R = (X * X.adjoint()) / static_cast<double>(X.cols());
  R = 0.5 * (R + R.adjoint()).eval();
  return {std::move(R)};
}

CovarianceMatrix ideal_covariance(const ArrayGeometry& geometry,
                                  const std::vector<SourceParams>& sources,
                                  const std::vector<double>& powers, double noise_power) {
  if (sources.size() != powers.size()) throw Error("one source power is required per source");
  const int dim = geometry.dimension();
  CMatrix R = noise_power * CMatrix::Identity(dim, dim);
  for (std::size_t m = 0; m < sources.size(); ++m) {
    const CVector v = joint_steering(geometry, sources[m]);
    R.noalias() += powers[m] * v * v.adjoint();
  }
  R = 0.5 * (R + R.adjoint()).eval();
  return {std::move(R)};
}

}  // namespace poldoa
