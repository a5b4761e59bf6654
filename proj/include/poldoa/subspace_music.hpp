#pragma once

#include <poldoa/array_model.hpp>
#include <poldoa/signal_sim.hpp>
#include <poldoa/spectrum.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace poldoa {

struct SubspaceDecomposition {
  RVector eigenvalues;  // descending
  CMatrix signal_basis; // dim × M
  CMatrix noise_basis;  // dim × (dim - M)
};

/// Hermitian EVD of R split at the M largest eigenvalues. Throws when
/// M >= dim (no noise subspace left).
SubspaceDecomposition decompose(const CovarianceMatrix& R, int num_sources);

/// 2×2 Gram matrix G = B^H U_n U_n^H B of the DOA steering matrix at (θ, φ).
///
/// For tripoles B = a ⊗ Ω. For crossed-dipoles the DOA stage uses the
/// orthonormalised basis a ⊗ [Ψ columns normalised], which spans the same
/// space as a ⊗ Ψ for θ < 90° but keeps the determinant and minimum
/// eigenvalue free of the cos²θ factor in det(Ψ^T Ψ).
Eigen::Matrix2cd doa_gram(const CMatrix& noise_basis, const ArrayGeometry& geometry, double theta,
                          double phi);

/// det of a 2×2 Hermitian matrix, as a real number.
double hermitian_det2(const Eigen::Matrix2cd& G);
/// Smallest eigenvalue of a 2×2 Hermitian matrix (closed form).
double hermitian_min_eig2(const Eigen::Matrix2cd& G);

/// Standard search axes (degrees).
Axis theta_axis(double step);
Axis phi_axis(double step);
Axis gamma_axis(double step);
Axis eta_axis(double step);

/// F(θ,φ,γ,η) = 1 / (v^H U_n U_n^H v) over a 4-D grid (axes θ, φ, γ, η).
/// For crossed-dipoles the quadratic form is divided by ‖w‖²/N, which is 1
/// for tripoles. Refuses grids above `max_cells` nodes.
SpectrumGrid music_spectrum_4d(const CMatrix& noise_basis, const ArrayGeometry& geometry,
                               const std::array<Axis, 4>& axes, unsigned threads = 0,
                               std::size_t max_cells = std::size_t{1} << 26);

/// f(θ,φ) = 1 / det(B^H U_n U_n^H B), with the determinant formed from
/// C = U_n^H B so it stays accurate near the zeros.
SpectrumGrid doa_spectrum_det(const CMatrix& noise_basis, const ArrayGeometry& geometry,
                              const std::array<Axis, 2>& axes, unsigned threads = 0);

/// f(θ,φ) = 1 / λ_min(B^H U_n U_n^H B).
SpectrumGrid doa_spectrum_mineig(const CMatrix& noise_basis, const ArrayGeometry& geometry,
                                 const std::array<Axis, 2>& axes, unsigned threads = 0);

/// f(γ,η) = 1 / (g^H B^H U_n U_n^H B g) with B fixed at the DOA estimate.
SpectrumGrid polarisation_spectrum(const CMatrix& noise_basis, const ArrayGeometry& geometry,
                                   double theta_hat, double phi_hat,
                                   const std::array<Axis, 2>& axes);

enum class Method { Music4D, Reduced2DDet, Reduced2DEig };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct GridConfig {
  double doa_step_deg = 1.0;
  double pol_step_deg = 1.0;
  /// One extra pass on a grid refine_factor times finer, ±1 coarse cell
  /// around every peak.
  bool refine = false;
  int refine_factor = 10;
  /// When set, the 4-D search runs only inside a ±window box (degrees,
  /// every axis) around each supplied hint instead of the full 4-D grid.
  std::optional<double> window_4d_deg;
  unsigned threads = 0;
  /// Local maxima closer than this (great-circle, degrees) to a stronger
  /// one are not reported as separate sources.
  double min_separation_deg = 5.0;

  /// Step of the grid that the reported estimates are quantised to.
  double final_doa_step() const { return refine ? doa_step_deg / refine_factor : doa_step_deg; }
  double final_pol_step() const { return refine ? pol_step_deg / refine_factor : pol_step_deg; }
};

struct EstimateSet {
  std::vector<SourceParams> sources;  // radians; use degrees() for reporting
  Method method = Method::Reduced2DDet;

  std::vector<std::array<double, 4>> degrees() const;
};

/// covariance → decompose → DOA spectrum → peaks → per-peak polarisation
/// spectrum → peak; Music4D does a single 4-D search instead. `hints` are
/// only used for the windowed 4-D search and must hold M entries then.
EstimateSet estimate(const CovarianceMatrix& R, const ArrayGeometry& geometry, int num_sources,
                     Method method, const GridConfig& grid,
                     const std::vector<SourceParams>& hints = {});

EstimateSet estimate(const SnapshotMatrix& X, const ArrayGeometry& geometry, int num_sources,
                     Method method, const GridConfig& grid,
                     const std::vector<SourceParams>& hints = {});

}  // namespace poldoa
