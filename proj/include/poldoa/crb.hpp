#pragma once

#include <poldoa/array_model.hpp>

#include <array>
#include <string>
#include <vector>

namespace poldoa {

/// Unconditional-model scenario: R = Σ σ_m² v_m v_m^H + σ_n² I with the
/// powers treated as known.
struct CrbScenario {
  ArrayGeometry geometry;
  std::vector<SourceParams> sources;
  std::vector<double> powers;
  double noise_power = 1.0;

  void validate() const;
};

inline constexpr std::array<const char*, 4> kParameterNames{"theta", "phi", "gamma", "eta"};

/// ∂v/∂θ, ∂v/∂φ, ∂v/∂γ, ∂v/∂η in that order.
std::array<CVector, 4> steering_derivatives(const SourceParams& source,
                                            const ArrayGeometry& geometry);

/// ∂R/∂α for α = (θ_1, φ_1, γ_1, η_1, ..., θ_M, ..., η_M).
std::vector<CMatrix> covariance_derivatives(const CrbScenario& scenario);

/// Real symmetric 4M×4M Fisher information matrix for K snapshots.
struct FisherMatrix {
  RMatrix data;
  int snapshots = 1;
};

/// F_ij = K · tr(R⁻¹ ∂R/∂α_i R⁻¹ ∂R/∂α_j). Throws when R is singular.
FisherMatrix fisher_matrix(const CrbScenario& scenario, int snapshots);

struct CrbReport {
  /// variance[m][i]: bound for parameter i of source m, radians².
  std::vector<std::array<double, 4>> variance;

  /// √CRB in degrees.
  double std_deg(std::size_t source, int parameter) const;
};

/// Diagonal of F⁻¹ mapped to sources and parameters. Throws when F is
/// singular or its condition number exceeds max_condition, naming the
/// parameters that dominate the degenerate direction.
CrbReport crb_bounds(const CrbScenario& scenario, int snapshots, double max_condition = 1e12);

}  // namespace poldoa
