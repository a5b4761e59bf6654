#pragma once

#include <poldoa/array_model.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace poldoa {

inline constexpr double kParallelTol = 1e-10;

struct ParallelVerdict {
  bool parallel = false;
  /// |u^H v| / (‖u‖‖v‖), in [0, 1].
  double cosine = 0.0;
  /// k with v ≈ k·u; set only when parallel.
  std::optional<cdouble> scale;
};

/// Parallelism through the Cauchy-Schwarz equality: cosine >= 1 - tol.
/// Throws on zero or mismatched vectors.
ParallelVerdict is_parallel(const CVector& u, const CVector& v, double tol = kParallelTol);

/// All φ₂ in [0, 2π) with sin θ₂ sin φ₂ = sin θ₁ sin φ₁, i.e. directions
/// sharing the linear-array spatial steering vector. Empty when no real
/// solution exists. Throws when θ₂ is not in (0, π/2].
std::vector<double> doa_parallel_direction(double theta1, double phi1, double theta2);

/// Crossed-dipole partner α₂ at the DOA-parallel direction (θ₂, φ₂):
/// g₂ = Ψ₂⁻¹ Ψ₁ g₁, then γ₂ = atan(|g₂[1]| / |g₂[2]|), η₂ = arg(g₂[1] / g₂[2]).
/// When g₂[2] = 0 the partner has γ₂ = 90° and η₂ = arg g₂[1].
/// Throws if (θ₂, φ₂) is not DOA-parallel to α₁ or θ₂ = π/2 (Ψ₂ singular).
SourceParams crossed_dipole_partner(const SourceParams& alpha1, double theta2, double phi2);

struct ScanLocation {
  double theta_deg = 0, phi_deg = 0, gamma_deg = 0, eta_deg = 0;
};

struct ScanResult {
  double max_cosine = 0.0;
  ScanLocation location;
  double distance_deg = 0.0;  // great-circle distance of the maximiser from α₁'s DOA
  bool certified = false;     // max_cosine < 1 - certify_margin
  std::size_t nodes_scanned = 0;
};

struct ScanOptions {
  double step_deg = 2.0;
  double exclusion_radius_deg = 2.0;
  double certify_margin = 1e-3;
  unsigned threads = 0;
};

/// Scans the full (θ, φ, γ, η) grid for the joint steering vector most
/// parallel to α₁'s, skipping every node whose direction lies within the
/// exclusion radius (great-circle) of α₁'s direction. Rejects linearly
/// polarised α₁; use linear_polarisation_partner for those.
ScanResult tripole_no_ambiguity_scan(const SourceParams& alpha1, const ArrayGeometry& geometry,
                                     const ScanOptions& options = {});

/// Polarisation condition of a linearly polarised source, in the order used
/// for case numbering.
enum class LinearCondition { Gamma90, Gamma0, Eta0 };

std::optional<LinearCondition> linear_condition(const SourceParams& s, double tol = 1e-9);

struct AmbiguityCase {
  int id = 0;              // 1..6; symmetric twins reuse the base id
  bool swapped = false;    // the twin with the conditions of α₁ and α₂ exchanged
  bool parallel_possible = false;
  bool degenerate = false; // α₁ == α₂
  std::string constraint;
};

AmbiguityCase ambiguity_case(LinearCondition c1, LinearCondition c2);

/// Parallel partner of a linearly polarised α₁ on a linear array, from the
/// first applicable case: 2 (γ₁ = 90°, θ₁ = 0), 5 and its twin (one source at
/// θ = 0 with a γ = 0 / η = 0 pairing), 1 (γ₁ = 90°) and 4 (γ₁ = 0°).
/// Returns nullopt when only the no-ambiguity cases 3 and 6 apply.
std::optional<std::pair<SourceParams, AmbiguityCase>> linear_polarisation_partner(
    const SourceParams& alpha1, const ArrayGeometry& geometry);

struct PairClassification {
  AmbiguityCase ambiguity;
  ParallelVerdict verdict;
};

/// Case of a pair of linearly polarised sources plus the computed
/// parallelism of their joint steering vectors on `geometry`.
PairClassification classify_pair(const SourceParams& alpha1, const SourceParams& alpha2,
                                 const ArrayGeometry& geometry);

}  // namespace poldoa
