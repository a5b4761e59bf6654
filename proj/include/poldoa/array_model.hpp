#pragma once

#include <poldoa/types.hpp>

#include <array>
#include <string>
#include <variant>

namespace poldoa {

/// Direction and polarisation of one impinging plane wave, all in radians.
///
/// theta is the elevation from the z axis (upper hemisphere), phi the azimuth,
/// gamma the auxiliary polarisation angle and eta the polarisation phase
/// difference.
struct SourceParams {
  double theta = 0.0;
  double phi = 0.0;
  double gamma = 0.0;
  double eta = 0.0;

  static SourceParams from_degrees(double theta_deg, double phi_deg,
                                   double gamma_deg, double eta_deg);

  /// Returns the four parameters in degrees, (theta, phi, gamma, eta).
  std::array<double, 4> degrees() const;

  /// Same parameters with phi folded into [0, 2π) and eta into [-π, π).
  SourceParams canonical() const;

  /// Throws Error if any parameter lies outside its canonical range.
  void validate() const;

  /// True when gamma is 0 or π/2, or eta is 0 or ±π: the polarisation
  /// vector is then a real vector up to a common phase.
  bool is_linearly_polarised(double tol = 1e-9) const;

  std::string to_string() const;

  friend bool operator==(const SourceParams&, const SourceParams&) = default;
};

enum class SensorKind { Tripole, CrossedDipole };

struct LinearLayout {
  int elements = 0;
};

struct PlanarLayout {
  int rows = 0;
  int cols = 0;
};

class ArrayGeometry {
 public:
  ArrayGeometry(SensorKind kind, std::variant<LinearLayout, PlanarLayout> layout,
                double spacing = 0.5);

  static ArrayGeometry linear(SensorKind kind, int elements, double spacing = 0.5);
  static ArrayGeometry planar(SensorKind kind, int rows, int cols, double spacing = 0.5);

  SensorKind sensor_kind() const { return kind_; }
  const std::variant<LinearLayout, PlanarLayout>& layout() const { return layout_; }
  bool is_planar() const { return std::holds_alternative<PlanarLayout>(layout_); }
  double spacing() const { return spacing_; }

  int element_count() const;
  int components_per_sensor() const { return kind_ == SensorKind::Tripole ? 3 : 2; }
  /// Length of the joint steering vector.
  int dimension() const { return element_count() * components_per_sensor(); }
  int dipole_count() const { return dimension(); }

  std::string describe() const;

 private:
  SensorKind kind_;
  std::variant<LinearLayout, PlanarLayout> layout_;
  double spacing_;
};

std::string to_string(SensorKind kind);

/// The DOA component Ω (3×2) and its top 2×2 block Ψ.
struct PolarisationBasis {
  Eigen::Matrix<double, 3, 2> omega;

  Eigen::Matrix2d psi() const { return omega.topRows<2>(); }
};

CVector spatial_steering(const ArrayGeometry& geometry, double theta, double phi);

PolarisationBasis doa_matrix(double theta, double phi);

Eigen::Vector2cd polarisation_phasor(double gamma, double eta);

/// p = Ω·g for tripoles (length 3), its first two entries q for crossed-dipoles.
CVector polarisation_vector(const SourceParams& source, SensorKind kind);

/// a ⊗ p (or a ⊗ q), sensor index outer, component index inner.
CVector joint_steering(const ArrayGeometry& geometry, const SourceParams& source);

/// B = a ⊗ Ω (3N×2) for tripoles, a ⊗ Ψ (2N×2) for crossed-dipoles, so that
/// B·g equals the joint steering vector.
CMatrix doa_steering_matrix(const ArrayGeometry& geometry, double theta, double phi);

/// Kronecker product of two column vectors.
CVector kron(const CVector& a, const CVector& b);

}  // namespace poldoa
