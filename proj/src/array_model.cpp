#include <poldoa/array_model.hpp>

#include <cstdio>

namespace poldoa {

namespace {

constexpr double kRangeSlack = 1e-12;

bool near_angle(double x, double target, double tol) { return std::abs(x - target) <= tol; }

}  // namespace

SourceParams SourceParams::from_degrees(double theta_deg, double phi_deg, double gamma_deg,
                                        double eta_deg) {
  return {deg2rad(theta_deg), deg2rad(phi_deg), deg2rad(gamma_deg), deg2rad(eta_deg)};
}

std::array<double, 4> SourceParams::degrees() const {
  return {rad2deg(theta), rad2deg(phi), rad2deg(gamma), rad2deg(eta)};
}

SourceParams SourceParams::canonical() const {
  return {theta, wrap_2pi(phi), gamma, wrap_pi(eta)};
}

void SourceParams::validate() const {
  if (!(theta >= -kRangeSlack && theta <= kPi / 2 + kRangeSlack))
    throw Error("theta outside [0, 90] degrees: " + to_string());
  if (!(phi >= -kRangeSlack && phi < kTwoPi + kRangeSlack))
    throw Error("phi outside [0, 360) degrees: " + to_string());
  if (!(gamma >= -kRangeSlack && gamma <= kPi / 2 + kRangeSlack))
    throw Error("gamma outside [0, 90] degrees: " + to_string());
  if (!(eta >= -kPi - kRangeSlack && eta < kPi + kRangeSlack))
    throw Error("eta outside [-180, 180) degrees: " + to_string());
}

bool SourceParams::is_linearly_polarised(double tol) const {
  const double e = wrap_pi(eta);
  return near_angle(gamma, 0.0, tol) || near_angle(gamma, kPi / 2, tol) ||
         near_angle(e, 0.0, tol) || near_angle(std::abs(e), kPi, tol);
}

std::string SourceParams::to_string() const {
  const auto d = degrees();
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g, %.6g) deg", d[0], d[1], d[2], d[3]);
  return buf;
}

ArrayGeometry::ArrayGeometry(SensorKind kind, std::variant<LinearLayout, PlanarLayout> layout,
                             double spacing)
    : kind_(kind), layout_(layout), spacing_(spacing) {
  if (!(spacing > 0.0)) throw Error("array spacing must be positive");
  if (const auto* lin = std::get_if<LinearLayout>(&layout_)) {
    if (lin->elements < 1) throw Error("linear array needs at least one element");
  } else {
    const auto& pl = std::get<PlanarLayout>(layout_);
    if (pl.rows < 1 || pl.cols < 1) throw Error("planar array needs positive rows and cols");
  }
}

ArrayGeometry ArrayGeometry::linear(SensorKind kind, int elements, double spacing) {
  return ArrayGeometry(kind, LinearLayout{elements}, spacing);
}

ArrayGeometry ArrayGeometry::planar(SensorKind kind, int rows, int cols, double spacing) {
  return ArrayGeometry(kind, PlanarLayout{rows, cols}, spacing);
}

int ArrayGeometry::element_count() const {
  if (const auto* lin = std::get_if<LinearLayout>(&layout_)) return lin->elements;
  const auto& pl = std::get<PlanarLayout>(layout_);
  return pl.rows * pl.cols;
}

std::string to_string(SensorKind kind) {
  return kind == SensorKind::Tripole ? "tripole" : "crossed-dipole";
}

std::string ArrayGeometry::describe() const {
  char buf[96];
  if (const auto* lin = std::get_if<LinearLayout>(&layout_)) {
    std::snprintf(buf, sizeof buf, "%s linear %dx1 spacing %.6g", to_string(kind_).c_str(),
                  lin->elements, spacing_);
  } else {
    const auto& pl = std::get<PlanarLayout>(layout_);
    std::snprintf(buf, sizeof buf, "%s planar %dx%d spacing %.6g", to_string(kind_).c_str(),
                  pl.rows, pl.cols, spacing_);
  }
  return buf;
}

CVector spatial_steering(const ArrayGeometry& geometry, double theta, double phi) {
  const double k = kTwoPi * geometry.spacing();
  const double ux = std::sin(theta) * std::cos(phi);
  const double uy = std::sin(theta) * std::sin(phi);
  CVector a(geometry.element_count());
  if (const auto* lin = std::get_if<LinearLayout>(&geometry.layout())) {
    for (int n = 0; n < lin->elements; ++n) a(n) = std::polar(1.0, -k * n * uy);
  } else {
    // Elements in the x-y plane, row p along x, column q along y, row-major.
    const auto& pl = std::get<PlanarLayout>(geometry.layout());
    for (int p = 0; p < pl.rows; ++p)
      for (int q = 0; q < pl.cols; ++q)
        a(p * pl.cols + q) = std::polar(1.0, -k * (p * ux + q * uy));
  }
  return a;
}

PolarisationBasis doa_matrix(double theta, double phi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  PolarisationBasis b;
  b.omega << ct * cp, -sp,
             ct * sp, cp,
             -st, 0.0;
  return b;
}

Eigen::Vector2cd polarisation_phasor(double gamma, double eta) {
  return {std::polar(std::sin(gamma), eta), cdouble(std::cos(gamma), 0.0)};
}

CVector polarisation_vector(const SourceParams& source, SensorKind kind) {
  const Eigen::Vector3cd p =
      doa_matrix(source.theta, source.phi).omega.cast<cdouble>() *
      polarisation_phasor(source.gamma, source.eta);
  if (kind == SensorKind::Tripole) return p;
  return p.head<2>();
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

CVector joint_steering(const ArrayGeometry& geometry, const SourceParams& source) {
  return kron(spatial_steering(geometry, source.theta, source.phi),
              polarisation_vector(source, geometry.sensor_kind()));
}

CMatrix doa_steering_matrix(const ArrayGeometry& geometry, double theta, double phi) {
  const CVector a = spatial_steering(geometry, theta, phi);
  const auto omega = doa_matrix(theta, phi).omega;
  const int c = geometry.components_per_sensor();
  CMatrix B(geometry.dimension(), 2);
  for (Eigen::Index n = 0; n < a.size(); ++n)
    B.middleRows(n * c, c) = a(n) * omega.topRows(c).cast<cdouble>();
  return B;
}

}  // namespace poldoa
