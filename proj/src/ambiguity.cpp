#include <poldoa/ambiguity.hpp>
#include <poldoa/parallel.hpp>
#include <poldoa/spectrum.hpp>

#include <algorithm>

namespace poldoa {

namespace {

constexpr double kDirectionTol = 1e-9;
// Free angles of a partner construction that the case leaves arbitrary.
constexpr double kPartnerOffsetDeg = 30.0;
constexpr double kFreeElevationDeg = 50.0;

Eigen::Vector3d direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double great_circle_deg(double th1, double ph1, double th2, double ph2) {
  const double c = std::clamp(direction(th1, ph1).dot(direction(th2, ph2)), -1.0, 1.0);
  return rad2deg(std::acos(c));
}

bool same_source(const SourceParams& a, const SourceParams& b, double tol = 1e-9) {
  const auto x = a.canonical(), y = b.canonical();
  return std::abs(x.theta - y.theta) <= tol && std::abs(wrap_pi(x.phi - y.phi)) <= tol &&
         std::abs(x.gamma - y.gamma) <= tol && std::abs(wrap_pi(x.eta - y.eta)) <= tol;
}

SourceParams make_partner(double th_deg, double ph_deg, double ga_deg, double et_deg) {
  return SourceParams::from_degrees(th_deg, ph_deg, ga_deg, et_deg).canonical();
}

// Elevation for a partner whose direction must satisfy sinθ₂ sinφ₂ = 0.
double partner_elevation(double phi2_deg) {
  return std::abs(std::sin(deg2rad(phi2_deg))) < kDirectionTol ? kFreeElevationDeg : 0.0;
}

}  // namespace

ParallelVerdict is_parallel(const CVector& u, const CVector& v, double tol) {
  if (u.size() != v.size()) throw Error("is_parallel: vectors differ in length");
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw Error("is_parallel: zero vector");
  const cdouble inner = u.dot(v);  // u^H v
  ParallelVerdict r;
  r.cosine = std::min(1.0, std::abs(inner) / (nu * nv));
  r.parallel = r.cosine >= 1.0 - tol;
  if (r.parallel) r.scale = inner / (nu * nu);
  return r;
}

std::vector<double> doa_parallel_direction(double theta1, double phi1, double theta2) {
  if (!(theta2 > 0.0 && theta2 <= kPi / 2 + 1e-12))
    throw Error("doa_parallel_direction: theta2 must lie in (0, 90] degrees");
  const double u = std::sin(theta1) * std::sin(phi1);
  const double s = u / std::sin(theta2);
  if (std::abs(s) > 1.0) return {};
  const double base = std::asin(std::clamp(s, -1.0, 1.0));
  std::vector<double> out{wrap_2pi(base)};
  const double mirror = wrap_2pi(kPi - base);
  if (std::abs(wrap_pi(mirror - out[0])) > 1e-12) out.push_back(mirror);
  std::sort(out.begin(), out.end());
  return out;
}

SourceParams crossed_dipole_partner(const SourceParams& alpha1, double theta2, double phi2) {
  const double u1 = std::sin(alpha1.theta) * std::sin(alpha1.phi);
  const double u2 = std::sin(theta2) * std::sin(phi2);
  if (std::abs(u1 - u2) > kDirectionTol)
    throw Error("crossed_dipole_partner: (theta2, phi2) is not DOA-parallel to alpha1");
  if (std::abs(std::cos(theta2)) < 1e-12)
    throw Error("crossed_dipole_partner: theta2 = 90 degrees makes Psi singular");
  if (theta2 < 0.0 || theta2 > kPi / 2) throw Error("crossed_dipole_partner: theta2 out of range");

  const Eigen::Matrix2d psi1 = doa_matrix(alpha1.theta, alpha1.phi).psi();
  const Eigen::Matrix2d psi2 = doa_matrix(theta2, phi2).psi();
  const Eigen::Vector2cd g1 = polarisation_phasor(alpha1.gamma, alpha1.eta);
  const Eigen::Vector2cd g2 = psi2.inverse().cast<cdouble>() * (psi1.cast<cdouble>() * g1);

  double gamma2 = 0.0, eta2 = 0.0;
  if (std::abs(g2(1)) == 0.0) {
    gamma2 = kPi / 2;
    eta2 = std::arg(g2(0));
  } else {
    gamma2 = std::atan(std::abs(g2(0)) / std::abs(g2(1)));
    eta2 = std::arg(g2(0) / g2(1));
  }
  return SourceParams{theta2, phi2, gamma2, eta2}.canonical();
}

ScanResult tripole_no_ambiguity_scan(const SourceParams& alpha1, const ArrayGeometry& geometry,
                                     const ScanOptions& options) {
  alpha1.validate();
  if (alpha1.is_linearly_polarised())
    throw Error("tripole_no_ambiguity_scan: " + alpha1.to_string() +
                " is linearly polarised; use linear_polarisation_partner");
  const double step = options.step_deg;
  const Axis th_axis = Axis::closed("theta", 0.0, 90.0, step);
  const Axis ph_axis = Axis::full_circle("phi", 0.0, step);
  const Axis ga_axis = Axis::closed("gamma", 0.0, 90.0, step);
  const Axis et_axis = Axis::full_circle("eta", -180.0, step);
  const bool tripole = geometry.sensor_kind() == SensorKind::Tripole;

  const CVector a1 = spatial_steering(geometry, alpha1.theta, alpha1.phi);
  CVector p1 = polarisation_vector(alpha1, geometry.sensor_kind());
  p1 /= p1.norm();
  const double a_norm2 = a1.squaredNorm();

  std::vector<Eigen::Vector2cd> phasors;
  for (int k = 0; k < ga_axis.count; ++k)
    for (int l = 0; l < et_axis.count; ++l)
      phasors.push_back(polarisation_phasor(deg2rad(ga_axis.value(k)), deg2rad(et_axis.value(l))));
  const std::size_t pol_cells = phasors.size();

  struct RowBest {
    double cos2 = -1.0;
    std::size_t flat = 0;
    std::size_t scanned = 0;
  };
  std::vector<RowBest> rows(static_cast<std::size_t>(th_axis.count));

  parallel_for(rows.size(), options.threads, [&](std::size_t i) {
    RowBest& best = rows[i];
    const double th = deg2rad(th_axis.value(static_cast<int>(i)));
    const double ct2 = std::cos(th) * std::cos(th);
    for (int j = 0; j < ph_axis.count; ++j) {
      const double ph = deg2rad(ph_axis.value(j));
      if (great_circle_deg(alpha1.theta, alpha1.phi, th, ph) <= options.exclusion_radius_deg)
        continue;
      best.scanned += pol_cells;
      const CVector a2 = spatial_steering(geometry, th, ph);
      const double ca2 = std::norm(a1.dot(a2)) / (a_norm2 * a2.squaredNorm());
      if (ca2 <= best.cos2) continue;
      const auto omega = doa_matrix(th, ph).omega;
      const int c = geometry.components_per_sensor();
      // p1^H M g = coef · g with M = Ω (tripole) or Ψ (crossed-dipole).
      const Eigen::Vector2cd coef =
          omega.topRows(c).transpose().cast<cdouble>() * p1.conjugate();
      const std::size_t base = (i * ph_axis.count + static_cast<std::size_t>(j)) * pol_cells;
      for (std::size_t p = 0; p < pol_cells; ++p) {
        const auto& g = phasors[p];
        double m2 = std::norm(coef(0) * g(0) + coef(1) * g(1));
        if (!tripole) {
          const double n2 = ct2 * std::norm(g(0)) + std::norm(g(1));
          if (n2 < 1e-24) continue;
          m2 /= n2;
        }
        const double v = ca2 * m2;
        if (v > best.cos2) {
          best.cos2 = v;
          best.flat = base + p;
        }
      }
    }
  });

  ScanResult r;
  RowBest overall;
  for (const auto& row : rows) {
    r.nodes_scanned += row.scanned;
    if (row.cos2 > overall.cos2) overall = row;
  }
  if (overall.cos2 < 0.0) throw Error("tripole_no_ambiguity_scan: every node was excluded");
  r.max_cosine = std::sqrt(std::min(1.0, overall.cos2));
  std::size_t f = overall.flat;
  const int l = static_cast<int>(f % et_axis.count);
  f /= et_axis.count;
  const int k = static_cast<int>(f % ga_axis.count);
  f /= ga_axis.count;
  const int j = static_cast<int>(f % ph_axis.count);
  const int i = static_cast<int>(f / ph_axis.count);
  r.location = {th_axis.value(i), ph_axis.value(j), ga_axis.value(k), et_axis.value(l)};
  r.distance_deg = great_circle_deg(alpha1.theta, alpha1.phi, deg2rad(r.location.theta_deg),
                                    deg2rad(r.location.phi_deg));
  r.certified = r.max_cosine < 1.0 - options.certify_margin;
  return r;
}

std::optional<LinearCondition> linear_condition(const SourceParams& s, double tol) {
  if (std::abs(s.gamma - kPi / 2) <= tol) return LinearCondition::Gamma90;
  if (std::abs(s.gamma) <= tol) return LinearCondition::Gamma0;
  const double e = wrap_pi(s.eta);
  if (std::abs(e) <= tol || std::abs(std::abs(e) - kPi) <= tol) return LinearCondition::Eta0;
  return std::nullopt;
}

AmbiguityCase ambiguity_case(LinearCondition c1, LinearCondition c2) {
  using LC = LinearCondition;
  auto base = [](LC a, LC b) -> AmbiguityCase {
    if (a == LC::Gamma90 && b == LC::Gamma90)
      return {1, false, true, false, "same (theta, phi); eta arbitrary"};
    if (a == LC::Gamma90 && b == LC::Gamma0)
      return {2, false, true, false, "theta1 = 0 and tan(phi1) = -cot(phi2)"};
    if (a == LC::Gamma90 && b == LC::Eta0) return {3, false, false, false, "no ambiguity"};
    if (a == LC::Gamma0 && b == LC::Gamma0)
      return {4, false, true, false, "same phi; eta arbitrary"};
    if (a == LC::Gamma0 && b == LC::Eta0)
      return {5, false, true, false, "theta2 = 0 and tan(gamma2) = tan(phi2 - phi1)"};
    if (a == LC::Eta0 && b == LC::Eta0)
      return {6, false, false, false, "no ambiguity unless (theta, phi, gamma) coincide"};
    return {};
  };
  AmbiguityCase c = base(c1, c2);
  if (c.id == 0) {
    c = base(c2, c1);
    c.swapped = true;
  }
  return c;
}

std::optional<std::pair<SourceParams, AmbiguityCase>> linear_polarisation_partner(
    const SourceParams& alpha1, const ArrayGeometry& geometry) {
  alpha1.validate();
  if (geometry.is_planar())
    throw Error("linear_polarisation_partner: DOA-parallel directions are defined for linear arrays");
  const auto cond = linear_condition(alpha1);
  if (!cond)
    throw Error("linear_polarisation_partner: " + alpha1.to_string() + " is not linearly polarised");

  const auto d = alpha1.degrees();
  const double th1 = d[0], ph1 = d[1], ga1 = d[2], et1 = d[3];
  const bool at_zenith = std::abs(alpha1.theta) < kDirectionTol;
  const bool zero_u = std::abs(std::sin(alpha1.theta) * std::sin(alpha1.phi)) < kDirectionTol;

  std::vector<SourceParams> candidates;
  switch (*cond) {
    case LinearCondition::Gamma90:
      if (at_zenith) {
        const double ph2 = ph1 - 90.0;
        candidates.push_back(make_partner(partner_elevation(ph2), ph2, 0.0, et1 + kPartnerOffsetDeg));
      }
      candidates.push_back(make_partner(th1, ph1, 90.0, et1 + kPartnerOffsetDeg));
      break;
    case LinearCondition::Gamma0:
      if (zero_u)
        candidates.push_back(
            make_partner(0.0, ph1 + kPartnerOffsetDeg, kPartnerOffsetDeg, 0.0));
      candidates.push_back(make_partner(th1, ph1, 0.0, et1 + kPartnerOffsetDeg));
      break;
    case LinearCondition::Eta0:
      if (at_zenith) {
        // At the zenith p₁ is the γ = 0 vector of azimuth φ₁ ∓ γ₁ (η₁ = 0 or ±180°).
        const double sign = std::cos(alpha1.eta) > 0.0 ? 1.0 : -1.0;
        const double ph2 = ph1 - sign * ga1;
        candidates.push_back(make_partner(partner_elevation(ph2), ph2, 0.0, kPartnerOffsetDeg));
      }
      break;
  }

  const CVector v1 = joint_steering(geometry, alpha1);
  for (const auto& alpha2 : candidates) {
    if (same_source(alpha1, alpha2)) continue;
    const auto c2 = linear_condition(alpha2);
    if (!c2) continue;
    if (!is_parallel(v1, joint_steering(geometry, alpha2)).parallel) continue;
    return std::make_pair(alpha2, ambiguity_case(*cond, *c2));
  }
  return std::nullopt;
}

PairClassification classify_pair(const SourceParams& alpha1, const SourceParams& alpha2,
                                 const ArrayGeometry& geometry) {
  const auto c1 = linear_condition(alpha1), c2 = linear_condition(alpha2);
  if (!c1 || !c2) throw Error("classify_pair: both sources must be linearly polarised");
  PairClassification out;
  out.ambiguity = ambiguity_case(*c1, *c2);
  out.ambiguity.degenerate = same_source(alpha1, alpha2);
  out.verdict = is_parallel(joint_steering(geometry, alpha1), joint_steering(geometry, alpha2));
  return out;
}

}  // namespace poldoa
