#include <poldoa/crb.hpp>

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace poldoa {

void CrbScenario::validate() const {
  if (sources.size() != powers.size()) throw Error("one source power is required per source");
  if (sources.empty()) throw Error("CRB needs at least one source");
  if (!(noise_power > 0.0)) throw Error("CRB needs positive noise power (R must be nonsingular)");
  for (const auto& s : sources) s.validate();
}

std::array<CVector, 4> steering_derivatives(const SourceParams& source,
                                            const ArrayGeometry& geometry) {
  const double th = source.theta, ph = source.phi;
  const double ct = std::cos(th), st = std::sin(th), cp = std::cos(ph), sp = std::sin(ph);
  const double k = kTwoPi * geometry.spacing();

  // Spatial steering and its angle derivatives: a_n = exp(-j k ψ_n(θ, φ)).
  const CVector a = spatial_steering(geometry, th, ph);
  CVector da_dth(a.size()), da_dph(a.size());
  const cdouble mj(0.0, -1.0);
  if (const auto* lin = std::get_if<LinearLayout>(&geometry.layout())) {
    for (int n = 0; n < lin->elements; ++n) {
      da_dth(n) = mj * k * (n * ct * sp) * a(n);
      da_dph(n) = mj * k * (n * st * cp) * a(n);
    }
  } else {
    const auto& pl = std::get<PlanarLayout>(geometry.layout());
    for (int p = 0; p < pl.rows; ++p)
      for (int q = 0; q < pl.cols; ++q) {
        const int n = p * pl.cols + q;
        da_dth(n) = mj * k * (p * ct * cp + q * ct * sp) * a(n);
        da_dph(n) = mj * k * (-p * st * sp + q * st * cp) * a(n);
      }
  }

  const Eigen::Matrix<double, 3, 2> omega = doa_matrix(th, ph).omega;
  Eigen::Matrix<double, 3, 2> domega_dth, domega_dph;
  domega_dth << -st * cp, 0.0,
                -st * sp, 0.0,
                -ct, 0.0;
  domega_dph << -ct * sp, -cp,
                ct * cp, -sp,
                0.0, 0.0;

  const Eigen::Vector2cd g = polarisation_phasor(source.gamma, source.eta);
  const Eigen::Vector2cd dg_dga(std::polar(std::cos(source.gamma), source.eta),
                                cdouble(-std::sin(source.gamma), 0.0));
  const Eigen::Vector2cd dg_deta(cdouble(0.0, 1.0) * std::polar(std::sin(source.gamma), source.eta),
                                 cdouble(0.0, 0.0));

  const int c = geometry.components_per_sensor();
  auto head = [c](const Eigen::Vector3cd& v) -> CVector { return v.head(c); };
  const CVector p = head(omega.cast<cdouble>() * g);
  const CVector dp_dth = head(domega_dth.cast<cdouble>() * g);
  const CVector dp_dph = head(domega_dph.cast<cdouble>() * g);
  const CVector dp_dga = head(omega.cast<cdouble>() * dg_dga);
  const CVector dp_deta = head(omega.cast<cdouble>() * dg_deta);

  return {kron(da_dth, p) + kron(a, dp_dth), kron(da_dph, p) + kron(a, dp_dph), kron(a, dp_dga),
          kron(a, dp_deta)};
}

std::vector<CMatrix> covariance_derivatives(const CrbScenario& scenario) {
  scenario.validate();
  std::vector<CMatrix> out;
  out.reserve(scenario.sources.size() * 4);
  for (std::size_t m = 0; m < scenario.sources.size(); ++m) {
    const CVector v = joint_steering(scenario.geometry, scenario.sources[m]);
    const auto dv = steering_derivatives(scenario.sources[m], scenario.geometry);
    for (const auto& d : dv) {
      const CMatrix outer = d * v.adjoint();
      out.push_back(scenario.powers[m] * (outer + outer.adjoint()));
    }
  }
  return out;
}

FisherMatrix fisher_matrix(const CrbScenario& scenario, int snapshots) {
  if (snapshots < 1) throw Error("snapshot count must be at least 1");
  scenario.validate();
  const int dim = scenario.geometry.dimension();
  CMatrix R = scenario.noise_power * CMatrix::Identity(dim, dim);
  for (std::size_t m = 0; m < scenario.sources.size(); ++m) {
    const CVector v = joint_steering(scenario.geometry, scenario.sources[m]);
    R.noalias() += scenario.powers[m] * v * v.adjoint();
  }
  Eigen::LDLT<CMatrix> ldlt(R);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw Error("covariance is singular; the Fisher matrix is undefined");

  const auto dR = covariance_derivatives(scenario);
  std::vector<CMatrix> W;  // R⁻¹ ∂R/∂α_i
  W.reserve(dR.size());
  for (const auto& d : dR) W.push_back(ldlt.solve(d));

  const Eigen::Index n = static_cast<Eigen::Index>(W.size());
  FisherMatrix F{RMatrix(n, n), snapshots};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      // tr(A B) = Σ_kl A_kl B_lk
      const double t = W[i].cwiseProduct(W[j].transpose()).sum().real();
      F.data(i, j) = F.data(j, i) = snapshots * t;
    }
  return F;
}

double CrbReport::std_deg(std::size_t source, int parameter) const {
  return rad2deg(std::sqrt(variance.at(source).at(static_cast<std::size_t>(parameter))));
}

CrbReport crb_bounds(const CrbScenario& scenario, int snapshots, double max_condition) {
  const FisherMatrix F = fisher_matrix(scenario, snapshots);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(F.data);
  const RVector ev = es.eigenvalues();
  const double lo = ev.minCoeff(), hi = ev.maxCoeff();
  if (!(lo > 0.0) || hi / lo > max_condition) {
    const RVector dir = es.eigenvectors().col(0);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(dir.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return std::abs(dir(a)) > std::abs(dir(b)); });
    std::string names;
    for (Eigen::Index i : order) {
      if (std::abs(dir(i)) < 0.1) break;
      if (!names.empty()) names += ", ";
      names += std::string(kParameterNames[static_cast<std::size_t>(i % 4)]) + "_" +
               std::to_string(i / 4 + 1);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "Fisher matrix is singular or ill-conditioned (cond %.3g); ",
                  lo > 0.0 ? hi / lo : INFINITY);
    throw Error(std::string(buf) + "degenerate parameter combination: " + names);
  }
  const RMatrix C = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  CrbReport r;
  r.variance.resize(scenario.sources.size());
  for (std::size_t m = 0; m < scenario.sources.size(); ++m)
    for (int i = 0; i < 4; ++i) {
      const auto k = static_cast<Eigen::Index>(4 * m + i);
      r.variance[m][static_cast<std::size_t>(i)] = C(k, k);
    }
  return r;
}

}  // namespace poldoa
