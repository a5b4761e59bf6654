#include <poldoa/parallel.hpp>
#include <poldoa/subspace_music.hpp>

#include <algorithm>
#include <limits>

namespace poldoa {

namespace {

// Quadratic form g^H G g of a Hermitian 2×2 matrix.
double hermitian_form2(const Eigen::Matrix2cd& G, const Eigen::Vector2cd& g) {
  return G(0, 0).real() * std::norm(g(0)) + G(1, 1).real() * std::norm(g(1)) +
         2.0 * (std::conj(g(0)) * G(0, 1) * g(1)).real();
}

Eigen::Matrix2cd gram_of(const CMatrix& noise_adjoint, const CMatrix& B) {
  const CMatrix C = noise_adjoint * B;
  Eigen::Matrix2cd G = C.adjoint() * C;
  G(1, 0) = std::conj(G(0, 1));
  return G;
}

// Basis used by the reduced DOA search; see doa_gram.
CMatrix doa_search_basis(const ArrayGeometry& geometry, double theta, double phi) {
  if (geometry.sensor_kind() == SensorKind::Tripole)
    return doa_steering_matrix(geometry, theta, phi);
  const CVector a = spatial_steering(geometry, theta, phi);
  const double c = std::cos(phi), s = std::sin(phi);
  CMatrix B(geometry.dimension(), 2);
  for (Eigen::Index n = 0; n < a.size(); ++n) {
    B(2 * n, 0) = a(n) * c;
    B(2 * n, 1) = -a(n) * s;
    B(2 * n + 1, 0) = a(n) * s;
    B(2 * n + 1, 1) = a(n) * c;
  }
  return B;
}

// ‖Ψ g‖² for crossed-dipoles, where Ψ^T Ψ = diag(cos²θ, 1); 1 for tripoles.
double steering_norm_factor(const ArrayGeometry& geometry, double theta,
                            const Eigen::Vector2cd& g) {
  if (geometry.sensor_kind() == SensorKind::Tripole) return 1.0;
  const double ct = std::cos(theta);
  return ct * ct * std::norm(g(0)) + std::norm(g(1));
}

double normalised_form(const ArrayGeometry& geometry, double theta, const Eigen::Matrix2cd& G,
                       const Eigen::Vector2cd& g) {
  const double q = hermitian_form2(G, g);
  const double norm = steering_norm_factor(geometry, theta, g);
  if (norm == 1.0) return q;
  if (!(norm > 0.0)) return std::numeric_limits<double>::infinity();
  return q / norm;
}

CMatrix noise_adjoint_of(const CMatrix& noise_basis, const ArrayGeometry& geometry) {
  if (noise_basis.rows() != geometry.dimension())
    throw Error("noise basis rows do not match the array dimension");
  return noise_basis.adjoint();
}

enum class DoaStat { Det, MinEig };

// det(C^H C) as ‖c₀‖²‖c₁ - proj c₁‖² with the residual formed explicitly, so
// the value near rank deficiency is not lost to cancellation in G.
double gram_det_stable(const CMatrix& C) {
  const double n0 = C.col(0).squaredNorm(), n1 = C.col(1).squaredNorm();
  const int a = n0 >= n1 ? 0 : 1, b = 1 - a;
  const double na = std::max(n0, n1);
  if (na == 0.0) return 0.0;
  const cdouble k = C.col(a).dot(C.col(b)) / na;
  return na * (C.col(b) - k * C.col(a)).squaredNorm();
}

double doa_cost(const CMatrix& C, DoaStat stat) {
  const double det = gram_det_stable(C);
  if (stat == DoaStat::Det) return det;
  Eigen::Matrix2cd G = C.adjoint() * C;
  G(1, 0) = std::conj(G(0, 1));
  const double a = G(0, 0).real(), d = G(1, 1).real();
  const double lmax = 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + std::norm(G(0, 1)));
  return lmax > 0.0 ? det / lmax : 0.0;
}

double great_circle_deg(double th1, double ph1, double th2, double ph2) {
  const double t1 = deg2rad(th1), p1 = deg2rad(ph1), t2 = deg2rad(th2), p2 = deg2rad(ph2);
  const double c = std::sin(t1) * std::sin(t2) * std::cos(p1 - p2) + std::cos(t1) * std::cos(t2);
  return rad2deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

// Strongest local maxima whose directions are at least min_sep apart; a
// maximum closer than that to a stronger one is a ripple of the same peak.
std::vector<Peak> separated_peaks(const SpectrumGrid& s, int count, double min_sep) {
  std::vector<Peak> out;
  const auto all = local_maxima(s);
  for (const auto& p : all) {
    if (static_cast<int>(out.size()) == count) break;
    const bool near = std::any_of(out.begin(), out.end(), [&](const Peak& q) {
      return great_circle_deg(p.coordinates[0], p.coordinates[1], q.coordinates[0], q.coordinates[1]) < min_sep;
    });
    if (!near) out.push_back(p);
  }
  if (static_cast<int>(out.size()) < count)
    throw Error("requested " + std::to_string(count) + " peaks but found " + std::to_string(out.size()) +
                " separated local maxima (" + std::to_string(all.size()) + " in total)");
  return out;
}

SpectrumGrid doa_spectrum(const CMatrix& noise_basis, const ArrayGeometry& geometry,
                          const std::array<Axis, 2>& axes, unsigned threads, DoaStat stat) {
  const CMatrix UnH = noise_adjoint_of(noise_basis, geometry);
  SpectrumGrid s;
  s.axes = {axes[0], axes[1]};
  s.cost.resize(SpectrumGrid::cell_count(s.axes));
  const int cols = axes[1].count;
  parallel_for(static_cast<std::size_t>(axes[0].count), threads, [&](std::size_t i) {
    const double theta = deg2rad(axes[0].value(static_cast<int>(i)));
    for (int j = 0; j < cols; ++j) {
      const double phi = deg2rad(axes[1].value(j));
      const CMatrix C = UnH * doa_search_basis(geometry, theta, phi);
      s.cost[i * cols + j] = doa_cost(C, stat);
    }
  });
  return s;
}

Axis refined_axis(const Axis& coarse, double centre, int factor) {
  const double fine = coarse.step / factor;
  double lo = centre - coarse.step, hi = centre + coarse.step;
  if (!coarse.periodic) {
    lo = std::max(lo, coarse.start);
    hi = std::min(hi, coarse.stop());
  }
  return Axis::closed(coarse.name, lo, hi, fine);
}

Axis window_axis(const Axis& coarse, double centre, double half_width) {
  const double snapped = coarse.start + std::round((centre - coarse.start) / coarse.step) * coarse.step;
  double lo = snapped - std::floor(half_width / coarse.step + 1e-9) * coarse.step;
  double hi = snapped + std::floor(half_width / coarse.step + 1e-9) * coarse.step;
  if (!coarse.periodic) {
    lo = std::max(lo, coarse.start);
    hi = std::min(hi, coarse.stop());
  }
  return Axis::closed(coarse.name, lo, hi, coarse.step);
}

SourceParams canonical_from_degrees(double th, double ph, double ga, double et) {
  th = std::clamp(th, 0.0, 90.0);
  ga = std::clamp(ga, 0.0, 90.0);
  return SourceParams::from_degrees(th, ph, ga, et).canonical();
}

struct DoaPoint {
  double theta_deg;
  double phi_deg;
};

constexpr int kMaxRecentre = 20;

// True when the fine peak lies on an edge of its window that is not also an
// edge of the full search range, i.e. the maximum may lie outside the window.
bool on_open_edge(const std::vector<Axis>& fine, const std::vector<Axis>& coarse,
                  const std::vector<int>& index) {
  for (std::size_t d = 0; d < fine.size(); ++d) {
    const bool lo = index[d] == 0, hi = index[d] == fine[d].count - 1;
    if (coarse[d].periodic) {
      if (lo || hi) return true;
      continue;
    }
    if (lo && fine[d].start > coarse[d].start + 1e-9) return true;
    if (hi && fine[d].stop() < coarse[d].stop() - 1e-9) return true;
  }
  return false;
}

// One level of refinement on a grid refine_factor times finer, over ±1 coarse
// cell around the peak; the window is re-centred while the peak sits on its
// edge.
template <class Evaluate>
std::vector<double> refine_peak(const std::vector<Axis>& coarse, std::vector<double> centre,
                                const GridConfig& grid, Evaluate&& evaluate) {
  for (int pass = 0; pass < kMaxRecentre; ++pass) {
    std::vector<Axis> fine;
    for (std::size_t d = 0; d < coarse.size(); ++d)
      fine.push_back(refined_axis(coarse[d], centre[d], grid.refine_factor));
    const Peak p = global_peak(evaluate(fine));
    centre = p.coordinates;
    if (!on_open_edge(fine, coarse, p.index)) break;
  }
  return centre;
}

DoaPoint refine_doa(const CMatrix& Un, const ArrayGeometry& geometry, const std::array<Axis, 2>& coarse,
                    DoaPoint p, const GridConfig& grid, DoaStat stat) {
  if (!grid.refine) return p;
  const auto c = refine_peak({coarse[0], coarse[1]}, {p.theta_deg, p.phi_deg}, grid,
                             [&](const std::vector<Axis>& f) {
                               return doa_spectrum(Un, geometry, {f[0], f[1]}, 1, stat);
                             });
  return {c[0], c[1]};
}

std::pair<double, double> polarisation_search(const CMatrix& Un, const ArrayGeometry& geometry,
                                              DoaPoint doa, const GridConfig& grid) {
  const std::array<Axis, 2> coarse{gamma_axis(grid.pol_step_deg), eta_axis(grid.pol_step_deg)};
  const double th = deg2rad(doa.theta_deg), ph = deg2rad(doa.phi_deg);
  auto c = global_peak(polarisation_spectrum(Un, geometry, th, ph, coarse)).coordinates;
  if (grid.refine)
    c = refine_peak({coarse[0], coarse[1]}, c, grid, [&](const std::vector<Axis>& f) {
      return polarisation_spectrum(Un, geometry, th, ph, {f[0], f[1]});
    });
  return {c[0], c[1]};
}

std::array<Axis, 4> full_axes_4d(const GridConfig& grid) {
  return {theta_axis(grid.doa_step_deg), phi_axis(grid.doa_step_deg),
          gamma_axis(grid.pol_step_deg), eta_axis(grid.pol_step_deg)};
}

std::vector<double> refine_4d(const CMatrix& Un, const ArrayGeometry& geometry,
                              const std::array<Axis, 4>& coarse, std::vector<double> c,
                              const GridConfig& grid) {
  if (!grid.refine) return c;
  return refine_peak({coarse.begin(), coarse.end()}, c, grid, [&](const std::vector<Axis>& f) {
    return music_spectrum_4d(Un, geometry, {f[0], f[1], f[2], f[3]}, grid.threads);
  });
}

}  // namespace

SubspaceDecomposition decompose(const CovarianceMatrix& R, int num_sources) {
  R.check_hermitian(1e-10);
  const Eigen::Index dim = R.size();
  if (num_sources < 0) throw Error("source count must be non-negative");
  if (num_sources >= dim)
    throw Error("source count " + std::to_string(num_sources) +
                " leaves no noise subspace (dimension " + std::to_string(dim) + ")");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(R.data);
  if (es.info() != Eigen::Success) throw Error("Hermitian eigendecomposition failed");
  SubspaceDecomposition out;
  out.eigenvalues = es.eigenvalues().reverse();
  const CMatrix V = es.eigenvectors().rowwise().reverse();
  out.signal_basis = V.leftCols(num_sources);
  out.noise_basis = V.rightCols(dim - num_sources);
  return out;
}

Eigen::Matrix2cd doa_gram(const CMatrix& noise_basis, const ArrayGeometry& geometry, double theta,
                          double phi) {
  return gram_of(noise_adjoint_of(noise_basis, geometry), doa_search_basis(geometry, theta, phi));
}

double hermitian_det2(const Eigen::Matrix2cd& G) {
  return G(0, 0).real() * G(1, 1).real() - std::norm(G(0, 1));
}

double hermitian_min_eig2(const Eigen::Matrix2cd& G) {
  const double a = G(0, 0).real(), d = G(1, 1).real();
  const double half_gap = 0.5 * (a - d);
  const double root = std::sqrt(half_gap * half_gap + std::norm(G(0, 1)));
  const double lmax = 0.5 * (a + d) + root;
  // det / λ_max avoids the cancellation in (a + d)/2 - root near rank one.
  if (lmax > 0.0) return hermitian_det2(G) / lmax;
  return 0.5 * (a + d) - root;
}

Axis theta_axis(double step) { return Axis::closed("theta", 0.0, 90.0, step); }
Axis phi_axis(double step) { return Axis::full_circle("phi", 0.0, step); }
Axis gamma_axis(double step) { return Axis::closed("gamma", 0.0, 90.0, step); }
Axis eta_axis(double step) { return Axis::full_circle("eta", -180.0, step); }

SpectrumGrid music_spectrum_4d(const CMatrix& noise_basis, const ArrayGeometry& geometry,
                               const std::array<Axis, 4>& axes, unsigned threads,
                               std::size_t max_cells) {
  const CMatrix UnH = noise_adjoint_of(noise_basis, geometry);
  SpectrumGrid s;
  s.axes.assign(axes.begin(), axes.end());
  const std::size_t cells = SpectrumGrid::cell_count(s.axes);
  if (cells > max_cells)
    throw Error("4-D grid of " + std::to_string(cells) +
                " nodes exceeds the limit; use a coarser step or a search window");
  s.cost.resize(cells);

  std::vector<Eigen::Vector2cd> phasors;
  phasors.reserve(static_cast<std::size_t>(axes[2].count) * axes[3].count);
  for (int k = 0; k < axes[2].count; ++k)
    for (int l = 0; l < axes[3].count; ++l)
      phasors.push_back(polarisation_phasor(deg2rad(axes[2].value(k)), deg2rad(axes[3].value(l))));
  const std::size_t pol_cells = phasors.size();
  const int phi_count = axes[1].count;

  parallel_for(static_cast<std::size_t>(axes[0].count), threads, [&](std::size_t i) {
    const double theta = deg2rad(axes[0].value(static_cast<int>(i)));
    for (int j = 0; j < phi_count; ++j) {
      const double phi = deg2rad(axes[1].value(j));
      const auto G = gram_of(UnH, doa_steering_matrix(geometry, theta, phi));
      double* out = &s.cost[(i * phi_count + j) * pol_cells];
      for (std::size_t p = 0; p < pol_cells; ++p)
        out[p] = normalised_form(geometry, theta, G, phasors[p]);
    }
  });
  return s;
}

SpectrumGrid doa_spectrum_det(const CMatrix& noise_basis, const ArrayGeometry& geometry,
                              const std::array<Axis, 2>& axes, unsigned threads) {
  return doa_spectrum(noise_basis, geometry, axes, threads, DoaStat::Det);
}

SpectrumGrid doa_spectrum_mineig(const CMatrix& noise_basis, const ArrayGeometry& geometry,
                                 const std::array<Axis, 2>& axes, unsigned threads) {
  return doa_spectrum(noise_basis, geometry, axes, threads, DoaStat::MinEig);
}

SpectrumGrid polarisation_spectrum(const CMatrix& noise_basis, const ArrayGeometry& geometry,
                                   double theta_hat, double phi_hat,
                                   const std::array<Axis, 2>& axes) {
  const CMatrix UnH = noise_adjoint_of(noise_basis, geometry);
  const auto G = gram_of(UnH, doa_steering_matrix(geometry, theta_hat, phi_hat));
  SpectrumGrid s;
  s.axes = {axes[0], axes[1]};
  s.cost.resize(SpectrumGrid::cell_count(s.axes));
  for (int k = 0; k < axes[0].count; ++k)
    for (int l = 0; l < axes[1].count; ++l) {
      const auto g = polarisation_phasor(deg2rad(axes[0].value(k)), deg2rad(axes[1].value(l)));
      s.cost[static_cast<std::size_t>(k) * axes[1].count + l] =
          normalised_form(geometry, theta_hat, G, g);
    }
  return s;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Music4D: return "music4d";
    case Method::Reduced2DDet: return "det";
    case Method::Reduced2DEig: return "mineig";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "music4d" || s == "4d") return Method::Music4D;
  if (s == "det") return Method::Reduced2DDet;
  if (s == "mineig" || s == "eig") return Method::Reduced2DEig;
  throw Error("unknown method '" + s + "' (expected det, mineig or music4d)");
}

std::vector<std::array<double, 4>> EstimateSet::degrees() const {
  std::vector<std::array<double, 4>> out;
  out.reserve(sources.size());
  for (const auto& s : sources) out.push_back(s.degrees());
  return out;
}

EstimateSet estimate(const CovarianceMatrix& R, const ArrayGeometry& geometry, int num_sources,
                     Method method, const GridConfig& grid,
                     const std::vector<SourceParams>& hints) {
  if (R.size() != geometry.dimension()) throw Error("covariance size does not match the array");
  const CMatrix Un = decompose(R, num_sources).noise_basis;
  EstimateSet out;
  out.method = method;

  if (method == Method::Music4D) {
    const auto coarse = full_axes_4d(grid);
    std::vector<std::vector<double>> found;
    if (grid.window_4d_deg) {
      if (hints.size() != static_cast<std::size_t>(num_sources))
        throw Error("windowed 4-D search needs one hint per source");
      for (const auto& h : hints) {
        const auto d = h.degrees();
        std::array<Axis, 4> win;
        for (int k = 0; k < 4; ++k) win[k] = window_axis(coarse[k], d[k], *grid.window_4d_deg);
        const auto c = global_peak(music_spectrum_4d(Un, geometry, win, grid.threads)).coordinates;
        found.push_back(refine_4d(Un, geometry, coarse, c, grid));
      }
    } else {
      const auto s = music_spectrum_4d(Un, geometry, coarse, grid.threads);
      for (const auto& p : separated_peaks(s, num_sources, grid.min_separation_deg))
        found.push_back(refine_4d(Un, geometry, coarse, p.coordinates, grid));
    }
    for (const auto& c : found) out.sources.push_back(canonical_from_degrees(c[0], c[1], c[2], c[3]));
    return out;
  }

  const DoaStat stat = method == Method::Reduced2DDet ? DoaStat::Det : DoaStat::MinEig;
  const std::array<Axis, 2> coarse{theta_axis(grid.doa_step_deg), phi_axis(grid.doa_step_deg)};
  const auto spectrum = doa_spectrum(Un, geometry, coarse, grid.threads, stat);
  for (const auto& p : separated_peaks(spectrum, num_sources, grid.min_separation_deg)) {
    const DoaPoint doa =
        refine_doa(Un, geometry, coarse, {p.coordinates[0], p.coordinates[1]}, grid, stat);
    const auto [ga, et] = polarisation_search(Un, geometry, doa, grid);
    out.sources.push_back(canonical_from_degrees(doa.theta_deg, doa.phi_deg, ga, et));
  }
  return out;
}

EstimateSet estimate(const SnapshotMatrix& X, const ArrayGeometry& geometry, int num_sources,
                     Method method, const GridConfig& grid,
                     const std::vector<SourceParams>& hints) {
  return estimate(sample_covariance(X), geometry, num_sources, method, grid, hints);
}

}  // namespace poldoa
