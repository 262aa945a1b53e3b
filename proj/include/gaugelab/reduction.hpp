#pragma once

#include "gaugelab/hodge.hpp"
#include "gaugelab/models.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace gaugelab {

// ---------------------------------------------------------------------------
// On-shell charts: base + span(basis) lies in C (exactly for constraints linear in the chart variables).

struct OnShellChart {
  Vec base;
  Mat basis;  // phase_dim x k
  bool exact = true;
  Vec point(const Vec& y) const { return base + basis * y; }
};

inline OnShellChart onshell_chart(const Model& m, const Vec& A) {
  OnShellChart c;
  if (auto* ym = dynamic_cast<const YangMills*>(&m)) {
    const Subspace Z = ym->onshell_E_basis(A);
    c.base = Vec::Zero(m.phase_dim());
    c.base.head(ym->na()) = A;
    c.basis = Mat::Zero(m.phase_dim(), Z.dim());
    c.basis.bottomRows(ym->na()) = Z.basis();
    return c;
  }
  if (auto* th = dynamic_cast<const ThetaYM*>(&m)) {
    const Subspace Z = th->base().onshell_E_basis(A);
    c.base = Vec::Zero(m.phase_dim());
    c.base.head(th->na()) = A;
    c.base.tail(th->na()) = -th->theta() * th->shift(A);
    c.basis = Mat::Zero(m.phase_dim(), Z.dim());
    c.basis.bottomRows(th->na()) = Z.basis();
    return c;
  }
  if (dynamic_cast<const ChernSimons*>(&m)) {
    // For Abelian CS the constraint is linear in A; the chart is its kernel and A is ignored.
    require(m.algebra().abelian(), "an exact Chern-Simons chart is available for Abelian algebras only");
    const Subspace Z = Subspace::kernel(m.constraint_jacobian(Vec::Zero(m.phase_dim())));
    c.base = Vec::Zero(m.phase_dim());
    c.basis = Z.basis();
    return c;
  }
  throw InvalidInput("model has no on-shell chart");
}

inline Index connection_dim(const Model& m) { return m.mesh().ne() * m.d(); }

inline Vec sample_onshell(const Model& m, Rng& rng, double scaleA = 0.5, double scaleE = 1.0) {
  const OnShellChart c = onshell_chart(m, rng.normal_vec(connection_dim(m), scaleA));
  return c.point(rng.normal_vec(c.basis.cols(), scaleE));
}

// ---------------------------------------------------------------------------
// Flux annihilators.

// Boundary-supported gauge directions of the flux derivative: rows xi -> D(flux(xi)) at x.
inline Mat flux_variation_map(const Model& m, const Vec& x) {
  const Mat Jb = m.flux_jacobian(x);  // (nb d) x phase
  return Jb.transpose() * m.vertex_embedding(m.mesh().bverts).transpose();
}

inline Subspace annihilator_offshell(const Model& m, const std::vector<Vec>& points, double rel = 1e-10) {
  require(!points.empty(), "annihilator needs at least one sample point");
  Mat stacked(0, m.gauge_dim());
  for (const Vec& x : points) {
    const Mat r = flux_variation_map(m, x);
    Mat s(stacked.rows() + r.rows(), m.gauge_dim());
    s << stacked, r;
    stacked = s;
  }
  return Subspace::kernel(stacked, rel);
}

// Adjusted on-shell flux functionals realized by a chart (columns are gauge-space densities).
inline Mat onshell_flux_functionals(const Model& m, const OnShellChart& c, const ReferencePoint& ref) {
  const Mat E = m.vertex_embedding(m.mesh().bverts);
  Mat F(m.gauge_dim(), 1 + c.basis.cols());
  F.col(0) = E * (m.flux_density(c.base) - m.flux_density(ref.x));
  if (c.basis.cols()) {
    const Mat J = m.flux_jacobian(c.base);
    // Exact when the flux is affine along the chart (YM at fixed A, Abelian CS).
    F.rightCols(c.basis.cols()) = E * (J * c.basis);
  }
  return F;
}

struct OnShellAnnihilator {
  Subspace N;
  std::vector<Index> dims;  // dimension after each sample (stabilization record)
  Index stabilized_after = 0;
};

inline OnShellAnnihilator annihilator_onshell(const Model& m, const std::vector<Vec>& A_samples, double rel = 1e-10) {
  require(!A_samples.empty(), "annihilator_onshell needs at least one A sample");
  const ReferencePoint ref = m.reference();
  OnShellAnnihilator out;
  Mat rows(0, m.gauge_dim());
  for (std::size_t s = 0; s < A_samples.size(); ++s) {
    const Mat F = onshell_flux_functionals(m, onshell_chart(m, A_samples[s]), ref).transpose();
    Mat r(rows.rows() + F.rows(), m.gauge_dim());
    r << rows, F;
    rows = r;
    // Scale-aware kernel: rows are normalized so that one large flux cannot mask others.
    Mat nr = rows;
    for (Index i = 0; i < nr.rows(); ++i) {
      const double n = nr.row(i).norm();
      if (n > 0) nr.row(i) /= n;
    }
    out.N = Subspace::kernel(nr, rel);
    out.dims.push_back(out.N.dim());
    if (s == 0 || out.dims[s] != out.dims[s - 1]) out.stabilized_after = static_cast<Index>(s) + 1;
  }
  return out;
}

// Ideal property: [xi, n] stays in the subspace for random xi and all basis vectors n.
inline double ideal_residual(const LieAlgebra& g, const Subspace& N, const std::vector<Vec>& xis) {
  double worst = 0;
  for (const Vec& xi : xis)
    for (Index j = 0; j < N.dim(); ++j) {
      const Vec b = pointwise_bracket(g, xi, N.basis().col(j));
      const double n = b.norm();
      if (n > 0) worst = std::max(worst, N.distance(b) / std::max(n, xi.norm()));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Constraint momentum and justness.

inline double constraint_momentum_J0(const Model& m, const Vec& x, const Vec& xi0, const Subspace& N,
                                     double tol = 1e-8) {
  require(N.distance(xi0) <= tol * std::max(1.0, xi0.norm()), "xi0 lies outside the constraint ideal");
  const MomentumEval ev = m.momentum(x);
  return ev.H0(xi0) + adjusted_flux(m, x, xi0, m.reference());
}

struct JustnessReport {
  Index dim_ker_J = 0, dim_ker_C = 0;
  double gap = 1.0;              // subspace gap of the two kernels at the linearization point
  double onshell_max_J = 0;      // forward direction on sampled on-shell points
  double offshell_min_detect = 0;  // worst detection ratio for unit interior violations
  bool passed = false;
};

// J0(x) = 0 for all xi0 in N iff the constraint holds: compared as kernels of the linearizations at an
// on-shell point, checked forward on on-shell samples, and backward with unit-divergence probes.
inline JustnessReport justness_check(const Model& m, const Subspace& N, const std::vector<Vec>& onshell, double tol = 1e-8) {
  require(!onshell.empty(), "justness needs on-shell samples");
  JustnessReport r;
  const Vec& x0 = onshell.front();
  const Mat Dmu = m.density_jacobian(x0);
  const Subspace kJ = Subspace::kernel(N.basis().transpose() * Dmu);
  const Subspace kC = Subspace::kernel(m.constraint_jacobian(x0));
  r.dim_ker_J = kJ.dim();
  r.dim_ker_C = kC.dim();
  r.gap = subspace_gap(kJ, kC);
  for (const Vec& x : onshell)
    for (Index j = 0; j < N.dim(); ++j)
      r.onshell_max_J = std::max(r.onshell_max_J, std::abs(constraint_momentum_J0(m, x, N.basis().col(j), N)) / std::max(1.0, x.norm()));
  // Backward: perturb along a phase direction that violates exactly one interior constraint component.
  const Mat Cj = m.constraint_jacobian(x0);
  r.offshell_min_detect = std::numeric_limits<double>::infinity();
  if (Cj.rows() == 0) r.offshell_min_detect = 1.0;
  const Eigen::CompleteOrthogonalDecomposition<Mat> cod(Cj);
  for (Index k = 0; k < Cj.rows(); ++k) {
    const Vec probe = cod.solve(Vec::Unit(Cj.rows(), k));
    const Vec x = x0 + probe;
    double detect = 0;
    for (Index j = 0; j < N.dim(); ++j) detect = std::max(detect, std::abs(constraint_momentum_J0(m, x, N.basis().col(j), N)));
    r.offshell_min_detect = std::min(r.offshell_min_detect, detect / std::max(m.constraint(x).norm(), 1e-300));
  }
  r.passed = r.dim_ker_J == r.dim_ker_C && r.gap <= tol && r.onshell_max_J <= tol && r.offshell_min_detect > tol;
  return r;
}

// ---------------------------------------------------------------------------
// First-stage reduction.

struct KernelReport {
  Subspace TC, K, V0, VJ;
  Index dim_N = 0, dim_isotropy_in_N = 0;
  double angle = 1.0;   // sine of the largest principal angle between K and V0
  double rho_tangency = 0;  // distance of V0 generators from TC
  Index subideal_gap = 0;   // dim K - dim V_J
};

inline Subspace gauge_image(const Model& m, const Vec& x, const Mat& gens, double rel = 1e-10) {
  const Mat R = m.rho_matrix(x) * gens;
  return Subspace::span(R, rel);
}

inline KernelReport characteristic_kernel(const Model& m, const Vec& x, const Subspace& N, double tol = 1e-8) {
  require(m.constraint(x).norm() <= 1e-9 * std::max(1.0, x.norm()), "characteristic_kernel needs an on-shell point");
  KernelReport r;
  const Mat W = m.omega_matrix(x);
  r.TC = Subspace::kernel(m.constraint_jacobian(x));
  const Mat B = r.TC.basis().transpose() * W * r.TC.basis();
  const Subspace kB = Subspace::kernel(B);
  r.K = Subspace(m.phase_dim(), r.TC.basis() * kB.basis());
  r.V0 = gauge_image(m, x, N.basis());
  r.dim_N = N.dim();
  r.dim_isotropy_in_N = N.dim() - r.V0.dim();
  r.angle = subspace_gap(r.K, r.V0);
  r.rho_tangency = r.TC.contains_residual(m.rho_matrix(x) * N.basis());
  // Proper subideal: gauge parameters vanishing on the boundary and on one interior vertex.
  if (!m.interior().empty()) {
    std::vector<int> keep(m.interior().begin() + 1, m.interior().end());
    r.VJ = gauge_image(m, x, m.vertex_embedding(keep));
  } else {
    r.VJ = Subspace::zero(m.phase_dim());
  }
  r.subideal_gap = r.K.dim() - r.VJ.dim();
  (void)tol;
  return r;
}

struct ReducedForm {
  Mat Q;       // orthonormal complement of K inside TC (phase_dim x r)
  Mat omega;   // reduced form in the Q chart
  Vec spectrum;
  double antisymmetry = 0;
  double sigma_min = 0;
  Index dim = 0;
};

inline ReducedForm reduced_form(const Model& m, const Vec& x, const KernelReport& k) {
  ReducedForm r;
  const Mat W = m.omega_matrix(x);
  const Mat TCb = k.TC.basis();
  // Complement of K inside TC, expressed in TC coordinates.
  const Mat kc = TCb.transpose() * k.K.basis();
  const Subspace inner = Subspace::span(kc).complement();
  r.Q = TCb * inner.basis();
  r.omega = r.Q.transpose() * W * r.Q;
  r.dim = r.Q.cols();
  r.antisymmetry = (r.omega + r.omega.transpose()).cwiseAbs().maxCoeff();
  if (r.dim == 0) r.antisymmetry = 0;
  r.spectrum = singular_values(r.omega);
  r.sigma_min = r.spectrum.size() ? r.spectrum[r.spectrum.size() - 1] : 0.0;
  return r;
}

struct ResidualFlowReport {
  double flow = 0;        // |omega_red p - Q^T d h(xi)|
  double tangency = 0;    // distance of rho(xi) from TC
  double basic = 0;       // |D_{rho(n)} h(xi)| over n in N (flux constant along V0)
  double projected_norm = 0;
};

inline ResidualFlowReport residual_flux_and_flow(const Model& m, const Vec& x, const Vec& xi, const KernelReport& k,
                                                 const ReducedForm& red, const Subspace& N) {
  ResidualFlowReport r;
  const Vec rv = m.rho(x, xi);
  r.tangency = k.TC.distance(rv) / std::max(1.0, rv.norm());
  const Vec p = red.Q.transpose() * rv;
  r.projected_norm = p.norm();
  const Vec dh = flux_variation_map(m, x) * xi;  // phase covector of flux(xi)
  r.flow = (red.omega.transpose() * p - red.Q.transpose() * dh).cwiseAbs().maxCoeff();
  if (red.dim == 0) r.flow = 0;
  const Mat RN = m.rho_matrix(x) * N.basis();
  for (Index j = 0; j < RN.cols(); ++j) r.basic = std::max(r.basic, std::abs(dh.dot(RN.col(j))));
  return r;
}

// ---------------------------------------------------------------------------
// KKS brackets on boundary data.

// f3_b = g[g^{-1} f1_b, g^{-1} f2_b]; the cocycle contributes the central value K(g^{-1} f1, g^{-1} f2).
struct KKSResult {
  Vec f3;
  double central = 0;
};

inline KKSResult kks_bracket(const LieAlgebra& g, const Vec& f1, const Vec& f2, const Mat* K = nullptr) {
  require(f1.size() == f2.size() && f1.size() % g.dim() == 0, "mismatched boundary supports");
  const int d = g.dim();
  KKSResult r;
  r.f3.resize(f1.size());
  Vec x1(f1.size()), x2(f2.size());
  for (Index b = 0; b < f1.size() / d; ++b) {
    x1.segment(b * d, d) = g.sharp(f1.segment(b * d, d));
    x2.segment(b * d, d) = g.sharp(f2.segment(b * d, d));
    r.f3.segment(b * d, d) = g.flat(g.bracket(x1.segment(b * d, d), x2.segment(b * d, d)));
  }
  if (K) {
    require(K->rows() == f1.size() && K->cols() == f1.size(), "cocycle must act on the boundary parameter space");
    r.central = x1.dot(*K * x2);
  }
  return r;
}

// Lie-Poisson value {<.,xi>, <.,eta>}(alpha) = <alpha,[xi,eta]> + K(xi,eta).
inline double kks_value(const LieAlgebra& g, const Vec& alpha, const Vec& xi, const Vec& eta, const Mat* K = nullptr) {
  double v = alpha.dot(pointwise_bracket(g, xi, eta));
  if (K) v += xi.dot(*K * eta);
  return v;
}

// Cyclic sum of the bracket of linear functions: <alpha, Jac(xi,eta,zeta)> + dK(xi,eta,zeta).
inline double kks_jacobi(const LieAlgebra& g, const Vec& alpha, const Vec& a, const Vec& b, const Vec& c, const Mat* K = nullptr) {
  auto br = [&](const Vec& x, const Vec& y) { return pointwise_bracket(g, x, y); };
  double v = alpha.dot(br(br(a, b), c) + br(br(b, c), a) + br(br(c, a), b));
  if (K) v += br(a, b).dot(*K * c) + br(b, c).dot(*K * a) + br(c, a).dot(*K * b);
  return v;
}

// ---------------------------------------------------------------------------
// Affine orbits versus coadjoint orbits of the central extension.

struct ExtensionOrbitReport {
  double max_mismatch = 0;      // |affine orbit point - first components of Ad*(g^) (f,1)|
  double max_central_drift = 0;  // last component stays 1
  int samples = 0;
};

// Affine path: exp of the augmented generator [[ad*(x), K^T x],[0,0]] on (f,1). Extension path: the group element
// exp(x,0) in the extension's matrix representation acting by Ad* on (f,1).
inline ExtensionOrbitReport central_extension_orbit(const LieAlgebra& g, const AlgebraCocycle& K, const Vec& f,
                                                    const std::vector<Vec>& xs) {
  const LieAlgebra ext = central_extend(g, K);
  require(ext.has_rep(), "the extension has no matrix representation for group-level sampling");
  const int d = g.dim();
  ExtensionOrbitReport r;
  Vec f1(d + 1);
  f1 << f, 1.0;
  for (const Vec& x : xs) {
    Mat aug = Mat::Zero(d + 1, d + 1);
    aug.topLeftCorner(d, d) = g.coadjoint_matrix(x);
    aug.topRightCorner(d, 1) = K.K.transpose() * x;
    const Vec affine = aug.exp() * f1;
    Vec xh = Vec::Zero(d + 1);
    xh.head(d) = x;
    const Vec co = ext.Ad_star(ext.exp_action(xh)) * f1;
    const double s = std::max(1.0, f.norm());
    r.max_mismatch = std::max(r.max_mismatch, (affine.head(d) - co.head(d)).cwiseAbs().maxCoeff() / s);
    r.max_central_drift = std::max(r.max_central_drift, std::abs(co[d] - 1.0));
    ++r.samples;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Superselection sectors.

struct SectorLabel {
  std::vector<Vec> casimirs;  // per boundary vertex
  int q = 0;
};

inline SectorLabel sector_label_of_flux(const LieAlgebra& g, const Vec& fd) {
  SectorLabel s;
  const int d = g.dim();
  for (Index b = 0; b < fd.size() / d; ++b) s.casimirs.push_back(g.casimirs(fd.segment(b * d, d)));
  return s;
}

inline SectorLabel sector_label(const Model& m, const Vec& x) { return sector_label_of_flux(m.algebra(), m.flux_density(x)); }

inline double label_distance(const SectorLabel& a, const SectorLabel& b) {
  if (a.casimirs.size() != b.casimirs.size()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (std::size_t i = 0; i < a.casimirs.size(); ++i) {
    const double s = std::max({1.0, a.casimirs[i].cwiseAbs().maxCoeff(), b.casimirs[i].cwiseAbs().maxCoeff()});
    worst = std::max(worst, (a.casimirs[i] - b.casimirs[i]).cwiseAbs().maxCoeff() / s);
  }
  return worst;
}

struct SectorForm {
  Mat chart;   // columns (v, zeta) spanning T S_[f] x boundary orbit directions
  Mat omega;   // omega_[f] on the chart
  Index rank = 0;
  double basicness = 0;     // max |i_{u_xi} omega_[f]| over basis xi
  double antisymmetry = 0;
  Index nv = 0, nz = 0;
};

// Orbit form on boundary directions: Omega_f(z1, z2) = -sum_b <f_b, [z1_b, z2_b]>.
inline Mat orbit_form(const LieAlgebra& g, const Vec& f) {
  const int d = g.dim();
  const Index nb = f.size() / d;
  Mat O = Mat::Zero(f.size(), f.size());
  for (Index b = 0; b < nb; ++b)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        O(b * d + i, b * d + j) = -f.segment(b * d, d).dot(g.bracket(Vec::Unit(d, i), Vec::Unit(d, j)));
  return O;
}

// Tangent model of the coadjoint orbit: zeta -> ad*(zeta_b) f_b.
inline Mat orbit_tangent(const LieAlgebra& g, const Vec& f) {
  const int d = g.dim();
  const Index nb = f.size() / d;
  Mat T = Mat::Zero(f.size(), f.size());
  for (Index b = 0; b < nb; ++b)
    for (int i = 0; i < d; ++i) T.block(b * d, b * d + i, d, 1) = g.coadjoint(Vec::Unit(d, i), f.segment(b * d, d));
  return T;
}

inline SectorForm sector_form(const Model& m, const Vec& fbar, const Vec& x, double rel = 1e-10) {
  require(m.constraint(x).norm() <= 1e-9 * std::max(1.0, x.norm()), "sector_form needs an on-shell point");
  const LieAlgebra& g = m.algebra();
  const Vec f = m.flux_density(x);
  require(label_distance(sector_label_of_flux(g, fbar), sector_label_of_flux(g, f)) <= 1e-8,
          "reference flux is not on the orbit of the point's flux (Casimir mismatch)");
  SectorForm s;
  const Index P = m.phase_dim(), Z = f.size();
  s.nv = P;
  s.nz = Z;
  const Mat Cj = m.constraint_jacobian(x), Fj = m.flux_jacobian(x);
  const Mat T = orbit_tangent(g, f);
  Mat sys = Mat::Zero(Cj.rows() + Fj.rows(), P + Z);
  sys.topLeftCorner(Cj.rows(), P) = Cj;
  sys.bottomLeftCorner(Fj.rows(), P) = Fj;
  sys.bottomRightCorner(Fj.rows(), Z) = -T;
  s.chart = Subspace::kernel(sys, rel).basis();
  Mat Wb = Mat::Zero(P + Z, P + Z);
  Wb.topLeftCorner(P, P) = m.omega_matrix(x);
  Wb.bottomRightCorner(Z, Z) = -orbit_form(g, f);
  s.omega = s.chart.transpose() * Wb * s.chart;
  s.antisymmetry = s.omega.size() ? (s.omega + s.omega.transpose()).cwiseAbs().maxCoeff() : 0.0;
  s.rank = numerical_rank(singular_values(s.omega), rel);
  // Gauge generators on the chart: u_xi = (rho(xi), xi restricted to the boundary).
  const Mat R = m.rho_matrix(x);
  const Mat Eb = m.vertex_embedding(m.mesh().bverts);
  Mat U(P + Z, m.gauge_dim());
  U.topRows(P) = R;
  U.bottomRows(Z) = Eb.transpose();
  const Mat contr = U.transpose() * Wb * s.chart;
  s.basicness = contr.size() ? contr.cwiseAbs().maxCoeff() : 0.0;
  return s;
}

// Rotation parameter zeta with exp(ad*(zeta)) f = f2 for su(2)-type (3-dim, epsilon) algebras.
inline std::optional<Vec> connect_on_orbit(const LieAlgebra& g, const Vec& f, const Vec& f2, double tol = 1e-8) {
  if (g.abelian()) {
    if ((f - f2).cwiseAbs().maxCoeff() <= tol * std::max(1.0, f.norm())) return Vec::Zero(g.dim());
    return std::nullopt;
  }
  if (g.dim() != 3) return std::nullopt;
  if (std::abs(f.norm() - f2.norm()) > tol * std::max(1.0, f.norm())) return std::nullopt;
  if (f.norm() == 0.0) return Vec::Zero(3);
  const Eigen::Vector3d a = f.normalized(), b = f2.normalized();
  Eigen::Vector3d axis = a.cross(b);
  const double s = axis.norm(), c = a.dot(b);
  const double ang = std::atan2(s, c);
  if (s < 1e-14) {
    if (c > 0) return Vec::Zero(3);
    axis = a.unitOrthogonal();
  } else {
    axis /= s;
  }
  // exp(ad*(t n)) rotates about n; pick the sign that lands on f2.
  for (double sg : {1.0, -1.0}) {
    const Vec z = sg * ang * Vec(axis);
    if ((g.coadjoint_exp(z, f) - f2).norm() <= 1e-9 * std::max(1.0, f.norm())) return z;
  }
  return std::nullopt;
}

struct SquareReport {
  double max_label_mismatch = 0;   // label(boundary(phi g)) vs label(boundary(phi))
  double max_flux_mismatch = 0;    // boundary(phi g) vs Ad*(g|bdry) boundary(phi)
  double max_constraint = 0;       // phi g stays on shell
  int samples = 0;
  std::vector<SectorLabel> realized;  // distinct labels (the realized discrete B)
};

// Two-path evaluation of the boundary-restriction / orbit-label square on sampled (phi, g = exp(lambda)).
inline SquareReport superselection_square(const Model& m, const std::vector<Vec>& points, const std::vector<Vec>& lambdas,
                                          double label_tol = 1e-8) {
  require(points.size() == lambdas.size(), "one gauge parameter per sample");
  SquareReport r;
  const LieAlgebra& g = m.algebra();
  const int d = g.dim();
  const ReferencePoint ref = m.reference();
  for (std::size_t s = 0; s < points.size(); ++s) {
    const Vec& x = points[s];
    const Vec y = m.gauge_flow(x, lambdas[s], 1.0);
    const Vec fx = m.flux_density(x), fy = m.flux_density(y);
    Vec moved = m.restrict_rows(group_cocycle_c(m, lambdas[s], ref), m.mesh().bverts);
    for (Index b = 0; b < m.mesh().nb(); ++b)
      moved.segment(b * d, d) += g.coadjoint_exp(lambdas[s].segment(m.mesh().bverts[b] * d, d), fx.segment(b * d, d));
    const double scale = std::max(1.0, fx.norm());
    if (fy.size()) r.max_flux_mismatch = std::max(r.max_flux_mismatch, (fy - moved).cwiseAbs().maxCoeff() / scale);
    const SectorLabel ly = sector_label_of_flux(g, fy), lx = sector_label_of_flux(g, moved);
    r.max_label_mismatch = std::max(r.max_label_mismatch, label_distance(ly, lx));
    r.max_constraint = std::max(r.max_constraint, m.constraint(y).norm() / std::max(1.0, y.norm()));
    bool seen = false;
    for (const auto& l : r.realized)
      if (label_distance(l, ly) <= label_tol) seen = true;
    if (!seen) r.realized.push_back(ly);
    ++r.samples;
  }
  return r;
}

// Component index q: union-find over samples connected when their boundary fluxes are related by a pointwise
// coadjoint rotation (compact presets) or coincide (Abelian). Labels with distinct Casimirs never connect.
inline std::vector<int> sector_components(const LieAlgebra& g, const std::vector<Vec>& fluxes, double tol = 1e-8) {
  const int n = static_cast<int>(fluxes.size());
  detail::UnionFind uf(n);
  const int d = g.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      bool ok = fluxes[i].size() == fluxes[j].size();
      for (Index b = 0; ok && b < fluxes[i].size() / d; ++b)
        ok = connect_on_orbit(g, fluxes[i].segment(b * d, d), fluxes[j].segment(b * d, d), tol).has_value();
      if (ok) uf.unite(i, j);
    }
  int count = 0;
  return detail::label(uf, n, count);
}

}  // namespace gaugelab
