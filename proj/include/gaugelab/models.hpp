#pragma once

#include "gaugelab/phasespace.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace gaugelab {

// ---------------------------------------------------------------------------
// Shared discrete geometry of connections.

// Edge value oriented along a -> b for an edge stored with sign s.
inline Vec oriented(const Vec& A, int e, double s, int d) { return s * A.segment(e * d, d); }

// F_f = (dA)_f + 1/2 [A_01, A_12] with face-oriented edge values.
inline Vec curvature(const LieAlgebra& g, const CellComplex& m, const Vec& A) {
  const int d = g.dim();
  require(m.dim == 2, "curvature needs a 2D complex");
  Vec F = apply_blockwise(m.D1, A, d);
  if (g.abelian()) return F;
  for (Index f = 0; f < m.nf(); ++f) {
    const auto& fe = m.face_edges[f];
    const auto& fs = m.face_signs[f];
    F.segment(f * d, d) += 0.5 * g.bracket(oriented(A, fe[0], fs[0], d), oriented(A, fe[1], fs[1], d));
  }
  return F;
}

inline Mat curvature_jacobian(const LieAlgebra& g, const CellComplex& m, const Vec& A) {
  const int d = g.dim();
  Mat J = Mat(kron_identity(m.D1, d));
  if (g.abelian()) return J;
  for (Index f = 0; f < m.nf(); ++f) {
    const auto& fe = m.face_edges[f];
    const auto& fs = m.face_signs[f];
    const Vec a01 = oriented(A, fe[0], fs[0], d), a12 = oriented(A, fe[1], fs[1], d);
    J.block(f * d, fe[0] * d, d, d) += -0.5 * fs[0] * g.ad(a12);
    J.block(f * d, fe[1] * d, d, d) += 0.5 * fs[1] * g.ad(a01);
  }
  return J;
}

// Exact flow of dA_e/dt = (d xi)_e + [A_e, avg xi_e] for time t.
inline Vec connection_flow(const LieAlgebra& g, const CellComplex& m, const Vec& A, const Vec& xi, double t) {
  const int d = g.dim();
  const Vec dxi = apply_blockwise(m.D0, xi, d);
  if (g.abelian()) return A + t * dxi;
  const Vec xb = edge_average(m, xi, d);
  Vec out(A.size());
  Mat aug = Mat::Zero(d + 1, d + 1);
  for (Index e = 0; e < m.ne(); ++e) {
    aug.topLeftCorner(d, d) = -t * g.ad(xb.segment(e * d, d));
    aug.topRightCorner(d, 1) = t * dxi.segment(e * d, d);
    const Mat ex = aug.exp();
    out.segment(e * d, d) = ex.topLeftCorner(d, d) * A.segment(e * d, d) + ex.topRightCorner(d, 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Yang-Mills (Maxwell for Abelian algebras): phase point (A, E) on edges.

class YangMills : public Model {
 public:
  YangMills(std::string name, LieAlgebra g, CellComplex m) : Model(std::move(name), std::move(g), std::move(m)) {}

  Index phase_dim() const override { return 2 * na(); }
  Index na() const { return mesh_.ne() * d(); }

  Mat omega_matrix(const Vec&) const override {
    Mat W = Mat::Zero(phase_dim(), phase_dim());
    W.topRightCorner(na(), na()) = -Mat::Identity(na(), na());
    W.bottomLeftCorner(na(), na()) = Mat::Identity(na(), na());
    return W;
  }

  Vec rho(const Vec& x, const Vec& xi) const override {
    require(xi.size() == gauge_dim(), "gauge parameter has wrong shape");
    const Vec A = x.head(na()), E = x.tail(na());
    Vec out(phase_dim());
    out.head(na()) = d_twisted(g_, mesh_, A, xi);
    if (g_.abelian()) {
      out.tail(na()).setZero();
    } else {
      const Vec xb = edge_average(mesh_, xi, d());
      for (Index e = 0; e < mesh_.ne(); ++e)
        out.segment(na() + e * d(), d()) = g_.coadjoint(xb.segment(e * d(), d()), E.segment(e * d(), d()));
    }
    return out;
  }

  double total(const Vec& x, const Vec& xi) const override {
    return -x.tail(na()).dot(d_twisted(g_, mesh_, x.head(na()), xi));
  }

  Vec density(const Vec& x) const override { return -divergence(g_, mesh_, x.head(na()), x.tail(na())); }

  Mat density_jacobian(const Vec& x) const override {
    const Vec A = x.head(na()), E = x.tail(na());
    Mat J = Mat::Zero(gauge_dim(), phase_dim());
    J.rightCols(na()) = -Mat(d_twisted_matrix(g_, mesh_, A)).transpose();
    if (!g_.abelian()) {
      for (Index e = 0; e < mesh_.ne(); ++e) {
        Mat M(d(), d());
        for (int i = 0; i < d(); ++i) M.col(i) = g_.coadjoint(Vec::Unit(d(), i), E.segment(e * d(), d()));
        for (int end = 0; end < 2; ++end) J.block(mesh_.edges[e][end] * d(), e * d(), d(), d()) += -0.5 * M;
      }
    }
    return J;
  }

  Vec gauge_flow(const Vec& x, const Vec& xi, double t) const override {
    Vec out(phase_dim());
    out.head(na()) = connection_flow(g_, mesh_, x.head(na()), xi, t);
    out.tail(na()) = x.tail(na());
    if (!g_.abelian()) {
      const Vec xb = edge_average(mesh_, xi, d());
      for (Index e = 0; e < mesh_.ne(); ++e) {
        const Mat ex = (t * g_.coadjoint_matrix(xb.segment(e * d(), d()))).exp();
        out.segment(na() + e * d(), d()) = ex * x.segment(na() + e * d(), d());
      }
    }
    return out;
  }

  // Basis of the electric fields solving the constraint at fixed A (linear in E).
  Subspace onshell_E_basis(const Vec& A, double rel = 1e-10) const {
    const Mat dAt = Mat(d_twisted_matrix(g_, mesh_, A)).transpose();
    return Subspace::kernel(restrict_rows(dAt, interior_), rel);
  }

  Vec sample_onshell(Rng& rng, double scaleA, double scaleE) const {
    const Vec A = rng.normal_vec(na(), scaleA);
    const Subspace Z = onshell_E_basis(A);
    Vec x(phase_dim());
    x << A, Z.basis() * rng.normal_vec(Z.dim(), scaleE);
    return x;
  }
};

// ---------------------------------------------------------------------------
// theta-YM: the YM structure pulled back along Phi(A, E) = (A, E + theta B(A)),
// B(A)_e = g(D1^T F(A))_e on interior edges.

class ThetaYM : public Model {
 public:
  ThetaYM(std::string name, LieAlgebra g, CellComplex m, double theta)
      : Model(std::move(name), g, m), ym_("ym", std::move(g), std::move(m)), theta_(theta) {
    require(std::isfinite(theta), "theta must be finite");
  }

  double theta() const { return theta_; }
  const YangMills& base() const { return ym_; }
  Index phase_dim() const override { return ym_.phase_dim(); }
  Index na() const { return ym_.na(); }

  Vec shift(const Vec& A) const {
    if (mesh_.dim < 2) return Vec::Zero(na());
    const Vec F = curvature(g_, mesh_, A);
    Vec GF(F.size());
    for (Index f = 0; f < mesh_.nf(); ++f) GF.segment(f * d(), d()) = g_.flat(F.segment(f * d(), d()));
    Vec B = apply_blockwise_transpose(mesh_.D1, GF, d());
    for (int e : mesh_.bedges) B.segment(e * d(), d()).setZero();
    return B;
  }

  Mat shift_jacobian(const Vec& A) const {
    if (mesh_.dim < 2) return Mat::Zero(na(), na());
    Mat GDF = curvature_jacobian(g_, mesh_, A);
    for (Index f = 0; f < mesh_.nf(); ++f) GDF.middleRows(f * d(), d()) = g_.pairing() * GDF.middleRows(f * d(), d());
    Mat J = Mat(kron_identity(mesh_.D1, d())).transpose() * GDF;
    for (int e : mesh_.bedges) J.middleRows(e * d(), d()).setZero();
    return J;
  }

  Vec phi(const Vec& x) const {
    if (theta_ == 0.0) return x;
    Vec y = x;
    y.tail(na()) += theta_ * shift(x.head(na()));
    return y;
  }
  Vec phi_inverse(const Vec& y) const {
    if (theta_ == 0.0) return y;
    Vec x = y;
    x.tail(na()) -= theta_ * shift(y.head(na()));
    return x;
  }
  Mat phi_jacobian(const Vec& x) const {
    Mat J = Mat::Identity(phase_dim(), phase_dim());
    if (theta_ != 0.0) J.bottomLeftCorner(na(), na()) = theta_ * shift_jacobian(x.head(na()));
    return J;
  }

  Mat omega_matrix(const Vec& x) const override {
    if (theta_ == 0.0) return ym_.omega_matrix(x);
    const Mat D = phi_jacobian(x);
    return D.transpose() * ym_.omega_matrix(phi(x)) * D;
  }
  Vec rho(const Vec& x, const Vec& xi) const override {
    if (theta_ == 0.0) return ym_.rho(x, xi);
    Vec r = ym_.rho(phi(x), xi);
    r.tail(na()) -= theta_ * shift_jacobian(x.head(na())) * r.head(na());
    return r;
  }
  double total(const Vec& x, const Vec& xi) const override { return ym_.total(phi(x), xi); }
  Vec density(const Vec& x) const override { return ym_.density(phi(x)); }
  Mat density_jacobian(const Vec& x) const override {
    if (theta_ == 0.0) return ym_.density_jacobian(x);
    return ym_.density_jacobian(phi(x)) * phi_jacobian(x);
  }
  Vec gauge_flow(const Vec& x, const Vec& xi, double t) const override {
    return phi_inverse(ym_.gauge_flow(phi(x), xi, t));
  }

 private:
  YangMills ym_;
  double theta_;
};

// ---------------------------------------------------------------------------
// Chern-Simons on a triangulated surface: phase point A on edges.
// omega(a, b) = -1/2 sum_f [g(a01, b12) - g(b01, a12)],
// H(xi) = -sum_{boundary e} o_e g(A_e, avg xi) + 1/2 sum_f g(F_f, xi_v0 + xi_v2).

class ChernSimons : public Model {
 public:
  ChernSimons(std::string name, LieAlgebra g, CellComplex m) : Model(std::move(name), std::move(g), std::move(m)) {
    require(mesh_.dim == 2, "Chern-Simons needs a 2D complex");
  }

  Index phase_dim() const override { return mesh_.ne() * d(); }
  bool has_E() const override { return false; }
  Vec pack(const PhasePoint& p) const override {
    require(p.A.size() == phase_dim() && p.E.size() == 0, "Chern-Simons phase point is A alone");
    return p.A;
  }
  PhasePoint unpack(const Vec& x) const override {
    require(x.size() == phase_dim(), "phase vector has wrong length");
    return {x, Vec()};
  }

  Mat omega_matrix(const Vec&) const override {
    Mat W = Mat::Zero(phase_dim(), phase_dim());
    const Mat& G = g_.pairing();
    for (Index f = 0; f < mesh_.nf(); ++f) {
      const auto& fe = mesh_.face_edges[f];
      const double s = mesh_.face_signs[f][0] * mesh_.face_signs[f][1];
      W.block(fe[0] * d(), fe[1] * d(), d(), d()) += -0.5 * s * G;
      W.block(fe[1] * d(), fe[0] * d(), d(), d()) += 0.5 * s * G;
    }
    return W;
  }

  Vec rho(const Vec& x, const Vec& xi) const override { return d_twisted(g_, mesh_, x, xi); }

  double total(const Vec& x, const Vec& xi) const override {
    const Vec xb = edge_average(mesh_, xi, d());
    double h = 0.0;
    for (std::size_t i = 0; i < mesh_.bedges.size(); ++i) {
      const int e = mesh_.bedges[i];
      h -= mesh_.bedge_sign[i] * g_.pair(x.segment(e * d(), d()), xb.segment(e * d(), d()));
    }
    const Vec F = curvature(g_, mesh_, x);
    for (Index f = 0; f < mesh_.nf(); ++f) {
      const auto& v = mesh_.faces[f];
      h += 0.5 * g_.pair(F.segment(f * d(), d()), xi.segment(v[0] * d(), d()) + xi.segment(v[2] * d(), d()));
    }
    return h;
  }

  Vec density(const Vec& x) const override {
    Vec mu = Vec::Zero(gauge_dim());
    const Vec F = curvature(g_, mesh_, x);
    for (Index f = 0; f < mesh_.nf(); ++f) {
      const Vec gF = 0.5 * g_.flat(F.segment(f * d(), d()));
      mu.segment(mesh_.faces[f][0] * d(), d()) += gF;
      mu.segment(mesh_.faces[f][2] * d(), d()) += gF;
    }
    for (std::size_t i = 0; i < mesh_.bedges.size(); ++i) {
      const int e = mesh_.bedges[i];
      const Vec w = -0.5 * mesh_.bedge_sign[i] * g_.flat(x.segment(e * d(), d()));
      mu.segment(mesh_.edges[e][0] * d(), d()) += w;
      mu.segment(mesh_.edges[e][1] * d(), d()) += w;
    }
    return mu;
  }

  Mat density_jacobian(const Vec& x) const override {
    Mat J = Mat::Zero(gauge_dim(), phase_dim());
    const Mat DF = curvature_jacobian(g_, mesh_, x);
    for (Index f = 0; f < mesh_.nf(); ++f) {
      const Mat gDF = 0.5 * g_.pairing() * DF.middleRows(f * d(), d());
      J.middleRows(mesh_.faces[f][0] * d(), d()) += gDF;
      J.middleRows(mesh_.faces[f][2] * d(), d()) += gDF;
    }
    for (std::size_t i = 0; i < mesh_.bedges.size(); ++i) {
      const int e = mesh_.bedges[i];
      for (int end = 0; end < 2; ++end)
        J.block(mesh_.edges[e][end] * d(), e * d(), d(), d()) += -0.5 * mesh_.bedge_sign[i] * g_.pairing();
    }
    return J;
  }

  Vec gauge_flow(const Vec& x, const Vec& xi, double t) const override { return connection_flow(g_, mesh_, x, xi, t); }

  // Flat connections A = d lambda (Abelian) spanning the flat locus.
  Mat flat_chart() const {
    require(g_.abelian(), "the linear flat chart is Abelian only");
    return Mat(kron_identity(mesh_.D0, d()));
  }
};

// ---------------------------------------------------------------------------
// Chart of flat connections from a vertex group field: A_e = log(u_tail^{-1} u_head).

struct ChartResult {
  Vec A;
  bool accepted = true;
  double max_angle = 0.0;
  double curvature = 0.0;  // max per-face curvature norm
};

inline ChartResult cs_onshell_chart(const LieAlgebra& g, const CellComplex& m, const std::vector<GroupElement>& u) {
  require(g.has_rep(), "the flat chart needs a matrix group preset");
  require(static_cast<Index>(u.size()) == m.nv(), "one group element per vertex");
  const int d = g.dim();
  ChartResult r;
  r.A = Vec::Zero(m.ne() * d);
  for (Index e = 0; e < m.ne(); ++e) {
    const Mat U = u[m.edges[e][0]].M.inverse() * u[m.edges[e][1]].M;
    const Mat L = U.log();
    const Vec a = g.from_matrix(L);
    const double ang = std::sqrt(std::max(0.0, g.pair(a, a)));
    r.max_angle = std::max(r.max_angle, ang);
    if (!(ang < std::numbers::pi - 1e-6) || !a.allFinite()) r.accepted = false;
    r.A.segment(e * d, d) = a;
  }
  if (m.dim == 2) {
    const Vec F = curvature(g, m, r.A);
    for (Index f = 0; f < m.nf(); ++f) r.curvature = std::max(r.curvature, F.segment(f * d, d).norm());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Model specification and construction.

struct MeshSpec {
  std::string builder = "interval";
  int n = 4;
};

struct ModelSpec {
  std::string name = "maxwell";
  std::string algebra;  // empty: model default
  MeshSpec mesh;
  double theta = 0.0;

  std::string algebra_name() const {
    if (!algebra.empty()) return algebra;
    if (name == "ym_su2" || name == "bf_corner") return "su2";
    return "u1";
  }
  bool corner_only() const { return name == "bf_corner"; }
};

inline std::unique_ptr<Model> instantiate(const ModelSpec& s) {
  static const std::vector<std::string> known{"maxwell", "ym_su2", "chern_simons_disk", "theta_ym", "bf_corner"};
  require(std::find(known.begin(), known.end(), s.name) != known.end(), "unknown model '" + s.name + "'");
  require(std::isfinite(s.theta), "theta must be finite");
  require(s.name == "theta_ym" || s.theta == 0.0, "theta is only meaningful for theta_ym");
  require(!s.corner_only(), "bf_corner is a corner-only model; use the corner checks");
  LieAlgebra g = presets::by_name(s.algebra_name());
  require(s.name != "maxwell" || g.abelian(), "maxwell needs an Abelian algebra");
  CellComplex m = mesh::by_name(s.mesh.builder, s.mesh.n);
  const std::string label = s.name + "/" + g.name() + "/" + m.name;
  if (s.name == "chern_simons_disk") {
    require(m.dim == 2, "chern_simons_disk needs a 2D mesh");
    return std::make_unique<ChernSimons>(label, std::move(g), std::move(m));
  }
  if (s.name == "theta_ym") return std::make_unique<ThetaYM>(label, std::move(g), std::move(m), s.theta);
  return std::make_unique<YangMills>(label, std::move(g), std::move(m));
}

// ---------------------------------------------------------------------------
// Isotropy and the Euler-Lagrange locus.

inline Subspace isotropy(const Model& m, const Vec& x, double rel = 1e-10) {
  const Mat R = m.rho_matrix(x);
  // Absolute floor so that a vanishing action at A = 0, E = 0 still reports its true kernel.
  const SVD s = svd(R, Eigen::ComputeFullV);
  const double cut = std::max(rel * (s.sv.size() ? s.sv[0] : 0.0), 1e-12);
  Index r = 0;
  while (r < s.sv.size() && s.sv[r] > cut) ++r;
  return Subspace(R.cols(), s.V.rightCols(R.cols() - r));
}

struct ElLocusReport {
  bool onshell = false;
  bool isotropic = false;      // rho(xi) = 0
  bool critical = false;       // dH(xi) = 0 and on shell
  bool agree = false;
  double rho_norm = 0, dH_norm = 0, constraint_norm = 0;
};

inline ElLocusReport el_locus_check(const Model& m, const Vec& x, const Vec& xi, double tol = 1e-10) {
  ElLocusReport r;
  r.constraint_norm = m.constraint(x).norm();
  r.rho_norm = m.rho(x, xi).norm();
  r.dH_norm = (m.density_jacobian(x).transpose() * xi).norm();
  const double scale = std::max(1.0, xi.norm() * std::max(1.0, x.norm()));
  r.onshell = r.constraint_norm <= tol * std::max(1.0, x.norm());
  r.isotropic = r.rho_norm <= tol * scale;
  r.critical = r.onshell && r.dH_norm <= tol * scale;
  r.agree = (r.onshell && r.isotropic) == r.critical;
  return r;
}

// ---------------------------------------------------------------------------
// theta-invariance of the constraint and the induced flux shift.

struct ThetaReport {
  double constraint_difference = 0;  // |C(A, E^theta) - C(A, E)|_inf
  double flux_shift_error = 0;       // computed shift vs boundary-face oracle
  double flux_shift_norm = 0;
  double label_shift_error = 0;
  bool abelian = true;
};

inline ThetaReport theta_invariance_check(const ThetaYM& model, const Vec& x) {
  const YangMills& ym = model.base();
  const LieAlgebra& g = model.algebra();
  const CellComplex& m = model.mesh();
  const int d = g.dim();
  ThetaReport r;
  r.abelian = g.abelian();
  const Vec y = model.phi(x);
  r.constraint_difference = (ym.constraint(y) - ym.constraint(x)).cwiseAbs().maxCoeff();
  // Oracle: each boundary vertex collects theta g F over the boundary edges it touches, via their unique face.
  Vec oracle = Vec::Zero(m.nb() * d);
  if (m.dim == 2) {
    const Vec F = curvature(g, m, x.head(ym.na()));
    for (std::size_t i = 0; i < m.bedges.size(); ++i) {
      const int e = m.bedges[i];
      const int f = m.bedge_face[i];
      const double inc = m.D1.coeff(f, e);
      for (int end = 0; end < 2; ++end) {
        const int v = m.edges[e][end];
        const double dv = end == 1 ? 1.0 : -1.0;
        oracle.segment(m.bindex[v] * d, d) += model.theta() * dv * inc * g.flat(F.segment(f * d, d));
      }
    }
  }
  const Vec shift = ym.flux_density(y) - ym.flux_density(x);
  r.flux_shift_norm = shift.norm();
  r.flux_shift_error = r.abelian ? (shift - oracle).cwiseAbs().maxCoeff() : 0.0;
  if (r.abelian) {
    // Abelian Casimirs are the flux components themselves.
    Vec lx(m.nb() * d), ly(m.nb() * d);
    const Vec fx = ym.flux_density(x), fy = ym.flux_density(y);
    for (Index b = 0; b < m.nb(); ++b) {
      lx.segment(b * d, d) = g.casimirs(fx.segment(b * d, d));
      ly.segment(b * d, d) = g.casimirs(fy.segment(b * d, d));
    }
    r.label_shift_error = (ly - lx - oracle).cwiseAbs().maxCoeff();
  }
  return r;
}

}  // namespace gaugelab
