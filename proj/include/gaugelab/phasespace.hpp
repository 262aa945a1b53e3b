#pragma once

#include "gaugelab/complex.hpp"
#include "gaugelab/linalg.hpp"
#include "gaugelab/random.hpp"

#include <memory>

namespace gaugelab {

struct PhasePoint {
  Vec A;
  Vec E;  // empty for models without an electric field
};

struct TangentVector {
  Vec dA;
  Vec dE;
};

// Momentum data at a point: total(xi) = bulk . xi + flux . xi for every gauge parameter xi.
struct MomentumEval {
  Vec bulk;  // dual density per vertex, zero on boundary vertices
  Vec flux;  // dual density per vertex, supported on boundary vertices
  Vec bdry;  // per boundary cell, with flux(xi) = -sum_b s_b <bdry_b, xi_b>
  std::vector<double> sign;

  double H0(const Vec& xi) const { return bulk.dot(xi); }
  double h(const Vec& xi) const { return flux.dot(xi); }
};

struct ReferencePoint {
  Vec x;
};

// Common interface of the discrete locally Hamiltonian gauge spaces. Points and tangents are flat
// coordinate vectors; gauge parameters are algebra-valued vertex fields.
class Model {
 public:
  Model(std::string name, LieAlgebra g, CellComplex m)
      : name_(std::move(name)), g_(std::move(g)), mesh_(std::move(m)) {
    interior_ = mesh_.interior_vertices();
  }
  virtual ~Model() = default;

  const std::string& name() const { return name_; }
  const LieAlgebra& algebra() const { return g_; }
  const CellComplex& mesh() const { return mesh_; }
  int d() const { return g_.dim(); }
  Index gauge_dim() const { return mesh_.nv() * d(); }
  const std::vector<int>& interior() const { return interior_; }

  virtual Index phase_dim() const = 0;
  virtual bool has_E() const { return true; }
  // True when omega and rho do not depend on the point and the flow of rho is affine.
  virtual bool linear() const { return g_.abelian(); }

  virtual Vec pack(const PhasePoint& p) const {
    Vec x(phase_dim());
    require(p.A.size() + p.E.size() == phase_dim(), "phase point has wrong shape");
    x << p.A, p.E;
    return x;
  }
  virtual PhasePoint unpack(const Vec& x) const {
    require(x.size() == phase_dim(), "phase vector has wrong length");
    const Index na = mesh_.ne() * d();
    return {x.head(na), x.tail(x.size() - na)};
  }

  virtual Mat omega_matrix(const Vec& x) const = 0;
  virtual Vec rho(const Vec& x, const Vec& xi) const = 0;
  // Total momentum evaluated by its defining formula, independent of the density split.
  virtual double total(const Vec& x, const Vec& xi) const = 0;
  // Dual density mu with total(xi) = mu . xi.
  virtual Vec density(const Vec& x) const = 0;
  // Analytic Jacobian of density (gauge_dim x phase_dim).
  virtual Mat density_jacobian(const Vec& x) const = 0;
  // Boundary cell data for the green-pairing view of the flux.
  virtual Vec boundary_values(const Vec& x) const {
    const Vec mu = density(x);
    Vec b(mesh_.nb() * d());
    for (Index i = 0; i < mesh_.nb(); ++i) b.segment(i * d(), d()) = -mesh_.bsign[i] * mu.segment(mesh_.bverts[i] * d(), d());
    return b;
  }
  // Exact flow of the vector field rho(xi) for time t.
  virtual Vec gauge_flow(const Vec& x, const Vec& xi, double t) const = 0;
  virtual Vec random_point(Rng& rng, double scale) const { return rng.normal_vec(phase_dim(), scale); }
  virtual ReferencePoint reference() const { return {Vec::Zero(phase_dim())}; }

  Mat rho_matrix(const Vec& x) const {
    Mat R(phase_dim(), gauge_dim());
    for (Index i = 0; i < gauge_dim(); ++i) R.col(i) = rho(x, Vec::Unit(gauge_dim(), i));
    return R;
  }

  MomentumEval momentum(const Vec& x) const {
    MomentumEval m;
    const Vec mu = density(x);
    m.bulk = mu;
    m.flux = Vec::Zero(mu.size());
    for (int v : mesh_.bverts) {
      m.flux.segment(v * d(), d()) = mu.segment(v * d(), d());
      m.bulk.segment(v * d(), d()).setZero();
    }
    m.bdry = boundary_values(x);
    m.sign = mesh_.bsign;
    return m;
  }

  // Constraint residual: bulk density on interior vertices.
  Vec constraint(const Vec& x) const { return restrict_rows(density(x), interior_); }
  Mat constraint_jacobian(const Vec& x) const { return restrict_rows(density_jacobian(x), interior_); }
  // Flux density on boundary vertices.
  Vec flux_density(const Vec& x) const { return restrict_rows(density(x), mesh_.bverts); }
  Mat flux_jacobian(const Vec& x) const { return restrict_rows(density_jacobian(x), mesh_.bverts); }

  // Gauge-parameter selection matrices (vertex list -> full vertex field).
  Mat vertex_embedding(const std::vector<int>& verts) const {
    Mat P = Mat::Zero(gauge_dim(), static_cast<Index>(verts.size()) * d());
    for (std::size_t i = 0; i < verts.size(); ++i)
      P.block(verts[i] * d(), static_cast<Index>(i) * d(), d(), d()).setIdentity();
    return P;
  }

  template <class M>
  M restrict_rows(const M& m, const std::vector<int>& verts) const {
    M out(static_cast<Index>(verts.size()) * d(), m.cols());
    for (std::size_t i = 0; i < verts.size(); ++i) out.middleRows(static_cast<Index>(i) * d(), d()) = m.middleRows(verts[i] * d(), d());
    return out;
  }

 protected:
  std::string name_;
  LieAlgebra g_;
  CellComplex mesh_;
  std::vector<int> interior_;
};

inline double omega(const Model& m, const Vec& x, const Vec& v, const Vec& w) {
  require(v.size() == m.phase_dim() && w.size() == m.phase_dim(), "tangent vectors have wrong shape");
  return v.dot(m.omega_matrix(x) * w);
}

// omega(rho(xi), v) - D_v <H, xi>, with the derivative assembled analytically.
inline double flow_residual(const Model& m, const Vec& x, const Vec& xi, const Vec& v) {
  const Vec r = m.rho(x, xi);
  return r.dot(m.omega_matrix(x) * v) - xi.dot(m.density_jacobian(x) * v);
}

// Same identity as a covector: i_{rho(xi)} omega - dH(xi).
inline Vec flow_defect(const Model& m, const Vec& x, const Vec& xi) {
  return m.omega_matrix(x).transpose() * m.rho(x, xi) - m.density_jacobian(x).transpose() * xi;
}

struct DecompositionResidual {
  double total = 0, bulk = 0, flux = 0, residual = 0, scale = 0;
};

inline DecompositionResidual decomposition(const Model& m, const Vec& x, const Vec& xi) {
  const MomentumEval ev = m.momentum(x);
  DecompositionResidual r;
  r.total = m.total(x, xi);
  r.bulk = ev.H0(xi);
  r.flux = ev.h(xi);
  r.residual = std::abs(r.total - r.bulk - r.flux);
  r.scale = std::max({1.0, std::abs(r.total), ev.bulk.cwiseAbs().dot(xi.cwiseAbs()) + ev.flux.cwiseAbs().dot(xi.cwiseAbs())});
  return r;
}

// bulk(xi) must not see boundary values of xi.
inline double rank0_defect(const Model& m, const Vec& x, const Vec& xi) {
  Vec z = xi;
  for (int v : m.mesh().bverts) z.segment(v * m.d(), m.d()).setZero();
  const MomentumEval ev = m.momentum(x);
  return std::abs(ev.H0(xi) - ev.H0(z));
}

inline double adjusted_flux(const Model& m, const Vec& x, const Vec& xi, const ReferencePoint& ref) {
  return m.momentum(x).h(xi) - m.momentum(ref.x).h(xi);
}

inline Vec pointwise_bracket(const LieAlgebra& g, const Vec& xi, const Vec& eta) {
  const int d = g.dim();
  Vec out(xi.size());
  for (Index v = 0; v < xi.size() / d; ++v) out.segment(v * d, d) = g.bracket(xi.segment(v * d, d), eta.segment(v * d, d));
  return out;
}

inline Vec pointwise_coadjoint(const LieAlgebra& g, const Vec& xi, const Vec& f) {
  const int d = g.dim();
  Vec out(f.size());
  for (Index v = 0; v < f.size() / d; ++v) out.segment(v * d, d) = g.coadjoint(xi.segment(v * d, d), f.segment(v * d, d));
  return out;
}

// <L_{rho(xi)} h_bullet, eta> - <h_bullet, [xi, eta]> evaluated at x.
inline double algebra_cocycle_at(const Model& m, const Vec& x, const Vec& xi, const Vec& eta, const ReferencePoint& ref) {
  const Mat J = m.density_jacobian(x);
  Vec flux_eta = Vec::Zero(m.gauge_dim());
  for (int v : m.mesh().bverts) flux_eta.segment(v * m.d(), m.d()) = eta.segment(v * m.d(), m.d());
  const double lie = flux_eta.dot(J * m.rho(x, xi));
  return lie - adjusted_flux(m, x, pointwise_bracket(m.algebra(), xi, eta), ref);
}

struct CocycleEval {
  double value = 0;
  double spread = 0;  // max deviation over the sample points
  bool weakly_equivariant = true;
};

// k_bullet(xi, eta) at the reference point, with phi-independence checked on sample points.
inline CocycleEval algebra_cocycle_k(const Model& m, const Vec& xi, const Vec& eta, const ReferencePoint& ref,
                                     const std::vector<Vec>& samples = {}, double tol = 1e-10) {
  CocycleEval r;
  r.value = algebra_cocycle_at(m, ref.x, xi, eta, ref);
  const double scale = std::max(1.0, std::abs(r.value));
  for (const Vec& x : samples) r.spread = std::max(r.spread, std::abs(algebra_cocycle_at(m, x, xi, eta, ref) - r.value));
  r.weakly_equivariant = r.spread <= tol * scale;
  return r;
}

// c_bullet(g) for g = exp(lambda): xi -> adjusted flux of the transformed reference point, as a density.
inline Vec group_cocycle_c(const Model& m, const Vec& lambda, const ReferencePoint& ref) {
  const Vec moved = m.gauge_flow(ref.x, lambda, 1.0);
  return m.momentum(moved).flux - m.momentum(ref.x).flux;
}

// Directional derivative of the bulk density along rho(eta), minus ad*(eta) acting on it.
inline Vec h0_equivariance_defect(const Model& m, const Vec& x, const Vec& eta) {
  const Vec lie = m.density_jacobian(x) * m.rho(x, eta);
  const Vec act = pointwise_coadjoint(m.algebra(), eta, m.density(x));
  return m.restrict_rows(Vec(lie - act), m.interior());
}

// D_{rho(xi)} of the constraint residual.
inline Vec orbit_tangency_defect(const Model& m, const Vec& x, const Vec& xi) {
  return m.constraint_jacobian(x) * m.rho(x, xi);
}

}  // namespace gaugelab
