#pragma once

#include "gaugelab/graded.hpp"
#include "gaugelab/reduction.hpp"

#include <array>
#include <numbers>

namespace gaugelab {

// Off-shell corner data: P_d = boundary dual values, G_d = boundary gauge values, h_d(f, xi) = sum_b f_b . xi_b.
struct CornerSpace {
  LieAlgebra g;
  Index ncells = 0;
  Mat k;                      // cocycle on boundary parameters
  Index dim_P = 0, dim_G = 0;
  double restriction_gap = 0;   // ker of the vertical block vs {xi : xi|bdry = 0}
  double pullback_defect = 0;   // |h_bullet - pi^* h_d| on samples
  double k_spread = 0;          // phi-dependence of k over the samples
  bool weakly_equivariant = true;

  int n() const { return static_cast<int>(ncells * g.dim()); }
};

inline CornerSpace build_corner(const Model& m, Rng& rng, int samples = 3, double rel = 1e-10) {
  CornerSpace cs{m.algebra(), m.mesh().nb(), Mat::Zero(m.mesh().nb() * m.d(), m.mesh().nb() * m.d())};
  const ReferencePoint ref = m.reference();
  std::vector<Vec> pts;
  for (int s = 0; s < samples; ++s) pts.push_back(m.random_point(rng, 0.5));
  // The pre-corner form pairs D flux (horizontal) with gauge directions (vertical); its kernel is
  // (ker M^T) x (ker M) for M = D flux, so the quotient factors into P_d x G_d.
  const Subspace kerG = annihilator_offshell(m, pts, rel);
  const Mat M = flux_variation_map(m, pts.front());
  const Subspace kerP = Subspace::kernel(M.transpose(), rel);
  cs.dim_G = m.gauge_dim() - kerG.dim();
  cs.dim_P = m.phase_dim() - kerP.dim();
  const Subspace vanish = Subspace::span(m.vertex_embedding(m.interior()));
  cs.restriction_gap = subspace_gap(kerG, vanish);
  // Pullback identity on samples.
  const Mat Eb = m.vertex_embedding(m.mesh().bverts);
  for (const Vec& x : pts) {
    const Vec xi = rng.normal_vec(m.gauge_dim());
    const Vec f = m.flux_density(x) - m.flux_density(ref.x);
    const double hd = f.dot(Eb.transpose() * xi);
    cs.pullback_defect = std::max(cs.pullback_defect, std::abs(adjusted_flux(m, x, xi, ref) - hd));
  }
  // Cocycle on boundary parameters, evaluated at the reference point.
  const Index n = cs.n();
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b) {
      const CocycleEval ce = algebra_cocycle_k(m, Eb.col(a), Eb.col(b), ref, pts);
      cs.k(a, b) = ce.value;
      cs.k(b, a) = -ce.value;
      cs.k_spread = std::max(cs.k_spread, ce.spread);
      if (!ce.weakly_equivariant) cs.weakly_equivariant = false;
    }
  return cs;
}

// S_d = 1/2 <x,[c,c]> + 1/2 k(c,c) on n = ncells*d coordinate/ghost pairs.
inline GradedFunction master_function(const LieAlgebra& g, Index ncells, const Mat& k) {
  const int d = g.dim();
  const int n = static_cast<int>(ncells * d);
  GradedFunction S(n);
  for (Index b = 0; b < ncells; ++b)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int kk = 0; kk < d; ++kk) {
          const double s = g.sc(kk, i, j);
          if (s != 0.0) S.add(Monomial{{static_cast<int>(b * d + kk)}, {static_cast<int>(b * d + i), static_cast<int>(b * d + j)}}, 0.5 * s);
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (k(a, b) != 0.0) S.add(Monomial{{}, {a, b}}, 0.5 * k(a, b));
  return S;
}

inline GradedFunction master_function(const CornerSpace& cs) { return master_function(cs.g, cs.ncells, cs.k); }

inline GradedFunction poisson_bivector(const GradedFunction& S, const GradedFunction& f, const GradedFunction& g) {
  int df = 0, dg = 0;
  require(f.homogeneous_ghost_degree(&df) && df == 0 && g.homogeneous_ghost_degree(&dg) && dg == 0,
          "bivector arguments must be ghost-free polynomials");
  return odd_bracket(odd_bracket(S, g), f);
}

// <x,[df,dg]> + k(df,dg) assembled directly from gradients.
inline GradedFunction poisson_direct(const LieAlgebra& g, Index ncells, const Mat& k, const GradedFunction& f,
                                     const GradedFunction& h) {
  const int d = g.dim();
  const int n = static_cast<int>(ncells * d);
  GradedFunction r(n);
  std::vector<GradedFunction> df, dh;
  for (int a = 0; a < n; ++a) {
    df.push_back(f.dx(a));
    dh.push_back(h.dx(a));
  }
  for (Index b = 0; b < ncells; ++b)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int kk = 0; kk < d; ++kk) {
          const double s = g.sc(kk, i, j);
          if (s == 0.0) continue;
          const int ia = static_cast<int>(b * d + i), ja = static_cast<int>(b * d + j);
          if (df[ia].empty() || dh[ja].empty()) continue;
          r += GradedFunction::x(n, static_cast<int>(b * d + kk)) * df[ia] * dh[ja] * s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (k(a, b) != 0.0 && !df[a].empty() && !dh[b].empty()) r += df[a] * dh[b] * k(a, b);
  return r;
}

struct CMEResult {
  GradedFunction S;
  GradedFunction residual;  // {S,S}, ghost degree 3
  double max_coefficient = 0;
};

inline CMEResult master_function_and_cme(const CornerSpace& cs) {
  CMEResult r;
  r.S = master_function(cs);
  r.residual = odd_bracket(r.S, r.S);
  r.max_coefficient = r.residual.max_abs();
  return r;
}

struct BRSTReport {
  double nilpotency = 0;     // max coefficient of Q^2 over all generators
  double hamiltonian = 0;    // max coefficient of Q(gen) - expected image
  int generators = 0;
};

// Q = {S, .}; expected Q(c) = -1/2 [c,c], Q(x) = ad*(c) x + k(c, .).
inline BRSTReport brst(const CornerSpace& cs) {
  BRSTReport r;
  const GradedFunction S = master_function(cs);
  const LieAlgebra& g = cs.g;
  const int d = g.dim();
  const int n = cs.n();
  for (int a = 0; a < n; ++a) {
    const int b = a / d, i = a % d;
    for (int kind = 0; kind < 2; ++kind) {
      const GradedFunction gen = kind == 0 ? GradedFunction::c(n, a) : GradedFunction::x(n, a);
      const GradedFunction Q1 = odd_bracket(S, gen);
      const GradedFunction Q2 = odd_bracket(S, Q1);
      r.nilpotency = std::max(r.nilpotency, Q2.max_abs());
      GradedFunction expect(n);
      if (kind == 0) {
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q)
            if (g.sc(i, p, q) != 0.0) expect.add(Monomial{{}, {b * d + p, b * d + q}}, -0.5 * g.sc(i, p, q));
      } else {
        // <ad*(c) x, e_i> = <x, [c, e_i]> = x_k C^k_{p i} c_p
        for (int p = 0; p < d; ++p)
          for (int kk = 0; kk < d; ++kk)
            if (g.sc(kk, p, i) != 0.0) expect.add(Monomial{{b * d + kk}, {b * d + p}}, g.sc(kk, p, i));
        for (int p = 0; p < n; ++p)
          if (cs.k(p, a) != 0.0) expect.add(Monomial{{}, {p}}, cs.k(p, a));
      }
      r.hamiltonian = std::max(r.hamiltonian, (Q1 - expect).max_abs());
      ++r.generators;
    }
  }
  return r;
}

// Cyclic sum of the bivector on linear coordinate functions; compared against {S,S}.
struct JacobiCME {
  double jacobi_max = 0;
  double cme_max = 0;
  double ratio = 0;          // fitted cme / jacobi coefficient ratio
  double ratio_spread = 0;   // deviation from a single ratio across coefficients
};

inline JacobiCME jacobi_vs_cme(const CornerSpace& cs) {
  JacobiCME r;
  const int n = cs.n();
  const GradedFunction S = master_function(cs);
  const GradedFunction cme = odd_bracket(S, S);
  r.cme_max = cme.max_abs();
  auto lin = [&](int a) { return GradedFunction::x(n, a); };
  std::vector<std::pair<double, double>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        const GradedFunction J = poisson_direct(cs.g, cs.ncells, cs.k, poisson_direct(cs.g, cs.ncells, cs.k, lin(a), lin(b)), lin(c)) +
                                 poisson_direct(cs.g, cs.ncells, cs.k, poisson_direct(cs.g, cs.ncells, cs.k, lin(b), lin(c)), lin(a)) +
                                 poisson_direct(cs.g, cs.ncells, cs.k, poisson_direct(cs.g, cs.ncells, cs.k, lin(c), lin(a)), lin(b));
        r.jacobi_max = std::max(r.jacobi_max, J.max_abs());
        // Coefficient of c_a c_b c_c in {S,S}, as a polynomial in x, against J.
        GradedFunction coeff(n);
        for (const auto& [m, v] : cme.terms())
          if (m.c == std::vector<int>{a, b, c}) coeff.add(Monomial{m.x, {}}, v);
        for (const auto& [m, v] : J.terms()) {
          auto it = coeff.terms().find(m);
          pairs.emplace_back(v, it == coeff.terms().end() ? 0.0 : it->second);
        }
        for (const auto& [m, v] : coeff.terms())
          if (!J.terms().count(m)) pairs.emplace_back(0.0, v);
      }
  double num = 0, den = 0;
  for (auto [j, c] : pairs) {
    num += j * c;
    den += j * j;
  }
  r.ratio = den > 0 ? num / den : 0.0;
  for (auto [j, c] : pairs) r.ratio_spread = std::max(r.ratio_spread, std::abs(c - r.ratio * j));
  return r;
}

// ---------------------------------------------------------------------------
// Ultralocal equivalence of the constraint-based and flux-based pre-corner forms.

struct UltralocalReport {
  double difference = 0;        // max entry of the difference of the two (phase x gauge) blocks
  double reduced_difference = 0;  // after projecting to the quotient by the flux-form kernel
  double flux_form_norm = 0;
  double constraint_form_norm = 0;
};

// Block M(v, xi) of a pre-corner form pairing phase directions v with gauge directions xi.
inline Mat precorner_flux_form(const Model& m, const Vec& x) { return flux_variation_map(m, x); }

inline Mat precorner_constraint_form(const Model& m, const Vec& x) {
  const Mat W = m.omega_matrix(x);
  const Mat R = m.rho_matrix(x);
  Mat bulkJ = m.density_jacobian(x);
  for (int v : m.mesh().bverts) bulkJ.middleRows(v * m.d(), m.d()).setZero();
  // i_{rho(xi)} omega minus the variation of the bulk density, column per gauge direction.
  return W.transpose() * R - bulkJ.transpose();
}

inline UltralocalReport ultralocal_equivalence(const Model& m, const Vec& x, double rel = 1e-10) {
  UltralocalReport r;
  const Mat F = precorner_flux_form(m, x), C = precorner_constraint_form(m, x);
  r.flux_form_norm = F.size() ? F.cwiseAbs().maxCoeff() : 0.0;
  r.constraint_form_norm = C.size() ? C.cwiseAbs().maxCoeff() : 0.0;
  const Mat D = C - F;
  r.difference = D.size() ? D.cwiseAbs().maxCoeff() : 0.0;
  const Subspace rowsP = Subspace::kernel(F.transpose(), rel).complement();
  const Subspace colsG = Subspace::kernel(F, rel).complement();
  const Mat red = rowsP.basis().transpose() * D * colsG.basis();
  r.reduced_difference = red.size() ? red.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Symplectic leaves of the corner Poisson structure.

struct LeafReport {
  std::vector<Vec> casimirs;
  Index leaf_dim = 0;          // rank of the bivector at fbar
  std::vector<Index> cell_rank;
  double orbit_casimir_drift = 0;  // sampled orbit points keep their Casimirs
};

inline Mat bivector_matrix(const LieAlgebra& g, const Vec& f, const Mat& k) {
  const int d = g.dim();
  const Index n = f.size();
  Mat P = k;
  for (Index b = 0; b < n / d; ++b)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) P(b * d + i, b * d + j) += f.segment(b * d, d).dot(g.bracket(Vec::Unit(d, i), Vec::Unit(d, j)));
  return P;
}

inline LeafReport leaves(const CornerSpace& cs, const Vec& fbar, Rng& rng, int orbit_samples = 10) {
  LeafReport r;
  const LieAlgebra& g = cs.g;
  const int d = g.dim();
  for (Index b = 0; b < cs.ncells; ++b) {
    const Vec fb = fbar.segment(b * d, d);
    r.casimirs.push_back(g.casimirs(fb));
    Mat P(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) P(i, j) = fb.dot(g.bracket(Vec::Unit(d, i), Vec::Unit(d, j)));
    r.cell_rank.push_back(numerical_rank(singular_values(P), 1e-10));
    for (int s = 0; s < orbit_samples; ++s) {
      const Vec moved = g.coadjoint_exp(rng.normal_vec(d), fb);
      r.orbit_casimir_drift = std::max(r.orbit_casimir_drift, (g.casimirs(moved) - g.casimirs(fb)).cwiseAbs().maxCoeff() /
                                                                  std::max(1.0, g.casimirs(fb).cwiseAbs().maxCoeff()));
    }
  }
  r.leaf_dim = numerical_rank(singular_values(bivector_matrix(g, fbar, cs.k)), 1e-10);
  return r;
}

// ---------------------------------------------------------------------------
// BF corner on a closed surface: coordinates (B_v in g*, A_e in g), ghosts (c_v, gamma_e).

class BFCorner {
 public:
  BFCorner(LieAlgebra g, CellComplex m) : g_(std::move(g)), m_(std::move(m)) {
    require(m_.dim == 2, "the BF corner needs a 2D surface");
  }

  const LieAlgebra& algebra() const { return g_; }
  const CellComplex& mesh() const { return m_; }
  int d() const { return g_.dim(); }
  int nB() const { return static_cast<int>(m_.nv() * d()); }
  int n() const { return static_cast<int>((m_.nv() + m_.ne()) * d()); }
  int iB(Index v, int i) const { return static_cast<int>(v * d() + i); }
  int iA(Index e, int i) const { return static_cast<int>(nB() + e * d() + i); }

  // d_A applied to a vertex vector of graded functions, symbolic in the A coordinates.
  std::vector<GradedFunction> d_A(const std::vector<GradedFunction>& phi) const {
    const int D = d();
    std::vector<GradedFunction> out(m_.ne() * D, GradedFunction(n()));
    for (Index e = 0; e < m_.ne(); ++e) {
      const int t = m_.edges[e][0], h = m_.edges[e][1];
      for (int i = 0; i < D; ++i) {
        GradedFunction v = phi[h * D + i] - phi[t * D + i];
        for (int j = 0; j < D; ++j)
          for (int k = 0; k < D; ++k) {
            const double s = g_.sc(i, j, k);
            if (s == 0.0) continue;
            v += GradedFunction::x(n(), iA(e, j)) * (phi[h * D + k] + phi[t * D + k]) * (0.5 * s);
          }
        out[e * D + i] = v;
      }
    }
    return out;
  }

  // S = 1/2 sum_v <B_v,[c_v,c_v]> + sum_e <(d_A c)_e, gamma_e>, ghosts ordered as in the bivector (c before gamma).
  GradedFunction master() const {
    const int D = d();
    GradedFunction S(n());
    for (Index v = 0; v < m_.nv(); ++v)
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
          for (int k = 0; k < D; ++k) {
            const double s = g_.sc(k, i, j);
            if (s != 0.0) S.add(Monomial{{iB(v, k)}, {iB(v, i), iB(v, j)}}, 0.5 * s);
          }
    std::vector<GradedFunction> c;
    for (Index v = 0; v < m_.nv(); ++v)
      for (int i = 0; i < D; ++i) c.push_back(GradedFunction::c(n(), iB(v, i)));
    const auto dc = d_A(c);
    for (Index e = 0; e < m_.ne(); ++e)
      for (int i = 0; i < D; ++i) S += dc[e * D + i] * GradedFunction::c(n(), iA(e, i));
    return S;
  }

  // sum_v <B,[dB f, dB g]> + sum_e (<dA g, d_A dB f> - <dA f, d_A dB g>).
  GradedFunction bivector_direct(const GradedFunction& f, const GradedFunction& h) const {
    const int D = d();
    GradedFunction r(n());
    std::vector<GradedFunction> fB, hB;
    for (int a = 0; a < nB(); ++a) {
      fB.push_back(f.dx(a));
      hB.push_back(h.dx(a));
    }
    for (Index v = 0; v < m_.nv(); ++v)
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
          for (int k = 0; k < D; ++k) {
            const double s = g_.sc(k, i, j);
            if (s == 0.0 || fB[iB(v, i)].empty() || hB[iB(v, j)].empty()) continue;
            r += GradedFunction::x(n(), iB(v, k)) * fB[iB(v, i)] * hB[iB(v, j)] * s;
          }
    const auto dfB = d_A(fB), dhB = d_A(hB);
    for (Index e = 0; e < m_.ne(); ++e)
      for (int i = 0; i < D; ++i) {
        const GradedFunction hA = h.dx(iA(e, i)), fA = f.dx(iA(e, i));
        if (!hA.empty() && !dfB[e * D + i].empty()) r += hA * dfB[e * D + i];
        if (!fA.empty() && !dhB[e * D + i].empty()) r -= fA * dhB[e * D + i];
      }
    return r;
  }

  // Numeric bivector on coordinate functions at (B, A).
  Mat bivector_matrix(const Vec& B, const Vec& A) const {
    const int D = d();
    Mat P = Mat::Zero(n(), n());
    for (Index v = 0; v < m_.nv(); ++v)
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) P(iB(v, i), iB(v, j)) = B.segment(v * D, D).dot(g_.bracket(Vec::Unit(D, i), Vec::Unit(D, j)));
    const Mat dA = Mat(d_twisted_matrix(g_, m_, A));
    P.block(0, nB(), nB(), m_.ne() * D) = dA.transpose();
    P.block(nB(), 0, m_.ne() * D, nB()) = -dA;
    return P;
  }

  // Cayley transport along an edge: kernel of d_A maps xi_tail to xi_head.
  Mat cayley(const Vec& a) const {
    const Mat Y = 0.5 * g_.ad(a);
    const Mat I = Mat::Identity(d(), d());
    return (I + Y).inverse() * (I - Y);
  }

  // Worst deviation from the identity of the face holonomies.
  double holonomy_defect(const Vec& A) const {
    double worst = 0;
    for (Index f = 0; f < m_.nf(); ++f) {
      const auto& fv = m_.faces[f];
      Mat H = Mat::Identity(d(), d());
      for (int k = 0; k < 3; ++k) {
        const int a = fv[k], b = fv[(k + 1) % 3];
        // Find the edge and its orientation relative to a -> b.
        for (int e : m_.vertex_edges[a]) {
          if (m_.edges[e][0] == a && m_.edges[e][1] == b) H = cayley(A.segment(e * d(), d())) * H;
          if (m_.edges[e][1] == a && m_.edges[e][0] == b) H = cayley(A.segment(e * d(), d())).inverse() * H;
        }
      }
      worst = std::max(worst, (H - Mat::Identity(d(), d())).cwiseAbs().maxCoeff());
    }
    return worst;
  }

  // Flat connection whose transports are R_head R_tail^{-1} for vertex frames R_v = exp(ad(a_v)).
  Vec flat_connection(Rng& rng, double scale) const {
    const int D = d();
    std::vector<Mat> R;
    for (Index v = 0; v < m_.nv(); ++v) R.push_back((g_.ad(rng.normal_vec(D, scale))).exp());
    Mat basis(D * D, D);
    for (int i = 0; i < D; ++i) basis.col(i) = Eigen::Map<const Vec>(g_.ad_basis(i).data(), D * D);
    const auto solver = basis.colPivHouseholderQr();
    Vec A(m_.ne() * D);
    const Mat I = Mat::Identity(D, D);
    for (Index e = 0; e < m_.ne(); ++e) {
      const Mat C = R[m_.edges[e][1]] * R[m_.edges[e][0]].transpose();
      const Mat Y = (I - C) * (I + C).inverse();
      const Mat twoY = 2.0 * Y;
      A.segment(e * D, D) = solver.solve(Eigen::Map<const Vec>(twoY.data(), D * D));
    }
    return A;
  }

 private:
  LieAlgebra g_;
  CellComplex m_;
};

struct BFRankScan {
  Index rank_generic = 0, rank_flat = 0;
  double holonomy_generic = 0, holonomy_flat = 0;
  Index kernel_dA_generic = 0, kernel_dA_flat = 0;
};

inline BFRankScan bf_rank_scan(const BFCorner& bf, Rng& rng, double scale = 0.3) {
  BFRankScan r;
  const Index nA = bf.mesh().ne() * bf.d();
  const Vec B = Vec::Zero(bf.nB());
  const Vec Ag = rng.normal_vec(nA, scale);
  const Vec Af = bf.flat_connection(rng, scale);
  r.rank_generic = numerical_rank(singular_values(bf.bivector_matrix(B, Ag)), 1e-10);
  r.rank_flat = numerical_rank(singular_values(bf.bivector_matrix(B, Af)), 1e-10);
  r.holonomy_generic = bf.holonomy_defect(Ag);
  r.holonomy_flat = bf.holonomy_defect(Af);
  auto kern = [&](const Vec& A) {
    const Mat D = Mat(d_twisted_matrix(bf.algebra(), bf.mesh(), A));
    return D.cols() - numerical_rank(singular_values(D), 1e-10);
  };
  r.kernel_dA_generic = kern(Ag);
  r.kernel_dA_flat = kern(Af);
  return r;
}


// ---------------------------------------------------------------------------
// Loop cocycle k(xi, eta) = sum_e o_e <avg xi, d eta>_e on a closed curve (a circle, or the boundary of a
// 2D mesh with the induced orientation), antisymmetrized exactly: 1/2 sum_e o_e (<xi_t,eta_h> - <xi_h,eta_t>).

inline Mat loop_cocycle(const LieAlgebra& g, const CellComplex& m) {
  const int d = g.dim();
  std::vector<std::array<int, 2>> arcs;
  std::vector<double> orient;
  std::vector<int> index(m.nv(), -1);
  Index cells = 0;
  if (m.dim == 1) {
    require(!m.has_boundary(), "loop cocycle needs a closed curve");
    for (Index e = 0; e < m.ne(); ++e) {
      arcs.push_back(m.edges[e]);
      orient.push_back(1.0);
    }
    for (Index v = 0; v < m.nv(); ++v) index[v] = static_cast<int>(v);
    cells = m.nv();
  } else {
    for (std::size_t i = 0; i < m.bedges.size(); ++i) {
      arcs.push_back(m.edges[m.bedges[i]]);
      orient.push_back(m.bedge_sign[i]);
    }
    index = m.bindex;
    cells = m.nb();
  }
  Mat k = Mat::Zero(cells * d, cells * d);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Index t = index[arcs[i][0]], h = index[arcs[i][1]];
    k.block(t * d, h * d, d, d) += 0.5 * orient[i] * g.pairing();
    k.block(h * d, t * d, d, d) -= 0.5 * orient[i] * g.pairing();
  }
  return k;
}

// Fully antisymmetric evaluation of a ghost-degree-3, x-free graded function on three parameter vectors.
inline double evaluate_trilinear(const GradedFunction& F, const Vec& u, const Vec& v, const Vec& w) {
  double s = 0;
  for (const auto& [m, c] : F.terms()) {
    if (m.c.size() != 3 || !m.x.empty()) continue;
    const int a = m.c[0], b = m.c[1], e = m.c[2];
    Eigen::Matrix3d M;
    M << u[a], u[b], u[e], v[a], v[b], v[e], w[a], w[b], w[e];
    s += c * M.determinant();
  }
  return s;
}

struct LoopCocycleResidual {
  Index N = 0;
  double h = 0;
  double cme = 0;           // {S,S} evaluated on the three modes
  double jacobi = 0;        // cyclic sum of the bivector on the three linear functions
  double cocycle_oracle = 0;  // k([xi,eta],zeta) + cyclic, computed from the matrix directly
  double x_linear_cme = 0;  // max coefficient of {S,S} involving x (Jacobi of the algebra)
};

// Smooth modes xi = e1 sin, eta = e2 sin, zeta = e3 (sin + sin 2 theta) on circle(N).
inline LoopCocycleResidual loop_cocycle_residual(const LieAlgebra& g, Index N) {
  require(g.dim() >= 3 || g.abelian(), "loop cocycle modes need three independent directions");
  const CellComplex c = mesh::circle(N);
  CornerSpace cs{g, N, loop_cocycle(g, c)};
  const int d = g.dim();
  const int n = cs.n();
  Vec xi = Vec::Zero(n), eta = Vec::Zero(n), zeta = Vec::Zero(n);
  for (Index v = 0; v < N; ++v) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(v) / static_cast<double>(N);
    xi[v * d + 0 % d] = std::sin(th);
    eta[v * d + 1 % d] = std::sin(th);
    zeta[v * d + 2 % d] = std::sin(th) + std::sin(2 * th);
  }
  LoopCocycleResidual r;
  r.N = N;
  r.h = 2.0 * std::numbers::pi / static_cast<double>(N);
  const GradedFunction S = master_function(cs);
  const GradedFunction cme = odd_bracket(S, S);
  r.cme = evaluate_trilinear(cme, xi, eta, zeta);
  for (const auto& [m, v] : cme.terms())
    if (!m.x.empty()) r.x_linear_cme = std::max(r.x_linear_cme, std::abs(v));
  auto lin = [&](const Vec& p) {
    GradedFunction f(n);
    for (int a = 0; a < n; ++a)
      if (p[a] != 0.0) f.add(Monomial{{a}, {}}, p[a]);
    return f;
  };
  auto P = [&](const GradedFunction& a, const GradedFunction& b) { return poisson_direct(g, N, cs.k, a, b); };
  const GradedFunction lx = lin(xi), le = lin(eta), lz = lin(zeta);
  const GradedFunction J = P(P(lx, le), lz) + P(P(le, lz), lx) + P(P(lz, lx), le);
  r.jacobi = J.eval(Vec::Zero(n));
  auto br = [&](const Vec& a, const Vec& b) {
    Vec o(n);
    for (Index v = 0; v < N; ++v) o.segment(v * d, d) = g.bracket(a.segment(v * d, d), b.segment(v * d, d));
    return o;
  };
  r.cocycle_oracle = br(xi, eta).dot(cs.k * zeta) + br(eta, zeta).dot(cs.k * xi) + br(zeta, xi).dot(cs.k * eta);
  return r;
}

}  // namespace gaugelab
