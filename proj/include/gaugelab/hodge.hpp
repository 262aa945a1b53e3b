#pragma once

#include "gaugelab/complex.hpp"
#include "gaugelab/linalg.hpp"

#include <Eigen/IterativeLinearSolvers>

namespace gaugelab {

enum class BoundaryMode { neumann, dirichlet };

// L = d_A^T M1 d_A on algebra-valued 0-cochains, M1 the lumped mass of algebra 1-cochains.
struct TwistedLaplacian {
  const LieAlgebra* g = nullptr;
  const CellComplex* mesh = nullptr;
  Vec A;
  BoundaryMode mode = BoundaryMode::neumann;
  SpMat dA;   // d_A, (#edges d) x (#vertices d)
  SpMat M1;   // edge masses
  SpMat M0;   // vertex masses
  SpMat L;    // full operator (neumann) or interior block (dirichlet)
  std::vector<Index> dofs;  // vertex dofs kept (dirichlet: interior only)

  Index size() const { return L.rows(); }
};

inline TwistedLaplacian twisted_laplacian(const LieAlgebra& g, const CellComplex& m, const Vec& A,
                                          BoundaryMode mode = BoundaryMode::neumann) {
  TwistedLaplacian T;
  T.g = &g;
  T.mesh = &m;
  T.A = A;
  T.mode = mode;
  T.dA = d_twisted_matrix(g, m, A);
  T.M1 = mass_matrix(m, g, 1, ValueSpace::algebra);
  T.M0 = mass_matrix(m, g, 0, ValueSpace::algebra);
  SpMat full = SpMat(T.dA.transpose()) * T.M1 * T.dA;
  const int d = g.dim();
  if (mode == BoundaryMode::neumann) {
    for (Index i = 0; i < full.rows(); ++i) T.dofs.push_back(i);
    T.L = full;
  } else {
    for (int v : m.interior_vertices())
      for (int i = 0; i < d; ++i) T.dofs.push_back(static_cast<Index>(v) * d + i);
    Mat F = Mat(full);
    Mat B(T.dofs.size(), T.dofs.size());
    for (std::size_t i = 0; i < T.dofs.size(); ++i)
      for (std::size_t j = 0; j < T.dofs.size(); ++j) B(i, j) = F(T.dofs[i], T.dofs[j]);
    T.L = B.sparseView();
  }
  T.L.makeCompressed();
  return T;
}

// Kernel of d_A on 0-cochains, orthonormal with respect to M0.
inline Mat kernel_dA(const TwistedLaplacian& T, double rel = 1e-10) {
  const Mat D = Mat(T.dA);
  const Vec w = Vec(T.M0.diagonal());
  // Columns scaled so that Euclidean orthonormality there is M0-orthonormality here.
  const Vec isq = w.cwiseSqrt().cwiseInverse();
  const Subspace K = Subspace::kernel(D * isq.asDiagonal(), rel);
  return isq.asDiagonal() * K.basis();
}

struct SolveInfo {
  std::string method;
  int iterations = 0;
  double residual = 0;          // relative
  double oracle_discrepancy = -1;  // relative, negative if not computed
  double compatibility = 0;     // max |<rhs, chi>| / (|rhs| |chi|)
};

struct SolveResult {
  Vec phi;
  SolveInfo info;
};

inline Vec dense_pinv_solve(const Mat& L, const Vec& b) {
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(L);
  cod.setThreshold(1e-12);
  return cod.solve(b);
}

// Neumann problem L phi = rhs over all vertices. rhs must annihilate ker d_A.
inline SolveResult neumann_solve(const TwistedLaplacian& T, const Vec& rhs, const Tolerances& tol = default_tolerances(),
                                 bool with_oracle = false) {
  require(T.mode == BoundaryMode::neumann, "neumann_solve needs a Neumann Laplacian");
  require(rhs.size() == T.size(), "right-hand side has wrong length");
  SolveResult out;
  const Mat K = kernel_dA(T);
  const double rn = rhs.norm();
  for (Index j = 0; j < K.cols(); ++j) {
    const double c = std::abs(rhs.dot(K.col(j))) / std::max(rn * K.col(j).norm(), 1e-300);
    out.info.compatibility = std::max(out.info.compatibility, c);
    if (rn > 0 && c > tol.compatibility)
      throw NumericalFailure("incompatible Neumann data: the right-hand side pairs nontrivially with ker d_A", Vec(K.col(j)));
  }
  if (rn == 0.0) {
    out.phi = Vec::Zero(T.size());
    out.info.method = "trivial";
    return out;
  }
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(1e-14);
  cg.setMaxIterations(std::max<Index>(20 * T.size(), 200));
  cg.compute(T.L);
  Vec phi = cg.solve(rhs);
  out.info.method = "cg";
  out.info.iterations = static_cast<int>(cg.iterations());
  auto relres = [&](const Vec& p) { return (T.L * p - rhs).norm() / rn; };
  if (!(relres(phi) <= tol.solver_rel) || !phi.allFinite()) {
    require(T.size() <= tol.dense_limit, "iterative solve failed above the dense fallback size");
    phi = dense_pinv_solve(Mat(T.L), rhs);
    out.info.method = "dense";
  }
  // Kernel-orthogonal normalization.
  phi -= K * (K.transpose() * (T.M0 * phi));
  out.info.residual = relres(phi);
  if (with_oracle && T.size() <= tol.dense_limit) {
    Vec ref = dense_pinv_solve(Mat(T.L), rhs);
    ref -= K * (K.transpose() * (T.M0 * ref));
    out.info.oracle_discrepancy = (phi - ref).norm() / std::max(ref.norm(), 1e-300);
  }
  if (!(out.info.residual <= tol.solver_rel)) throw NumericalFailure("Neumann solve did not reach the residual tolerance");
  out.phi = phi;
  return out;
}

// Interior source plus boundary data assembled with the green-pairing routing.
inline Vec assemble_neumann_rhs(const CellComplex& m, int d, const Vec& source_interior, const Vec& bdry) {
  Vec rhs = Vec::Zero(m.nv() * d);
  const auto inter = m.interior_vertices();
  require(source_interior.size() == static_cast<Index>(inter.size()) * d, "source must live on interior vertices");
  require(bdry.size() == m.nb() * d, "boundary data must live on boundary cells");
  for (std::size_t i = 0; i < inter.size(); ++i) rhs.segment(inter[i] * d, d) = source_interior.segment(static_cast<Index>(i) * d, d);
  for (Index b = 0; b < m.nb(); ++b) rhs.segment(m.bverts[b] * d, d) = m.bsign[b] * bdry.segment(b * d, d);
  return rhs;
}

// Dirichlet problem on interior vertices with prescribed boundary values.
inline SolveResult dirichlet_solve(const LieAlgebra& g, const CellComplex& m, const Vec& A, const Vec& rhs_interior,
                                   const Vec& boundary_values, const Tolerances& tol = default_tolerances()) {
  const TwistedLaplacian N = twisted_laplacian(g, m, A, BoundaryMode::neumann);
  const TwistedLaplacian D = twisted_laplacian(g, m, A, BoundaryMode::dirichlet);
  const int d = g.dim();
  Vec full_b = Vec::Zero(m.nv() * d);
  for (Index b = 0; b < m.nb(); ++b) full_b.segment(m.bverts[b] * d, d) = boundary_values.segment(b * d, d);
  const Vec lift = N.L * full_b;
  Vec r(D.size());
  for (std::size_t i = 0; i < D.dofs.size(); ++i) r[i] = rhs_interior[i] - lift[D.dofs[i]];
  SolveResult out;
  if (D.size() == 0) {
    out.phi = full_b;
    out.info.method = "trivial";
    return out;
  }
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(1e-14);
  cg.compute(D.L);
  Vec x = cg.solve(r);
  out.info.method = "cg";
  out.info.iterations = static_cast<int>(cg.iterations());
  const double rn = std::max(r.norm(), 1e-300);
  if (!((D.L * x - r).norm() / rn <= tol.solver_rel)) {
    x = Mat(D.L).ldlt().solve(r);
    out.info.method = "dense";
  }
  out.info.residual = (D.L * x - r).norm() / rn;
  out.phi = full_b;
  for (std::size_t i = 0; i < D.dofs.size(); ++i) out.phi[D.dofs[i]] = x[i];
  return out;
}

struct ESplit {
  Vec coul, rad, phi;
  SolveInfo info;
};

// d_A^T F lies in the range of L by construction; roundoff-level values are zeroed.
inline Vec range_rhs(const TwistedLaplacian& T, const Vec& F, const Tolerances& tol) {
  Vec rhs = SpMat(T.dA.transpose()) * F;
  if (rhs.norm() <= tol.exact * SpMat(T.dA).norm() * F.norm()) rhs.setZero();
  return rhs;
}

// E = E_coul + E_rad with E_coul = M1 d_A phi, L phi = d_A^T E; E_rad divergence-free with zero boundary flux.
inline ESplit split_E(const LieAlgebra& g, const CellComplex& m, const Vec& A, const Vec& E,
                      const Tolerances& tol = default_tolerances(), bool with_oracle = false) {
  const TwistedLaplacian T = twisted_laplacian(g, m, A);
  const Vec rhs = range_rhs(T, E, tol);
  SolveResult s = neumann_solve(T, rhs, tol, with_oracle);
  ESplit out;
  out.phi = s.phi;
  out.coul = T.M1 * (T.dA * s.phi);
  out.rad = E - out.coul;
  out.info = s.info;
  return out;
}

// Dual-field inner product <<E, F>> = E^T M1^{-1} F.
inline double dual_inner(const SpMat& M1, const Vec& E, const Vec& F) {
  return E.dot(M1.diagonal().cwiseInverse().asDiagonal() * F);
}

// Coulomb connection: L Y = d_A^T M1 dA (with Neumann data n d_A Y = n dA built in).
inline SolveResult coulomb_connection(const LieAlgebra& g, const CellComplex& m, const Vec& A, const Vec& dA,
                                      const Tolerances& tol = default_tolerances()) {
  const TwistedLaplacian T = twisted_laplacian(g, m, A);
  return neumann_solve(T, range_rhs(T, T.M1 * dA, tol), tol);
}

struct FPReport {
  Mat op;
  double sigma_min_neumann = 0, sigma_max_neumann = 0, cond_neumann = 0;
  double sigma_min_dirichlet = 0, sigma_max_dirichlet = 0, cond_dirichlet = 0;
  Index kernel_neumann = 0;
  bool invertible_dirichlet = false;
};

inline FPReport faddeev_popov(const LieAlgebra& g, const CellComplex& m, const Vec& A0, const Vec& A,
                              double rel = 1e-10) {
  const SpMat d0 = d_twisted_matrix(g, m, A0), d1 = d_twisted_matrix(g, m, A);
  const SpMat M1 = mass_matrix(m, g, 1, ValueSpace::algebra);
  FPReport r;
  r.op = Mat(SpMat(d0.transpose()) * M1 * d1);
  const Vec sv = singular_values(r.op);
  if (sv.size()) {
    r.sigma_max_neumann = sv[0];
    r.sigma_min_neumann = sv[sv.size() - 1];
    r.kernel_neumann = sv.size() - numerical_rank(sv, rel);
    r.cond_neumann = r.sigma_min_neumann > 0 ? sv[0] / r.sigma_min_neumann : std::numeric_limits<double>::infinity();
  }
  const int d = g.dim();
  std::vector<Index> dofs;
  for (int v : m.interior_vertices())
    for (int i = 0; i < d; ++i) dofs.push_back(static_cast<Index>(v) * d + i);
  Mat B(dofs.size(), dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i)
    for (std::size_t j = 0; j < dofs.size(); ++j) B(i, j) = r.op(dofs[i], dofs[j]);
  const Vec sd = singular_values(B);
  if (sd.size()) {
    r.sigma_max_dirichlet = sd[0];
    r.sigma_min_dirichlet = sd[sd.size() - 1];
    r.cond_dirichlet = r.sigma_min_dirichlet > 0 ? sd[0] / r.sigma_min_dirichlet : std::numeric_limits<double>::infinity();
    r.invertible_dirichlet = numerical_rank(sd, rel) == sd.size();
  }
  return r;
}

struct HodgeReport {
  Index ambient = 0;
  Index im_dA = 0, ker_dAstar_N = 0;     // Neumann pair
  Index im_dA_D = 0, ker_dAstar = 0;     // Dirichlet pair
  Index dual_coul = 0, dual_rad = 0;     // split of dual edge fields
  Index kernel_dA0 = 0;                  // (ker d_A) on 0-cochains
  Index harmonic = -1;                   // Abelian only: ker D1 cap ker d^* (b1 dim g)
  double ortho_neumann = 0, ortho_dirichlet = 0, ortho_dual = 0;
  double duality_gap = 0;                // M1 maps primal Im d_A onto the dual Coulombic space
  double sigma_min_dA0 = 0;
  bool sums_ok = false;
};

// The four degree-1 subspaces in weighted coordinates S = M1^{1/2}, plus the dual split.
inline HodgeReport hodge_checks(const LieAlgebra& g, const CellComplex& m, const Vec& A, double rel = 1e-10) {
  HodgeReport r;
  const int d = g.dim();
  const Mat D = Mat(d_twisted_matrix(g, m, A));
  const SpMat M1 = mass_matrix(m, g, 1, ValueSpace::algebra);
  // Lumped masses are block diagonal; for the shipped pairings the blocks are diagonal too.
  const Vec w = M1.diagonal();
  const Vec s = w.cwiseSqrt();
  const Mat SD = s.asDiagonal() * D;
  r.ambient = D.rows();
  const Subspace im = Subspace::span(SD, rel);
  const Subspace kstar = Subspace::kernel(SD.transpose(), rel);
  r.im_dA = im.dim();
  r.ker_dAstar_N = kstar.dim();
  r.ortho_neumann = max_overlap(im, kstar);
  std::vector<Index> inter;
  for (int v : m.interior_vertices())
    for (int i = 0; i < d; ++i) inter.push_back(static_cast<Index>(v) * d + i);
  Mat SDI(SD.rows(), static_cast<Index>(inter.size()));
  for (std::size_t j = 0; j < inter.size(); ++j) SDI.col(static_cast<Index>(j)) = SD.col(inter[j]);
  const Subspace imD = Subspace::span(SDI, rel);
  const Subspace kstarD = Subspace::kernel(SDI.transpose(), rel);
  r.im_dA_D = imD.dim();
  r.ker_dAstar = kstarD.dim();
  r.ortho_dirichlet = max_overlap(imD, kstarD);
  // Dual fields: Coulombic Im(M1 d_A) and radiative ker d_A^T, in coordinates S^{-1}.
  const Vec is = s.cwiseInverse();
  const Mat coulomb = is.asDiagonal() * (w.asDiagonal() * D);
  const Subspace dc = Subspace::span(coulomb, rel);
  const Subspace dr = Subspace::kernel(D.transpose() * s.asDiagonal(), rel);
  r.dual_coul = dc.dim();
  r.dual_rad = dr.dim();
  r.ortho_dual = max_overlap(dc, dr);
  r.duality_gap = subspace_gap(dc, im);
  const Vec sv0 = singular_values(D);
  r.kernel_dA0 = D.cols() - numerical_rank(sv0, rel);
  r.sigma_min_dA0 = sv0.size() ? sv0[sv0.size() - 1] : 0.0;
  if (g.abelian()) {
    Mat curl = m.dim == 2 ? Mat(kron_identity(m.D1, d)) * is.asDiagonal() : Mat(0, D.rows());
    Mat stacked(curl.rows() + D.cols(), D.rows());
    stacked << curl, SD.transpose();
    r.harmonic = Subspace::kernel(stacked, rel).dim();
  }
  r.sums_ok = r.im_dA + r.ker_dAstar_N == r.ambient && r.im_dA_D + r.ker_dAstar == r.ambient &&
              r.dual_coul + r.dual_rad == r.ambient;
  return r;
}

}  // namespace gaugelab
