#include "gaugelab/hodge.hpp"
#include "gaugelab/random.hpp"

#include <gtest/gtest.h>

#include <complex>

using namespace gaugelab;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Independent su(2) oracle: coefficients of [P(x), P(y)] with P_k = -(i/2) sigma_k.
Vec pauli_bracket(const Vec& x, const Vec& y) {
  using C = std::complex<double>;
  using M2 = Eigen::Matrix2cd;
  const C I(0, 1);
  M2 s[3];
  s[0] << 0, 1, 1, 0;
  s[1] << 0, -I, I, 0;
  s[2] << 1, 0, 0, -1;
  auto P = [&](const Vec& v) {
    M2 m = M2::Zero();
    for (int k = 0; k < 3; ++k) m += (-0.5 * I) * v[k] * s[k];
    return m;
  };
  const M2 c = P(x) * P(y) - P(y) * P(x);
  // P_k coefficient: tr(P_k^dagger c) / tr(P_k^dagger P_k) with tr(P_k^dagger P_k) = 1/2.
  Vec out(3);
  for (int k = 0; k < 3; ++k) out[k] = (((-0.5 * I) * s[k]).adjoint() * c).trace().real() * 2.0;
  return out;
}

}  // namespace

// --------------------------------------------------------------------------- liealg

TEST(LieAlgebra, Su2BracketMatchesPauliCommutator) {
  const LieAlgebra g = presets::su2();
  EXPECT_LE((g.bracket(Vec::Unit(3, 0), Vec::Unit(3, 1)) - Vec::Unit(3, 2)).norm(), 1e-15);
  Rng rng(1);
  for (int s = 0; s < 50; ++s) {
    const Vec x = rng.normal_vec(3), y = rng.normal_vec(3);
    EXPECT_LE((g.bracket(x, y) - pauli_bracket(x, y)).norm(), 1e-13);
  }
}

TEST(LieAlgebra, BracketTrivialCases) {
  Rng rng(2);
  for (const std::string name : {"u1", "su2", "su2_semidirect", "R3"}) {
    const LieAlgebra g = presets::by_name(name);
    const Vec x = rng.normal_vec(g.dim());
    EXPECT_LE(g.bracket(x, x).norm(), 1e-14) << name;
  }
  const LieAlgebra u = presets::u1();
  EXPECT_EQ(u.bracket(vec({2.0}), vec({-3.0}))[0], 0.0);
  EXPECT_THROW(presets::su2().bracket(Vec::Zero(2), Vec::Zero(3)), InvalidInput);
}

TEST(LieAlgebra, CoadjointMatchesBruteForce) {
  const LieAlgebra g = presets::su2();
  const Vec c = g.coadjoint(Vec::Unit(3, 0), Vec::Unit(3, 1));
  // <f,[x,e_k]> over all k.
  for (int k = 0; k < 3; ++k)
    EXPECT_NEAR(c[k], Vec::Unit(3, 1).dot(g.bracket(Vec::Unit(3, 0), Vec::Unit(3, k))), 1e-15);
  EXPECT_NEAR(std::abs(c[2]), 1.0, 1e-15);
  Rng rng(3);
  const Vec x = rng.normal_vec(3), f = rng.normal_vec(3);
  const Vec cf = g.coadjoint(x, f);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(cf[k], f.dot(g.bracket(x, Vec::Unit(3, k))), 1e-14);
  EXPECT_EQ(g.coadjoint(x, Vec::Zero(3)).norm(), 0.0);
  EXPECT_EQ(presets::u1().coadjoint(vec({1.3}), vec({0.7})).norm(), 0.0);
}

TEST(LieAlgebra, AffineCoadjoint) {
  Rng rng(4);
  const LieAlgebra g = presets::su2();
  const Vec x = rng.normal_vec(3), f = rng.normal_vec(3);
  EXPECT_LE((g.affine_coadjoint(x, f, AlgebraCocycle{Mat::Zero(3, 3)}) - g.coadjoint(x, f)).norm(), 1e-15);

  const LieAlgebra a = presets::abelian(2);
  const AlgebraCocycle K{(Mat(2, 2) << 0, 1.5, -1.5, 0).finished()};
  const Vec y = vec({0.3, -0.8});
  const Vec r = a.affine_coadjoint(y, Vec::Zero(2), K);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(r[k], y.dot(K.K * Vec::Unit(2, k)), 1e-15);

  // su(2) coboundary K(x,y) = <f0,[x,y]> is a valid cocycle; brute-force each basis pairing.
  const Vec f0 = rng.normal_vec(3);
  Mat Kc(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Kc(i, j) = f0.dot(g.bracket(Vec::Unit(3, i), Vec::Unit(3, j)));
  const AlgebraCocycle Kb{Kc};
  EXPECT_TRUE(test_cocycle(g, Kb).accepted);
  const Vec af = g.affine_coadjoint(x, f, Kb);
  for (int k = 0; k < 3; ++k)
    EXPECT_NEAR(af[k], f.dot(g.bracket(x, Vec::Unit(3, k))) + x.dot(Kc * Vec::Unit(3, k)), 1e-13);

  const AlgebraCocycle bad{(Mat(2, 2) << 0, 1, 0.5, 0).finished()};
  EXPECT_THROW(a.affine_coadjoint(y, Vec::Zero(2), bad), InvalidInput);
}

TEST(LieAlgebra, ExpAction) {
  const LieAlgebra g = presets::su2();
  EXPECT_LE((g.exp_action(Vec::Zero(3)).M - Mat::Identity(4, 4)).norm(), 1e-15);
  const double th = 0.7;
  const Mat R = presets::u1().exp_action(vec({1.0}), th).M;
  const Mat rot = (Mat(2, 2) << std::cos(th), -std::sin(th), std::sin(th), std::cos(th)).finished();
  EXPECT_TRUE(R.isApprox(rot, 1e-14) || R.isApprox(rot.transpose(), 1e-14));
  Rng rng(5);
  const Vec x = rng.normal_vec(3);
  for (double t : {1e-2, 5e-3, 2.5e-3}) {
    const Mat rem = g.exp_action(x, t).M - Mat::Identity(4, 4) - t * g.rep_of(x);
    EXPECT_LE(rem.norm(), x.squaredNorm() * t * t);
  }
}

TEST(LieAlgebra, Casimirs) {
  const LieAlgebra g = presets::su2();
  for (double r : {0.5, 1.0, 2.0}) EXPECT_NEAR(g.casimirs(r * Vec::Unit(3, 2))[0], r * r, 1e-14);
  EXPECT_EQ(g.casimirs(Vec::Zero(3)).norm(), 0.0);
  const LieAlgebra u = presets::abelian(2);
  EXPECT_EQ(u.casimirs(vec({0.3, -1.0})), vec({0.3, -1.0}));
  // Property: invariance along coadjoint orbits.
  Rng rng(6);
  for (const std::string name : {"su2", "su2_semidirect"}) {
    const LieAlgebra a = presets::by_name(name);
    for (int s = 0; s < 100; ++s) {
      const Vec f = rng.normal_vec(a.dim()), x = rng.normal_vec(a.dim());
      const Vec c0 = a.casimirs(f), c1 = a.casimirs(a.coadjoint_exp(x, f));
      EXPECT_LE((c0 - c1).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, c0.cwiseAbs().maxCoeff())) << name;
    }
  }
}

TEST(LieAlgebra, PresetInvariants) {
  for (const std::string name : {"u1", "su2", "su2_semidirect", "u1_semidirect", "R4"}) {
    const AlgebraInvariants inv = presets::by_name(name).invariants();
    EXPECT_LE(inv.antisymmetry, 1e-14) << name;
    EXPECT_LE(inv.jacobi, 1e-13) << name;
    EXPECT_LE(inv.pairing_invariance, 1e-13) << name;
    EXPECT_LE(inv.representation, 1e-13) << name;
  }
  std::vector<double> c(8, 0.0);
  c[(0 * 2 + 0) * 2 + 1] = 1.0;  // [e0,e1] = e0 without the antisymmetric partner
  EXPECT_THROW(LieAlgebra("bad", 2, c, Mat::Identity(2, 2), {}, {1}, {}), InvalidInput);
}

TEST(LieAlgebra, CentralExtension) {
  const LieAlgebra g = presets::su2();
  const LieAlgebra triv = central_extend(g, AlgebraCocycle{Mat::Zero(3, 3)});
  EXPECT_EQ(triv.dim(), 4);
  EXPECT_LE(triv.invariants().jacobi, 1e-13);

  const LieAlgebra heis = central_extend(presets::abelian(6), presets::loop_truncation_cocycle(3));
  double worst = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      for (int k = 0; k < 7; ++k) {
        const Vec a = Vec::Unit(7, i), b = Vec::Unit(7, j), c = Vec::Unit(7, k);
        worst = std::max(worst, (heis.bracket(heis.bracket(a, b), c) + heis.bracket(heis.bracket(b, c), a) +
                                 heis.bracket(heis.bracket(c, a), b))
                                    .norm());
      }
  EXPECT_EQ(worst, 0.0);
  EXPECT_NEAR(heis.bracket(Vec::Unit(7, 2), Vec::Unit(7, 3))[6], 2.0 * std::numbers::pi, 1e-15);

  // Every 2-form on su(2) is a coboundary; on su(2) x| su(2)* a generic antisymmetric form is not closed.
  const LieAlgebra sd = presets::semidirect_dual(presets::su2());
  Mat K = Rng(17).normal_vec(36).reshaped(6, 6);
  K = K - Mat(K.transpose());
  const CocycleTest t = test_cocycle(sd, AlgebraCocycle{K});
  EXPECT_FALSE(t.accepted);
  EXPECT_GE(t.worst_triple[0], 0);
  Mat K2 = Mat::Zero(3, 3);
  K2(0, 1) = 1;
  K2(1, 0) = -1;
  EXPECT_TRUE(test_cocycle(g, AlgebraCocycle{K2}).accepted);
  try {
    central_extend(sd, AlgebraCocycle{K});
    FAIL() << "expected rejection";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("triple"), std::string::npos);
  }
}

// --------------------------------------------------------------------------- complex

TEST(Complex, MeshCounts) {
  const CellComplex i2 = mesh::interval(2);
  EXPECT_EQ(i2.nv(), 3);
  EXPECT_EQ(i2.ne(), 2);
  EXPECT_EQ(i2.nb(), 2);
  const CellComplex c7 = mesh::circle(7);
  EXPECT_EQ(c7.nv(), 7);
  EXPECT_EQ(c7.ne(), 7);
  EXPECT_FALSE(c7.has_boundary());
  for (int r : {1, 2, 3}) {
    const CellComplex d = mesh::disk(r);
    EXPECT_EQ(d.nv() - d.ne() + d.nf(), 1) << r;
  }
  const CellComplex a = mesh::annulus(2);
  EXPECT_EQ(a.nv() - a.ne() + a.nf(), 0);
  EXPECT_EQ(a.n_bcomponents, 2);
  const CellComplex s = mesh::sphere(1);
  EXPECT_EQ(s.nv() - s.ne() + s.nf(), 2);
  EXPECT_THROW(mesh::interval(1), InvalidInput);
  EXPECT_THROW(mesh::disk(0), InvalidInput);
  for (const CellComplex* m : {&i2, &c7, &a, &s}) {
    const ComplexInvariants inv = check_invariants(*m);
    EXPECT_TRUE(inv.dd_zero);
  }
}

TEST(Complex, ExteriorDerivative) {
  const CellComplex m = mesh::interval(2);
  const Cochain xi = make_cochain(m, 0, ValueSpace::scalar, 1, vec({1, 0, 2}));
  EXPECT_EQ(d(m, xi).data, vec({-1, 2}));
  EXPECT_EQ(d(m, make_cochain(m, 0, ValueSpace::scalar, 1, Vec::Constant(3, 4.0))).data.norm(), 0.0);
  EXPECT_THROW(d(m, make_cochain(m, 1, ValueSpace::scalar, 1)), InvalidInput);
  const CellComplex disk = mesh::disk(2);
  Rng rng(7);
  const Cochain z = make_cochain(disk, 0, ValueSpace::scalar, 1, rng.normal_vec(disk.nv()));
  EXPECT_LE(d(disk, d(disk, z)).data.cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Complex, TwistedDerivative) {
  Rng rng(8);
  const CellComplex m = mesh::disk(1);
  const LieAlgebra u = presets::abelian(2);
  const Vec A = rng.normal_vec(m.ne() * 2), xi = rng.normal_vec(m.nv() * 2);
  EXPECT_EQ(d_twisted(u, m, A, xi), apply_blockwise(m.D0, xi, 2));
  const LieAlgebra g = presets::su2();
  const Vec x3 = rng.normal_vec(m.nv() * 3);
  EXPECT_EQ(d_twisted(g, m, Vec::Zero(m.ne() * 3), x3), apply_blockwise(m.D0, x3, 3));
  // Matrix form agrees with the operator.
  const Vec A3 = rng.normal_vec(m.ne() * 3);
  EXPECT_LE((d_twisted_matrix(g, m, A3) * x3 - d_twisted(g, m, A3, x3)).norm(), 1e-13);
}

TEST(Complex, GreenPairing) {
  const CellComplex m = mesh::interval(2);
  const LieAlgebra u = presets::u1();
  const Vec E = vec({3, 3}), xi = vec({1, 0, 2}), A = Vec::Zero(2);
  const GreenSplit s = green_pairing(u, m, E, A);
  EXPECT_EQ(s.bulk[1], 0.0);
  double total = -s.bulk.dot(xi);
  for (Index i = 0; i < m.nb(); ++i) total += s.sign[i] * s.bdry[i] * xi[m.bverts[i]];
  // Telescoping oracle: sum E (xi_{v+1} - xi_v).
  EXPECT_DOUBLE_EQ(total, 3.0 * (0 - 1) + 3.0 * (2 - 0));
  EXPECT_EQ(green_pairing(u, m, Vec::Zero(2), A).bdry.norm(), 0.0);
  const CellComplex c = mesh::circle(9);
  Rng rng(9);
  const Vec Ec = rng.normal_vec(9), xc = rng.normal_vec(9);
  const GreenSplit sc = green_pairing(u, c, Ec, Vec::Zero(9));
  EXPECT_EQ(sc.bdry.size(), 0);
  EXPECT_LE(green_identity(u, c, Ec, xc, Vec::Zero(9)).residual(), 1e-13);
}

TEST(Complex, GreenIdentityProperty) {
  Rng rng(10);
  for (const std::string alg : {"u1", "su2"})
    for (const auto& [b, n] : std::vector<std::pair<std::string, int>>{{"interval", 5}, {"disk", 2}, {"annulus", 2}}) {
      const LieAlgebra g = presets::by_name(alg);
      const CellComplex m = mesh::by_name(b, n);
      for (int s = 0; s < 10; ++s) {
        const Vec A = rng.normal_vec(m.ne() * g.dim()), E = rng.normal_vec(m.ne() * g.dim()),
                  xi = rng.normal_vec(m.nv() * g.dim());
        const GreenIdentity gi = green_identity(g, m, E, xi, A);
        EXPECT_LE(gi.residual(), 1e-13 * std::max(1.0, gi.scale)) << alg << " " << b;
      }
    }
}

TEST(Complex, TracesAndInner) {
  const CellComplex m = mesh::disk(2);
  Vec data = Vec::Zero(m.nv());
  for (int v : m.interior_vertices()) data[v] = 1.0;
  EXPECT_EQ(trace_t(m, make_cochain(m, 0, ValueSpace::scalar, 1, data)).data.norm(), 0.0);
  Vec all = Vec::Constant(m.nv(), 2.0);
  EXPECT_EQ(trace_t(m, make_cochain(m, 0, ValueSpace::scalar, 1, all)).data, Vec::Constant(m.nb(), 2.0));
  EXPECT_THROW(trace_t(m, make_cochain(m, 2, ValueSpace::scalar, 1)), InvalidInput);

  const CellComplex i4 = mesh::interval(4, 0.25);
  const Vec w = masses(i4, 1, ValueSpace::scalar);
  const Cochain e0 = make_cochain(i4, 1, ValueSpace::scalar, 1, Vec::Unit(4, 0));
  const Cochain e1 = make_cochain(i4, 1, ValueSpace::scalar, 1, Vec::Unit(4, 1));
  EXPECT_DOUBLE_EQ(inner(i4, nullptr, e0, e0), w[0]);
  EXPECT_EQ(inner(i4, nullptr, e0, e1), 0.0);
  const Cochain one = make_cochain(i4, 1, ValueSpace::scalar, 1, Vec::Ones(4));
  // Integrated values: the L2 norm of the unit-integral cochain is sum 1/h.
  EXPECT_DOUBLE_EQ(inner(i4, nullptr, one, one), 4 / 0.25);
}

// --------------------------------------------------------------------------- hodge

TEST(Hodge, NeumannTrivialAndOneDimensional) {
  const LieAlgebra u = presets::u1();
  const CellComplex m = mesh::interval(2);
  const TwistedLaplacian T = twisted_laplacian(u, m, Vec::Zero(2));
  EXPECT_EQ(neumann_solve(T, Vec::Zero(3)).phi.norm(), 0.0);
  // 1D: every E is Coulombic.
  const ESplit s = split_E(u, m, Vec::Zero(2), vec({1, 2}), default_tolerances(), true);
  EXPECT_LE(s.rad.norm(), 1e-12);
  EXPECT_LE((s.coul - vec({1, 2})).norm(), 1e-12);
  EXPECT_LE(s.info.oracle_discrepancy, 1e-10);
}

TEST(Hodge, IncompatibleNeumannDataCertificate) {
  const LieAlgebra u = presets::u1();
  const CellComplex m = mesh::disk(2);
  const TwistedLaplacian T = twisted_laplacian(u, m, Vec::Zero(m.ne()));
  Vec bdry = Vec::Ones(m.nb());  // net boundary flux
  const Vec rhs = assemble_neumann_rhs(m, 1, Vec::Zero(static_cast<Index>(m.interior_vertices().size())), bdry);
  try {
    neumann_solve(T, rhs);
    FAIL() << "expected the Gauss-law obstruction";
  } catch (const NumericalFailure& e) {
    ASSERT_EQ(e.certificate.size(), m.nv());
    const double mean = e.certificate.mean();
    EXPECT_GT(std::abs(mean), 0.0);
    EXPECT_LE((e.certificate - Vec::Constant(m.nv(), mean)).norm(), 1e-10 * std::abs(mean) * m.nv());
  }
}

TEST(Hodge, SplitProperties) {
  Rng rng(11);
  for (const std::string alg : {"u1", "su2"})
    for (const auto& [b, n] : std::vector<std::pair<std::string, int>>{{"disk", 2}, {"annulus", 2}, {"interval", 6}}) {
      const LieAlgebra g = presets::by_name(alg);
      const CellComplex m = mesh::by_name(b, n);
      const int d = g.dim();
      const Vec A = rng.normal_vec(m.ne() * d, 0.5);
      const SpMat M1 = mass_matrix(m, g, 1, ValueSpace::algebra);
      // E = M1 d_A phi is purely Coulombic.
      const Vec phi = rng.normal_vec(m.nv() * d);
      const Vec Ec = M1 * d_twisted(g, m, A, phi);
      const ESplit sc = split_E(g, m, A, Ec, default_tolerances(), true);
      EXPECT_LE((sc.coul - Ec).norm(), 1e-9 * Ec.norm()) << alg << " " << b;
      EXPECT_LE(sc.info.oracle_discrepancy, 1e-10);
      // Random E: orthogonality and reconstruction.
      const Vec E = rng.normal_vec(m.ne() * d);
      const ESplit s = split_E(g, m, A, E);
      EXPECT_LE(std::abs(dual_inner(M1, s.coul, s.rad)),
                1e-10 * std::sqrt(dual_inner(M1, s.coul, s.coul) * dual_inner(M1, s.rad, s.rad)) + 1e-14);
      EXPECT_LE((s.coul + s.rad - E).norm(), 1e-12 * std::max(1.0, E.norm()));
      // Radiative part is divergence free with zero boundary flux.
      EXPECT_LE(divergence(g, m, A, s.rad).norm(), 1e-9 * E.norm());
    }
  // Radiative input on the annulus stays radiative: the rad part of any split.
  const LieAlgebra u = presets::u1();
  const CellComplex m = mesh::annulus(2);
  const Vec A = Vec::Zero(m.ne());
  const Vec E = Rng(12).normal_vec(m.ne());
  const Vec rad = split_E(u, m, A, E).rad;
  ASSERT_GT(rad.norm(), 1e-6);
  const ESplit again = split_E(u, m, A, rad);
  EXPECT_LE(again.coul.norm(), 1e-10 * rad.norm());
}

TEST(Hodge, CoulombConnection) {
  Rng rng(13);
  for (const std::string alg : {"u1", "su2"}) {
    const LieAlgebra g = presets::by_name(alg);
    const CellComplex m = mesh::disk(2);
    const int d = g.dim();
    const Vec A = rng.normal_vec(m.ne() * d, 0.4);
    const Vec xi = rng.normal_vec(m.nv() * d);
    const SolveResult r = coulomb_connection(g, m, A, d_twisted(g, m, A, xi));
    // Modulo ker d_A: compare the images.
    EXPECT_LE((d_twisted(g, m, A, r.phi) - d_twisted(g, m, A, xi)).norm(), 1e-8 * xi.norm()) << alg;
  }
  const LieAlgebra u = presets::u1();
  const CellComplex m = mesh::annulus(2);
  const Vec h = split_E(u, m, Vec::Zero(m.ne()), Rng(14).normal_vec(m.ne())).rad;
  const SpMat M1 = mass_matrix(m, u, 1, ValueSpace::algebra);
  const Vec dA = M1.diagonal().cwiseInverse().asDiagonal() * h;  // horizontal tangent
  EXPECT_LE(d_twisted(u, m, Vec::Zero(m.ne()), coulomb_connection(u, m, Vec::Zero(m.ne()), dA).phi).norm(), 1e-9);
}

TEST(Hodge, FaddeevPopov) {
  Rng rng(15);
  const CellComplex m = mesh::disk(2);
  const LieAlgebra u = presets::u1();
  const Vec A0 = rng.normal_vec(m.ne()), A1 = rng.normal_vec(m.ne());
  EXPECT_EQ(faddeev_popov(u, m, A0, A1).op, faddeev_popov(u, m, Vec::Zero(m.ne()), Vec::Zero(m.ne())).op);
  const LieAlgebra g = presets::su2();
  const Vec B = rng.normal_vec(m.ne() * 3, 0.3);
  const FPReport fp = faddeev_popov(g, m, B, B);
  const TwistedLaplacian T = twisted_laplacian(g, m, B);
  EXPECT_LE((fp.op - Mat(T.L)).norm(), 1e-12 * Mat(T.L).norm());
  EXPECT_TRUE(fp.invertible_dirichlet);
  // Scan along A0 -> far A: the report stays finite and records sigma_min.
  const Vec far = B + 5.0 * rng.normal_vec(m.ne() * 3);
  for (double t : {0.0, 0.5, 1.0}) {
    const FPReport r = faddeev_popov(g, m, B, B + t * (far - B));
    EXPECT_TRUE(std::isfinite(r.sigma_max_dirichlet));
    EXPECT_GE(r.sigma_min_dirichlet, 0.0);
  }
}

TEST(Hodge, SubspaceDimensions) {
  Rng rng(16);
  const LieAlgebra u = presets::u1();
  for (const auto& [b, n] : std::vector<std::pair<std::string, int>>{{"disk", 2}, {"annulus", 2}, {"circle", 8}}) {
    const CellComplex m = mesh::by_name(b, n);
    const HodgeReport r = hodge_checks(u, m, Vec::Zero(m.ne()));
    EXPECT_EQ(r.im_dA + r.ker_dAstar_N, m.ne()) << b;
    EXPECT_TRUE(r.sums_ok) << b;
    EXPECT_LE(r.ortho_neumann, 1e-12) << b;
  }
  const HodgeReport c = hodge_checks(u, mesh::circle(8), Vec::Zero(8));
  EXPECT_EQ(c.harmonic, 1);
  EXPECT_EQ(c.kernel_dA0, 1);
  const LieAlgebra g = presets::su2();
  const CellComplex d = mesh::disk(2);
  const HodgeReport s = hodge_checks(g, d, rng.normal_vec(d.ne() * 3, 0.8));
  EXPECT_EQ(s.im_dA + s.ker_dAstar_N, d.ne() * 3);
  EXPECT_EQ(s.kernel_dA0, 0);
  EXPECT_GT(s.sigma_min_dA0, 0.0);
}

TEST(Hodge, AbelianNeumannKernelIsConstantsPerComponent) {
  const LieAlgebra u = presets::abelian(2);
  for (const auto& [b, n] : std::vector<std::pair<std::string, int>>{{"disk", 2}, {"annulus", 2}, {"interval", 5}}) {
    const CellComplex m = mesh::by_name(b, n);
    const TwistedLaplacian T = twisted_laplacian(u, m, Vec::Zero(m.ne() * 2));
    EXPECT_EQ(kernel_dA(T).cols(), 2 * m.n_components) << b;
  }
}
