#include "gaugelab/experiments.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace gaugelab;

namespace {

GradedFunction linear(int n, const Vec& xi) {
  GradedFunction f(n);
  for (int a = 0; a < n; ++a) f += GradedFunction::x(n, a) * xi[a];
  return f;
}

Mat coboundary(const LieAlgebra& g, const Vec& f0, Index cells) {
  const int d = g.dim();
  Mat K = Mat::Zero(cells * d, cells * d);
  for (Index b = 0; b < cells; ++b)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) K(b * d + i, b * d + j) = f0.segment(b * d, d).dot(g.bracket(Vec::Unit(d, i), Vec::Unit(d, j)));
  return K;
}

CornerSpace corner(const LieAlgebra& g, Index cells, const Mat& k) {
  CornerSpace cs{g, cells, k};
  return cs;
}

ExperimentConfig config(const std::string& text) { return parse_config_text(text); }

std::unique_ptr<Model> make(const std::string& name, const std::string& builder, int n, const std::string& alg = "") {
  ModelSpec s;
  s.name = name;
  s.algebra = alg;
  s.mesh = {builder, n};
  return instantiate(s);
}

}  // namespace

// --------------------------------------------------------------------------- graded functions and brackets

TEST(Corner, LinearBivectorIsKKS) {
  Rng rng(1);
  const LieAlgebra g = presets::su2();
  const Index cells = 2;
  const int n = 6;
  const Mat k = coboundary(g, rng.normal_vec(n), cells);
  const GradedFunction S = master_function(g, cells, k);
  for (int s = 0; s < 5; ++s) {
    const Vec xi = rng.normal_vec(n), eta = rng.normal_vec(n), at = rng.normal_vec(n);
    const GradedFunction p = poisson_bivector(S, linear(n, xi), linear(n, eta));
    EXPECT_NEAR(p.eval(at), kks_value(g, at, xi, eta, &k), 1e-12);
    EXPECT_LE((p - poisson_direct(g, cells, k, linear(n, xi), linear(n, eta))).max_abs(), 1e-13);
  }
  const LieAlgebra u = presets::abelian(2);
  const GradedFunction Su = master_function(u, 2, Mat::Zero(4, 4));
  EXPECT_TRUE(poisson_bivector(Su, linear(4, rng.normal_vec(4)), linear(4, rng.normal_vec(4))).chop(1e-15).empty());
}

TEST(Corner, BivectorJacobiOnCubics) {
  Rng rng(2);
  const LieAlgebra g = presets::su2();
  const Mat k = coboundary(g, rng.normal_vec(3), 1);
  const GradedFunction S = master_function(g, 1, k);
  for (int s = 0; s < 3; ++s) {
    const GradedFunction a = checks::random_polynomial(3, rng, 3, 3), b = checks::random_polynomial(3, rng, 3, 3),
                         c = checks::random_polynomial(3, rng, 3, 3);
    auto P = [&](const GradedFunction& x, const GradedFunction& y) { return poisson_bivector(S, x, y); };
    const GradedFunction jac = P(P(a, b), c) + P(P(b, c), a) + P(P(c, a), b);
    const double scale = std::max(1.0, P(P(a, b), c).max_abs());
    EXPECT_LE(jac.max_abs() / scale, 1e-11);
  }
}

TEST(Corner, ClassicalMasterEquation) {
  Rng rng(3);
  const LieAlgebra u = presets::abelian(1);
  Mat ku = rng.normal_vec(9).reshaped(3, 3);
  ku = ku - Mat(ku.transpose());
  EXPECT_EQ(master_function_and_cme(corner(u, 3, ku)).max_coefficient, 0.0);
  const LieAlgebra g = presets::su2();
  EXPECT_EQ(master_function_and_cme(corner(g, 2, Mat::Zero(6, 6))).max_coefficient, 0.0);
  // A genuine cocycle (coboundary) keeps the CME satisfied.
  EXPECT_LE(master_function_and_cme(corner(g, 2, coboundary(g, rng.normal_vec(6), 2))).max_coefficient, 1e-12);
}

TEST(Corner, BRST) {
  Rng rng(4);
  const LieAlgebra g = presets::su2();
  for (const Mat& k : {Mat(Mat::Zero(6, 6)), coboundary(g, rng.normal_vec(6), 2)}) {
    const BRSTReport r = brst(corner(g, 2, k));
    EXPECT_LE(r.nilpotency, 1e-12);
    EXPECT_LE(r.hamiltonian, 1e-12);
    EXPECT_EQ(r.generators, 12);
  }
}

// --------------------------------------------------------------------------- corner data from models

TEST(Corner, BuildCornerFromModels) {
  Rng rng(5);
  const auto ym = make("ym_su2", "disk", 1);
  const CornerSpace cs = build_corner(*ym, rng);
  EXPECT_EQ(cs.dim_G, ym->mesh().nb() * 3);
  EXPECT_LE(cs.k.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(cs.restriction_gap, 1e-8);
  EXPECT_LE(cs.pullback_defect, 1e-12);

  const auto mx = make("maxwell", "annulus", 2);
  const CornerSpace cm = build_corner(*mx, rng);
  EXPECT_EQ(cm.dim_G, mx->mesh().nb());
  EXPECT_EQ(cm.k.cwiseAbs().maxCoeff(), 0.0);

  const auto cs_m = make("chern_simons_disk", "disk", 2);
  const CornerSpace cc = build_corner(*cs_m, rng);
  EXPECT_LE((cc.k - loop_cocycle(cs_m->algebra(), cs_m->mesh())).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(cc.weakly_equivariant);
  EXPECT_GT(cc.k.cwiseAbs().maxCoeff(), 0.1);
}

TEST(Corner, LoopCocycleModes) {
  const LieAlgebra u = presets::u1();
  std::vector<double> h, err;
  for (int N : {16, 32, 64}) {
    const Mat K = loop_cocycle(u, mesh::circle(N));
    for (int k = 1; k <= 3; ++k) {
      Vec a(N), b(N);
      for (int v = 0; v < N; ++v) {
        a[v] = std::cos(k * 2.0 * std::numbers::pi * v / N);
        b[v] = std::sin(k * 2.0 * std::numbers::pi * v / N);
      }
      const double val = a.dot(K * b);
      EXPECT_NEAR(val, k * std::numbers::pi, 0.2 * k * k * k * std::numbers::pi * 64.0 / (N * N));
      if (k == 1) {
        h.push_back(1.0 / N);
        err.push_back(std::abs(val - std::numbers::pi));
      }
    }
  }
  EXPECT_NEAR(checks::fitted_slope(h, err), 2.0, 0.3);
}

TEST(Corner, LoopCocycleCMEConverges) {
  const LieAlgebra g = presets::su2();
  std::vector<double> h, cme;
  for (Index N : {Index(8), Index(16), Index(32)}) {
    const LoopCocycleResidual r = loop_cocycle_residual(g, N);
    EXPECT_LE(r.x_linear_cme, 1e-12);
    EXPECT_LE(std::abs(r.cme + 2.0 * r.jacobi), 1e-10 * std::abs(r.cme));
    EXPECT_LE(std::abs(r.jacobi - r.cocycle_oracle), 1e-10 * std::abs(r.jacobi));
    h.push_back(r.h);
    cme.push_back(std::abs(r.cme));
  }
  EXPECT_LT(cme[2], cme[0]);
  EXPECT_NEAR(checks::fitted_slope(h, cme), 2.0, 0.3);
}

TEST(Corner, UltralocalEquivalence) {
  Rng rng(6);
  for (const auto& [name, b, n] : std::vector<std::tuple<std::string, std::string, int>>{
           {"maxwell", "interval", 4}, {"ym_su2", "interval", 3}, {"maxwell", "disk", 2}, {"ym_su2", "disk", 1}, {"maxwell", "circle", 6}}) {
    const auto m = make(name, b, n);
    const UltralocalReport r = ultralocal_equivalence(*m, m->random_point(rng, 0.6));
    EXPECT_LE(r.difference, 1e-12) << name << " " << b;
    if (b == "circle") EXPECT_EQ(r.flux_form_norm + r.constraint_form_norm, 0.0);
  }
}

TEST(Corner, Leaves) {
  Rng rng(7);
  const LieAlgebra u = presets::abelian(1);
  const LeafReport la = leaves(corner(u, 4, Mat::Zero(4, 4)), rng.normal_vec(4), rng);
  EXPECT_EQ(la.leaf_dim, 0);
  const LieAlgebra g = presets::su2();
  const Vec f = rng.normal_vec(6);
  const LeafReport ls = leaves(corner(g, 2, Mat::Zero(6, 6)), f, rng);
  EXPECT_EQ(ls.leaf_dim, 4);
  for (Index r : ls.cell_rank) EXPECT_EQ(r, 2);
  EXPECT_LE(ls.orbit_casimir_drift, 1e-10);
  EXPECT_NEAR(ls.casimirs[0][0], f.head(3).squaredNorm(), 1e-13);
}

TEST(Corner, BF) {
  for (const std::string alg : {"u1", "su2"}) {
    const ExperimentConfig cfg = config(R"({"model":{"name":"bf_corner","algebra":")" + alg + R"(","mesh":{"builder":"sphere","n":1}},"samples":2})");
    const Report r = run_check(*find_check("bf_corner"), cfg);
    EXPECT_TRUE(r.applicable()) << alg;
    EXPECT_TRUE(r.passed()) << alg << "\n" << r.to_json().dump(2);
  }
}

// --------------------------------------------------------------------------- registry, config, experiments

TEST(Registry, NamesAndCriteria) {
  std::set<std::string> names, crits;
  for (const CheckInfo& c : check_registry()) {
    EXPECT_TRUE(names.insert(c.name).second) << c.name;
    if (!c.criterion.empty()) crits.insert(c.criterion);
    EXPECT_EQ(find_check(c.name), &c);
  }
  EXPECT_EQ(find_check("no_such_check"), nullptr);
  for (int i = 1; i <= 13; ++i) EXPECT_TRUE(crits.count(std::to_string(i))) << i;
}

TEST(Registry, AllChecksOnSmallModels) {
  for (const std::string model : {R"({"name":"maxwell","mesh":{"builder":"interval","n":4}})",
                                  R"({"name":"ym_su2","mesh":{"builder":"disk","n":1}})",
                                  R"({"name":"chern_simons_disk","mesh":{"builder":"disk","n":1}})"}) {
    const ExperimentConfig cfg = config(R"({"seed":3,"samples":3,"model":)" + model + "}");
    for (const CheckInfo& c : check_registry()) {
      const Report r = run_check(c, cfg);
      EXPECT_TRUE(r.passed()) << c.name << " on " << model << "\n" << r.to_json().dump(2);
    }
  }
}

TEST(Registry, ReportsAreDeterministic) {
  const ExperimentConfig cfg = config(R"({"seed":11,"model":{"name":"maxwell","mesh":{"builder":"disk","n":1}}})");
  for (const std::string name : {"flow_residual", "hodge_split", "superselection_square"}) {
    const Report a = run_check(*find_check(name), cfg), b = run_check(*find_check(name), cfg);
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
    EXPECT_EQ(a.to_csv(), b.to_csv());
  }
}

TEST(Config, Validation) {
  EXPECT_THROW(config("{"), ConfigError);
  EXPECT_THROW(config(R"({"bogus":1})"), ConfigError);
  EXPECT_THROW(config(R"({"model":{"name":"nope"}})"), ConfigError);
  EXPECT_THROW(config(R"({"model":{"mesh":{"builder":"torus"}}})"), ConfigError);
  EXPECT_THROW(config(R"({"model":{"name":"maxwell","theta":1}})"), ConfigError);
  EXPECT_THROW(config(R"({"tolerances":{"flow":-1}})"), ConfigError);
  EXPECT_THROW(config(R"({"format":"xml"})"), ConfigError);
  const ExperimentConfig c = config(R"({"seed":5,"tolerances":{"flow":1e-11},"suite":["a"]})");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.tol.flow, 1e-11);
  EXPECT_EQ(c.suite.size(), 1u);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Experiments, ConvergenceTables) {
  const ExperimentConfig cfg = config(
      R"({"seed":2,"mesh_sequence":[{"builder":"circle","n":8},{"builder":"circle","n":16},{"builder":"circle","n":32}]})");
  const ConvergenceTable cs = run_convergence(*find_convergence("cs_modes"), cfg);
  ASSERT_EQ(cs.rows.size(), 3u);
  EXPECT_FALSE(cs.exact);
  EXPECT_NEAR(cs.slope, 2.0, 0.3);
  EXPECT_TRUE(std::isnan(cs.rows[0].rate));
  const ConvergenceTable gi = run_convergence(*find_convergence("green_identity"), cfg);
  EXPECT_TRUE(gi.exact);
  EXPECT_EQ(to_json(gi, cfg)["order"], "exact");
  EXPECT_NE(to_csv(gi).find("order,,,,exact"), std::string::npos);
  EXPECT_EQ(find_convergence("nope"), nullptr);
  const ExperimentConfig two = config(R"({"mesh_sequence":[{"builder":"circle","n":8},{"builder":"circle","n":16}]})");
  EXPECT_THROW(run_convergence(*find_convergence("cs_modes"), two), ConfigError);
  const ExperimentConfig disks = config(R"({"mesh_sequence":[{"builder":"disk","n":1},{"builder":"disk","n":2},{"builder":"disk","n":3}]})");
  EXPECT_THROW(run_convergence(*find_convergence("loop_cocycle"), disks), ConfigError);
}

TEST(Experiments, Census) {
  const ordered_json a = census(config(R"({"seed":4,"samples":6,"model":{"name":"maxwell","mesh":{"builder":"annulus","n":2}}})"));
  EXPECT_LE(a["gauss_law_max_total"].get<double>(), 1e-10);
  EXPECT_EQ(a["boundary_components"], 2);
  EXPECT_EQ(a["samples_detail"].size(), 6u);
  const ordered_json i = census(config(R"({"seed":4,"model":{"name":"maxwell","mesh":{"builder":"interval","n":5}}})"));
  EXPECT_LE(i["gauss_law_max_total"].get<double>(), 1e-10);
  const ordered_json y1 = census(config(R"({"seed":9,"samples":5,"model":{"name":"ym_su2","mesh":{"builder":"disk","n":1}}})"));
  const ordered_json y2 = census(config(R"({"seed":9,"samples":5,"model":{"name":"ym_su2","mesh":{"builder":"disk","n":1}}})"));
  EXPECT_EQ(y1.dump(), y2.dump());
  EXPECT_GE(y1["distinct_labels"].get<int>(), 1);
  const ordered_json c = census(config(R"({"seed":1,"samples":4,"model":{"name":"chern_simons_disk","mesh":{"builder":"disk","n":2}}})"));
  EXPECT_EQ(c["sectors"], 1);
  const ordered_json cl = census(config(R"({"model":{"name":"maxwell","mesh":{"builder":"circle","n":6}}})"));
  EXPECT_EQ(cl["sectors"], 1);
  EXPECT_THROW(census(config(R"({"model":{"name":"bf_corner"}})")), ConfigError);
}
