#pragma once

#include "gaugelab/checks.hpp"

namespace gaugelab {

// ---------------------------------------------------------------------------
// Convergence studies: one scalar residual per mesh, log-log slope over the sequence.

struct ConvergenceRow {
  MeshSpec mesh;
  double h = 0;
  double residual = 0;
  double rate = std::numeric_limits<double>::quiet_NaN();  // against the previous row
};

struct ConvergenceTable {
  std::string quantity;
  std::vector<ConvergenceRow> rows;
  double slope = 0;
  bool exact = false;  // every residual at machine level: no order is meaningful
};

using ConvergenceFn = std::function<double(const ExperimentConfig&, const MeshSpec&, Rng&)>;

struct ConvergenceQuantity {
  std::string name;
  std::string description;
  ConvergenceFn fn;
};

namespace convergence_detail {

inline double loop_cocycle_cme(const ExperimentConfig& cfg, const MeshSpec& ms, Rng&) {
  if (ms.builder != "circle") throw ConfigError("loop_cocycle needs circle meshes");
  LieAlgebra g = presets::by_name(cfg.model.algebra_name());
  if (g.abelian() || g.dim() < 3) g = presets::su2();
  return std::abs(loop_cocycle_residual(g, ms.n).cme);
}

inline double cs_mode_error(const ExperimentConfig&, const MeshSpec& ms, Rng&) {
  if (ms.builder != "circle") throw ConfigError("cs_modes needs circle meshes");
  const Index N = ms.n;
  const Mat K = loop_cocycle(presets::u1(), mesh::circle(static_cast<int>(N)));
  Vec a(N), b(N);
  for (Index v = 0; v < N; ++v) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(v) / static_cast<double>(N);
    a[v] = std::cos(th);
    b[v] = std::sin(th);
  }
  return std::abs(a.dot(K * b) - std::numbers::pi);
}

inline double green_residual(const ExperimentConfig& cfg, const MeshSpec& ms, Rng& rng) {
  const LieAlgebra g = presets::by_name(cfg.model.algebra_name());
  const CellComplex m = mesh::by_name(ms.builder, ms.n);
  const int d = g.dim();
  double worst = 0;
  for (int s = 0; s < (cfg.samples > 0 ? cfg.samples : 20); ++s) {
    const Vec A = rng.normal_vec(m.ne() * d, 0.5), E = rng.normal_vec(m.ne() * d), xi = rng.normal_vec(m.nv() * d);
    const GreenIdentity gi = green_identity(g, m, E, xi, A);
    worst = std::max(worst, gi.residual() / std::max(1.0, gi.scale));
  }
  return worst;
}

inline double hodge_orthogonality(const ExperimentConfig& cfg, const MeshSpec& ms, Rng& rng) {
  const LieAlgebra g = presets::by_name(cfg.model.algebra_name());
  const CellComplex m = mesh::by_name(ms.builder, ms.n);
  const int d = g.dim();
  const Vec A = rng.normal_vec(m.ne() * d, 0.5);
  const SpMat M1 = mass_matrix(m, g, 1, ValueSpace::algebra);
  double worst = 0;
  for (int s = 0; s < (cfg.samples > 0 ? cfg.samples : 5); ++s) {
    const Vec E = rng.normal_vec(m.ne() * d);
    const ESplit sp = split_E(g, m, A, E, cfg.tol);
    const double nE2 = dual_inner(M1, E, E);
    worst = std::max(worst, std::abs(dual_inner(M1, sp.coul, sp.rad)) / nE2);
  }
  return worst;
}

}  // namespace convergence_detail

inline const std::vector<ConvergenceQuantity>& convergence_registry() {
  static const std::vector<ConvergenceQuantity> reg{
      {"loop_cocycle", "|{S,S}| of the loop cocycle on smooth su(2) modes", convergence_detail::loop_cocycle_cme},
      {"cs_modes", "|k(cos, sin) - pi| for the Abelian loop cocycle", convergence_detail::cs_mode_error},
      {"green_identity", "relative Green-formula residual", convergence_detail::green_residual},
      {"hodge_orthogonality", "Coulomb/radiative overlap relative to |E|^2", convergence_detail::hodge_orthogonality},
  };
  return reg;
}

inline const ConvergenceQuantity* find_convergence(const std::string& name) {
  for (const ConvergenceQuantity& q : convergence_registry())
    if (q.name == name) return &q;
  return nullptr;
}

inline double mesh_size(const MeshSpec& ms) {
  const CellComplex m = mesh::by_name(ms.builder, ms.n);
  return m.vol1.size() ? m.vol1.maxCoeff() : 0.0;
}

inline ConvergenceTable run_convergence(const ConvergenceQuantity& q, const ExperimentConfig& cfg) {
  if (cfg.mesh_sequence.size() < 3) throw ConfigError("convergence needs a mesh_sequence of at least three meshes");
  ConvergenceTable t;
  t.quantity = q.name;
  Rng rng(check_seed(cfg.seed, "convergence." + q.name));
  std::vector<double> h, r;
  for (const MeshSpec& ms : cfg.mesh_sequence) {
    ConvergenceRow row;
    row.mesh = ms;
    row.h = mesh_size(ms);
    row.residual = q.fn(cfg, ms, rng);
    if (!t.rows.empty()) {
      const ConvergenceRow& prev = t.rows.back();
      if (prev.residual > 0 && row.residual > 0 && prev.h != row.h)
        row.rate = std::log(prev.residual / row.residual) / std::log(prev.h / row.h);
    }
    t.rows.push_back(row);
    h.push_back(row.h);
    r.push_back(row.residual);
  }
  t.exact = std::all_of(r.begin(), r.end(), [&](double v) { return v <= cfg.tol.property; });
  t.slope = t.exact ? 0.0 : checks::fitted_slope(h, r);
  return t;
}

inline ordered_json to_json(const ConvergenceTable& t, const ExperimentConfig& cfg) {
  ordered_json j;
  j["quantity"] = t.quantity;
  j["model"] = model_json(cfg.model);
  j["seed"] = cfg.seed;
  ordered_json rows = ordered_json::array();
  for (const ConvergenceRow& r : t.rows) {
    ordered_json row;
    row["mesh"] = mesh_json(r.mesh);
    row["h"] = r.h;
    row["residual"] = r.residual;
    row["rate"] = std::isfinite(r.rate) ? ordered_json(r.rate) : ordered_json(nullptr);
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["order"] = t.exact ? ordered_json("exact") : ordered_json(t.slope);
  return j;
}

inline std::string to_csv(const ConvergenceTable& t) {
  std::ostringstream os;
  os.precision(17);
  os << "quantity,builder,n,h,residual,rate\n";
  for (const ConvergenceRow& r : t.rows) {
    os << t.quantity << "," << r.mesh.builder << "," << r.mesh.n << "," << r.h << "," << r.residual << ",";
    if (std::isfinite(r.rate)) os << r.rate;
    os << "\n";
  }
  os << t.quantity << ",order,,,,";
  if (t.exact) os << "exact";
  else os << t.slope;
  os << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Sector census over sampled on-shell configurations.

inline ordered_json census(const ExperimentConfig& cfg) {
  if (cfg.model.corner_only()) throw ConfigError("census needs a bulk model; bf_corner has no phase space");
  const auto m = instantiate(cfg.model);
  Rng rng(check_seed(cfg.seed, "census"));
  const LieAlgebra& g = m->algebra();
  const CellComplex& mesh = m->mesh();
  const int d = g.dim();
  const int n = cfg.samples > 0 ? cfg.samples : 12;
  ordered_json j;
  j["model"] = model_json(cfg.model);
  j["seed"] = cfg.seed;
  j["samples"] = n;
  j["boundary_vertices"] = static_cast<long long>(mesh.nb());
  j["boundary_components"] = mesh.n_bcomponents;
  if (!mesh.has_boundary()) {
    j["sectors"] = 1;
    j["note"] = "closed mesh: no boundary fluxes, a single sector";
    return j;
  }
  if (!checks::exact_onshell(*m)) {
    j["note"] = "no exact on-shell sampler for the non-Abelian Chern-Simons constraint";
    return j;
  }
  std::vector<Vec> fluxes;
  std::vector<Vec> points;
  const bool cs = checks::is_cs(*m);
  // The interior constraint leaves boundary-face curvature free, so Chern-Simons samples are drawn flat.
  const auto* csm = dynamic_cast<const ChernSimons*>(m.get());
  for (int s = 0; s < n; ++s) {
    if (csm) {
      const Mat C = csm->flat_chart();
      points.push_back(C * rng.normal_vec(C.cols(), 0.5));
    } else {
      points.push_back(sample_onshell(*m, rng));
    }
    fluxes.push_back(m->flux_density(points.back()));
  }
  ordered_json rows = ordered_json::array();
  double worst_gauss = 0;
  for (int s = 0; s < n; ++s) {
    ordered_json row;
    row["sample"] = s;
    const Vec& f = fluxes[static_cast<std::size_t>(s)];
    std::vector<double> totals(static_cast<std::size_t>(mesh.n_bcomponents) * static_cast<std::size_t>(d), 0.0);
    for (Index b = 0; b < mesh.nb(); ++b)
      for (int i = 0; i < d; ++i) totals[static_cast<std::size_t>(mesh.bcomponent[b] * d + i)] += f[b * d + i];
    const SectorLabel lab = sector_label_of_flux(g, f);
    ordered_json prof = ordered_json::array();
    for (const Vec& c : lab.casimirs) prof.push_back(std::vector<double>(c.data(), c.data() + c.size()));
    row["casimir_profile"] = prof;
    row["flux_total_per_boundary_component"] = totals;
    // Gauss law: the flux sums to zero over the whole boundary of each connected component of the mesh.
    std::vector<double> net(static_cast<std::size_t>(mesh.n_components) * static_cast<std::size_t>(d), 0.0);
    for (Index b = 0; b < mesh.nb(); ++b)
      for (int i = 0; i < d; ++i) net[static_cast<std::size_t>(mesh.component[mesh.bverts[b]] * d + i)] += f[b * d + i];
    if (g.abelian() && !cs)
      for (double t : net) worst_gauss = std::max(worst_gauss, std::abs(t) / std::max(1.0, f.norm()));
    rows.push_back(row);
  }
  j["samples_detail"] = rows;
  if (cs) {
    // Flat connections: every flux is an affine-orbit point of the reference flux, f = f_ref + k(lambda, .).
    const CornerSpace cs_data = build_corner(*m, rng);
    const Subspace range = Subspace::span(cs_data.k.transpose());
    const Vec fref = m->flux_density(m->reference().x);
    double worst = 0;
    for (const Vec& f : fluxes) worst = std::max(worst, range.distance(f - fref) / std::max(1.0, f.norm()));
    j["affine_orbit_residual"] = worst;
    j["note"] = "samples are flat connections A = d lambda";
    j["sectors"] = worst <= cfg.tol.subspace ? 1 : -1;
  } else if (g.abelian()) {
    j["gauss_law_max_total"] = worst_gauss;
    j["sectors"] = "continuous family of boundary flux profiles with zero total per boundary component";
  } else {
    const std::vector<int> comp = sector_components(g, fluxes, cfg.tol.label_abelian);
    const int q = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    j["orbit_components"] = comp;
    j["distinct_labels"] = q;
    j["sectors"] = "labelled by pointwise Casimir profiles of the boundary flux";
  }
  return j;
}

}  // namespace gaugelab
