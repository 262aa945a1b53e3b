#include "gaugelab/experiments.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace gaugelab;

namespace {

struct Case {
  std::string model;  // JSON object text for the "model" key
  std::vector<std::string> checks;
};

struct Criterion {
  int id;
  std::string description;
  std::vector<Case> cases;
};

const std::string kSeed = "20261016";

std::string model(const std::string& name, const std::string& builder, int n, const std::string& alg = "", double theta = 0) {
  ordered_json m;
  m["name"] = name;
  if (!alg.empty()) m["algebra"] = alg;
  m["mesh"] = ordered_json{{"builder", builder}, {"n", n}};
  if (theta != 0) m["theta"] = theta;
  return m.dump();
}

std::vector<Case> over(const std::vector<std::string>& models, const std::vector<std::string>& checks) {
  std::vector<Case> out;
  for (const auto& m : models) out.push_back({m, checks});
  return out;
}

// Every applicable report must pass and at least one must apply.
bool evaluate(const Criterion& c) {
  bool ok = true;
  int applicable = 0;
  for (const Case& k : c.cases) {
    const ExperimentConfig cfg = parse_config_text(R"({"seed":)" + kSeed + R"(,"model":)" + k.model + "}");
    for (const std::string& name : k.checks) {
      const CheckInfo* info = find_check(name);
      if (!info) {
        std::cerr << "criterion " << c.id << ": unknown check " << name << "\n";
        ok = false;
        continue;
      }
      const Report r = run_check(*info, cfg);
      if (r.applicable()) ++applicable;
      if (!r.passed()) {
        ok = false;
        std::cerr << "criterion " << c.id << ": " << name << " failed on " << k.model << "\n" << r.to_json().dump(2) << "\n";
      }
    }
  }
  if (applicable == 0) {
    std::cerr << "criterion " << c.id << ": no applicable report\n";
    ok = false;
  }
  return ok;
}

int sh(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Two CLI passes with the same seed (and different thread counts) must write identical bytes.
bool determinism() {
  const fs::path root = fs::temp_directory_path() / "gaugelab_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "config.json";
  std::ofstream(cfg) << R"({"seed":)" << kSeed << R"(,"model":)" << model("ym_su2", "disk", 1)
                     << R"(,"suite":["decomposition","flow_residual","hodge_split","gauss_law","superselection_square","corner_cme"],)"
                     << R"("mesh_sequence":[{"builder":"circle","n":8},{"builder":"circle","n":16},{"builder":"circle","n":32}]})";
  const std::string cli = GAUGELAB_CLI;
  bool ok = true;
  for (const std::string pass : {"a", "b"}) {
    const fs::path out = root / pass;
    const std::string jobs = pass == "a" ? " --jobs 2" : " --jobs 1";
    const std::string base = cli + " --config " + cfg.string() + jobs;
    const std::vector<std::string> cmds{
        base + " run --out " + (out / "run_json").string(),
        base + " run --format csv --out " + (out / "run_csv").string(),
        base + " census --out " + (out / "census").string(),
        base + " hodge-report --out " + (out / "hodge").string(),
    };
    for (const std::string& c : cmds) {
      const int rc = sh(c + " > /dev/null");
      if (rc != 0) {
        std::cerr << "criterion 14: command failed (" << rc << "): " << c << "\n";
        ok = false;
      }
    }
  }
  // Convergence quantities come from a separate suite.
  {
    const fs::path ccfg = root / "conv.json";
    std::ofstream(ccfg) << R"({"seed":)" << kSeed << R"(,"suite":["loop_cocycle","cs_modes","green_identity","hodge_orthogonality"],)"
                        << R"("mesh_sequence":[{"builder":"circle","n":8},{"builder":"circle","n":16},{"builder":"circle","n":32}]})";
    for (const std::string pass : {"a", "b"})
      if (sh(cli + " --config " + ccfg.string() + " --jobs " + (pass == "a" ? "3" : "1") + " convergence --out " +
             (root / pass / "conv").string() + " > /dev/null") != 0) {
        std::cerr << "criterion 14: convergence run failed\n";
        ok = false;
      }
  }
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root / "a");
    ++files;
    if (!fs::exists(root / "b" / rel) || slurp(e.path()) != slurp(root / "b" / rel)) {
      std::cerr << "criterion 14: " << rel.string() << " differs between runs\n";
      ok = false;
    }
  }
  std::size_t files_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "b"))
    if (e.is_regular_file()) ++files_b;
  if (files == 0 || files != files_b) {
    std::cerr << "criterion 14: file sets differ (" << files << " vs " << files_b << ")\n";
    ok = false;
  }
  fs::remove_all(root);
  return ok;
}

}  // namespace

int main() {
  const std::string mx_i = model("maxwell", "interval", 8), mx_i4 = model("maxwell", "interval", 4),
                    mx_d = model("maxwell", "disk", 2), mx_a = model("maxwell", "annulus", 2),
                    mx_c = model("maxwell", "circle", 8), ym_i = model("ym_su2", "interval", 4),
                    ym_d1 = model("ym_su2", "disk", 1), ym_d2 = model("ym_su2", "disk", 2),
                    cs_u = model("chern_simons_disk", "disk", 2), cs_u1 = model("chern_simons_disk", "disk", 1),
                    cs_s = model("chern_simons_disk", "disk", 1, "su2"), th_u = model("theta_ym", "disk", 2, "u1", 0.7),
                    th_ua = model("theta_ym", "annulus", 2, "u1", 1.3), th_s = model("theta_ym", "disk", 1, "su2", 0.5);

  const std::vector<Criterion> criteria{
      {1, "momentum splits exactly into constraint and flux parts",
       over({mx_i, mx_d, mx_a, mx_c, ym_i, ym_d2, cs_u, cs_s, th_u, th_s}, {"decomposition"})},
      {2, "gauge generators satisfy the local Hamiltonian flow equation",
       over({mx_i, mx_d, mx_a, mx_c, ym_i, ym_d2, cs_u, th_u, th_s}, {"flow_residual"})},
      {3, "twisted Hodge split is orthogonal and reconstructs E; Abelian Neumann kernel has dimension b0 dim g",
       over({mx_i, mx_d, mx_a, mx_c, ym_i, ym_d2, th_ua}, {"hodge_split"})},
      {4, "Gauss law: fluxes annihilate isotropy; incompatible Neumann data is rejected with a certificate",
       over({mx_i, mx_d, mx_a, th_u, cs_u, ym_d1}, {"gauss_law"})},
      {5, "constraint ideal is just, stable, and has the Abelian corner gap",
       over({mx_i4, mx_d, mx_a, mx_c, ym_d1, cs_u1, th_u}, {"constraint_ideal"})},
      {6, "characteristic kernel equals the constraint gauge directions; a proper subideal is strictly smaller",
       over({mx_i4, mx_d, mx_a, th_u, ym_d1}, {"kernel_identification"})},
      {7, "residual fluxes generate the residual action; the sector form is basic",
       over({mx_i4, mx_d, mx_a, th_u, ym_d1}, {"second_stage"})},
      {8, "KKS Jacobi and corner master equation; loop cocycle residuals decay at second order",
       {{mx_d, {"kks_jacobi", "corner_cme"}}, {ym_d1, {"kks_jacobi", "corner_cme", "loop_cocycle_convergence"}},
        {cs_u1, {"kks_jacobi", "corner_cme"}}}},
      {9, "BRST differential squares to zero on all generators", over({mx_d, ym_d1, cs_u1}, {"brst"})},
      {10, "ultralocal and constraint-based corner forms coincide on Yang-Mills models",
       over({mx_i, mx_d, mx_c, ym_i, ym_d1}, {"ultralocal"})},
      {11, "theta shift leaves the constraint unchanged and moves labels by the curvature oracle",
       over({th_u, th_ua, th_s}, {"theta_invariance"})},
      {12, "superselection square commutes", over({mx_i, mx_d, mx_a, cs_u, ym_d1}, {"superselection_square"})},
      {13, "affine orbits match coadjoint orbits of the central extension", {{mx_d, {"central_extension"}}}},
  };

  bool all = true;
  for (const Criterion& c : criteria) {
    const bool ok = evaluate(c);
    all = all && ok;
    std::cout << "criterion " << c.id << " " << (ok ? "PASS" : "FAIL") << " " << c.description << std::endl;
  }
  const bool det = determinism();
  all = all && det;
  std::cout << "criterion 14 " << (det ? "PASS" : "FAIL") << " identical seeds give byte-identical CLI reports" << std::endl;
  return all ? 0 : 1;
}
