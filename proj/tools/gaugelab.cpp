#include "gaugelab/experiments.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace gaugelab;

namespace {

enum Exit : int {
  ok = 0,
  check_failed = 1,
  usage = 2,
  config_error = 3,
  unknown_check = 4,
  output_error = 5,
  internal_error = 6,
};

const char* exit_codes_text =
    "Exit codes:\n"
    "  0  success (every applicable check passed)\n"
    "  1  at least one check or assertion failed\n"
    "  2  command-line usage error\n"
    "  3  configuration error (unreadable, invalid JSON, bad schema or values)\n"
    "  4  unknown check or convergence quantity in the suite\n"
    "  5  output directory or file cannot be written\n"
    "  6  internal error\n";

struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownCheck : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  int jobs = 1;
};

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig c = o.config.empty() ? parse_config(nlohmann::json::object()) : load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output = *o.out;
  if (o.format) c.format = *o.format;
  if (c.format != "json" && c.format != "csv") throw ConfigError("format must be json or csv");
  return c;
}

void write_file(const fs::path& p, const std::string& text) {
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  if (ec) throw OutputError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot write '" + p.string() + "'");
  f << text;
  if (!f) throw OutputError("write failed for '" + p.string() + "'");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results are indexed, so ordering is deterministic.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int jobs, F fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) slots[i].emplace(fn(i));
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

int cmd_run(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  std::vector<const CheckInfo*> infos;
  for (const std::string& name : cfg.suite) {
    const CheckInfo* c = find_check(name);
    if (!c) throw UnknownCheck("unknown check '" + name + "'");
    infos.push_back(c);
  }
  if (infos.empty()) return ok;
  const auto reports = parallel_map<Report>(infos.size(), o.jobs, [&](std::size_t i) { return run_check(*infos[i], cfg); });
  const fs::path dir(cfg.output);
  bool all = true;
  ordered_json summary;
  summary["model"] = model_json(cfg.model);
  summary["seed"] = cfg.seed;
  summary["tolerances"] = tolerances_json(cfg.tol);
  summary["checks"] = ordered_json::array();
  for (const Report& r : reports) {
    if (cfg.format == "json") write_file(dir / (r.check() + ".json"), dump(r.to_json()));
    else write_file(dir / (r.check() + ".csv"), r.to_csv());
    summary["checks"].push_back(ordered_json{{"check", r.check()}, {"applicable", r.applicable()}, {"pass", r.passed()}});
    std::cout << (r.applicable() ? (r.passed() ? "PASS " : "FAIL ") : "N/A  ") << r.check() << "\n";
    all = all && r.passed();
  }
  summary["pass"] = all;
  write_file(dir / "summary.json", dump(summary));
  return all ? ok : check_failed;
}

int cmd_convergence(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  std::vector<const ConvergenceQuantity*> qs;
  for (const std::string& name : cfg.suite) {
    const ConvergenceQuantity* q = find_convergence(name);
    if (!q) throw UnknownCheck("unknown convergence quantity '" + name + "'");
    qs.push_back(q);
  }
  if (qs.empty()) return ok;
  if (cfg.mesh_sequence.size() < 3) throw ConfigError("convergence needs a mesh_sequence of at least three meshes");
  const auto tables = parallel_map<ConvergenceTable>(qs.size(), o.jobs, [&](std::size_t i) { return run_convergence(*qs[i], cfg); });
  const fs::path dir(cfg.output);
  for (const ConvergenceTable& t : tables) {
    if (cfg.format == "json") write_file(dir / ("convergence_" + t.quantity + ".json"), dump(to_json(t, cfg)));
    else write_file(dir / ("convergence_" + t.quantity + ".csv"), to_csv(t));
    std::cout << t.quantity << " order ";
    if (t.exact) std::cout << "exact\n";
    else std::cout << t.slope << "\n";
  }
  return ok;
}

int cmd_census(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  write_file(fs::path(cfg.output) / "census.json", dump(census(cfg)));
  return ok;
}

int cmd_hodge(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  if (cfg.model.corner_only()) throw ConfigError("hodge-report needs a bulk model");
  std::vector<const CheckInfo*> infos{find_check("hodge_split"), find_check("hodge_solvers")};
  const auto reports = parallel_map<Report>(infos.size(), o.jobs, [&](std::size_t i) { return run_check(*infos[i], cfg); });
  const LieAlgebra g = presets::by_name(cfg.model.algebra_name());
  const CellComplex m = mesh::by_name(cfg.model.mesh.builder, cfg.model.mesh.n);
  Rng rng(check_seed(cfg.seed, "hodge-report"));
  const Vec A = rng.normal_vec(m.ne() * g.dim(), 0.5);
  const TwistedLaplacian T = twisted_laplacian(g, m, A);
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(T.L), Eigen::EigenvaluesOnly);
  const Vec spec = es.eigenvalues();
  const fs::path dir(cfg.output);
  bool all = true;
  for (const Report& r : reports) all = all && r.passed();
  if (cfg.format == "json") {
    ordered_json j;
    j["model"] = model_json(cfg.model);
    j["seed"] = cfg.seed;
    j["reports"] = ordered_json::array();
    for (const Report& r : reports) j["reports"].push_back(r.to_json());
    j["neumann_spectrum"] = std::vector<double>(spec.data(), spec.data() + spec.size());
    j["pass"] = all;
    write_file(dir / "hodge_report.json", dump(j));
  } else {
    std::string text;
    for (const Report& r : reports) text += r.to_csv();
    write_file(dir / "hodge_report.csv", text);
    std::ostringstream os;
    os.precision(17);
    os << "index,eigenvalue\n";
    for (Index i = 0; i < spec.size(); ++i) os << i << "," << spec[i] << "\n";
    write_file(dir / "hodge_spectrum.csv", os.str());
  }
  for (const Report& r : reports) std::cout << (r.passed() ? "PASS " : "FAIL ") << r.check() << "\n";
  return all ? ok : check_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete gauge theory with boundary: reduction, Hodge and corner checks"};
  app.footer(exit_codes_text);
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  std::string out, format;
  app.add_option("--config", o.config, "experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out, "output directory (overrides the config)");
  auto* fmt_opt = app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.fallthrough();
  auto* run = app.add_subcommand("run", "run the configured suite of checks, one report per check");
  auto* conv = app.add_subcommand("convergence", "residual tables and fitted orders over mesh_sequence");
  auto* cen = app.add_subcommand("census", "superselection sector census of sampled on-shell configurations");
  auto* hod = app.add_subcommand("hodge-report", "Hodge split and boundary-value solver report with the Neumann spectrum");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return usage;
  }
  if (*seed_opt) o.seed = seed;
  if (*out_opt) o.out = out;
  if (*fmt_opt) o.format = format;
  try {
    if (*run) return cmd_run(o);
    if (*conv) return cmd_convergence(o);
    if (*cen) return cmd_census(o);
    if (*hod) return cmd_hodge(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const UnknownCheck& e) {
    std::cerr << e.what() << "\n";
    return unknown_check;
  } catch (const OutputError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return output_error;
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return internal_error;
  }
  return usage;
}
