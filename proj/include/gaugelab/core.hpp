#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaugelab {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Rejected input: shape, dimension or precondition violations.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical failure that carries diagnostic data (e.g. a kernel certificate).
struct NumericalFailure : std::runtime_error {
  Vec certificate;
  NumericalFailure(const std::string& what, Vec cert = Vec())
      : std::runtime_error(what), certificate(std::move(cert)) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

// Versioned tolerance ladder. Every check reads its thresholds from here.
struct Tolerances {
  static constexpr int version = 1;
  double construction = 1e-12;
  double exact = 1e-13;
  double property = 1e-10;
  double flow = 1e-12;
  double subspace = 1e-8;
  double rank_rel = 1e-10;
  double compatibility = 1e-9;
  double solver_rel = 1e-10;
  double jacobi = 1e-11;
  double brst = 1e-12;
  double basicness = 1e-8;
  double label_abelian = 1e-8;
  double label_flow = 1e-6;
  double expm = 1e-13;
  double rate_band = 0.3;
  int dense_limit = 2000;
  int rk4_steps = 64;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

// FNV-1a; stable across platforms, used to derive per-check seeds.
inline std::uint64_t stable_hash(const std::string& s, std::uint64_t seed = 1469598103934665603ULL) {
  std::uint64_t h = seed;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace gaugelab
