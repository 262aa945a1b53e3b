#pragma once

#include "gaugelab/core.hpp"
#include "gaugelab/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <numbers>
#include <cmath>
#include <optional>
#include <sstream>

namespace gaugelab {

struct AlgebraInvariants {
  double antisymmetry = 0.0;
  double jacobi = 0.0;
  double pairing_invariance = 0.0;
  double representation = 0.0;
};

// Antisymmetric bilinear form on an algebra (dim x dim), K(x,y) = x^T K y.
struct AlgebraCocycle {
  Mat K;
};

struct CocycleTest {
  bool accepted = false;
  double antisymmetry = 0.0;
  double cocycle = 0.0;
  std::array<int, 3> worst_triple{-1, -1, -1};
};

// Square matrix in the algebra's matrix representation.
struct GroupElement {
  Mat M;
};

class LieAlgebra {
 public:
  LieAlgebra() = default;

  // c[k][i][j] flattened as c[(k*dim+i)*dim+j]; [e_i,e_j] = sum_k c[k][i][j] e_k.
  LieAlgebra(std::string name, int dim, std::vector<double> c, Mat pairing, std::vector<Mat> rep,
             std::vector<int> casimir_degrees, std::vector<Mat> casimir_forms, bool pairing_invariant = true)
      : name_(std::move(name)),
        dim_(dim),
        c_(std::move(c)),
        pairing_(std::move(pairing)),
        rep_(std::move(rep)),
        casimir_degrees_(std::move(casimir_degrees)),
        casimir_forms_(std::move(casimir_forms)),
        pairing_invariant_(pairing_invariant) {
    require(dim_ > 0, "algebra dimension must be positive");
    require(static_cast<int>(c_.size()) == dim_ * dim_ * dim_, "structure constants have wrong size");
    require(pairing_.rows() == dim_ && pairing_.cols() == dim_, "pairing has wrong shape");
    require(rep_.empty() || static_cast<int>(rep_.size()) == dim_, "representation needs one matrix per generator");
    abelian_ = true;
    for (double v : c_)
      if (v != 0.0) abelian_ = false;
    ad_.resize(dim_);
    for (int i = 0; i < dim_; ++i) {
      ad_[i] = Mat::Zero(dim_, dim_);
      for (int k = 0; k < dim_; ++k)
        for (int j = 0; j < dim_; ++j) ad_[i](k, j) = sc(k, i, j);
    }
    Eigen::FullPivLU<Mat> lu(pairing_);
    require(lu.isInvertible(), "pairing must be nondegenerate");
    pairing_inv_ = lu.inverse();
    if (!rep_.empty()) {
      const Index m = rep_[0].rows();
      Mat R(m * m, dim_);
      for (int i = 0; i < dim_; ++i) {
        require(rep_[i].rows() == m && rep_[i].cols() == m, "representation matrices must be square and equal size");
        R.col(i) = Eigen::Map<const Vec>(rep_[i].data(), m * m);
      }
      rep_pinv_ = R.completeOrthogonalDecomposition().pseudoInverse();
    }
    const AlgebraInvariants inv = invariants();
    const double tol = default_tolerances().construction;
    auto fail = [&](const char* what, double v) {
      std::ostringstream os;
      os << "algebra '" << name_ << "' violates " << what << " (residual " << v << ")";
      throw InvalidInput(os.str());
    };
    if (inv.antisymmetry > tol) fail("antisymmetry", inv.antisymmetry);
    if (inv.jacobi > tol) fail("Jacobi", inv.jacobi);
    if (pairing_invariant_ && inv.pairing_invariance > tol) fail("pairing invariance", inv.pairing_invariance);
    if (inv.representation > tol) fail("representation homomorphism", inv.representation);
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  bool abelian() const { return abelian_; }
  bool pairing_invariant() const { return pairing_invariant_; }
  bool has_rep() const { return !rep_.empty(); }
  const Mat& pairing() const { return pairing_; }
  const Mat& pairing_inv() const { return pairing_inv_; }
  const std::vector<Mat>& rep() const { return rep_; }
  const std::vector<int>& casimir_degrees() const { return casimir_degrees_; }
  const std::vector<Mat>& casimir_forms() const { return casimir_forms_; }
  const std::vector<double>& structure_constants() const { return c_; }
  double sc(int k, int i, int j) const { return c_[(k * dim_ + i) * dim_ + j]; }
  const Mat& ad_basis(int i) const { return ad_[i]; }

  AlgebraInvariants invariants() const {
    AlgebraInvariants r;
    for (int k = 0; k < dim_; ++k)
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r.antisymmetry = std::max(r.antisymmetry, std::abs(sc(k, i, j) + sc(k, j, i)));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          for (int l = 0; l < dim_; ++l) {
            double s = 0.0;
            for (int m = 0; m < dim_; ++m)
              s += sc(m, i, j) * sc(l, m, k) + sc(m, j, k) * sc(l, m, i) + sc(m, k, i) * sc(l, m, j);
            r.jacobi = std::max(r.jacobi, std::abs(s));
          }
    for (int i = 0; i < dim_; ++i) {
      const Mat inv = ad_[i].transpose() * pairing_ + pairing_ * ad_[i];
      r.pairing_invariance = std::max(r.pairing_invariance, inv.cwiseAbs().maxCoeff());
    }
    if (!rep_.empty()) {
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
          Mat lhs = rep_[i] * rep_[j] - rep_[j] * rep_[i];
          for (int k = 0; k < dim_; ++k) lhs -= sc(k, i, j) * rep_[k];
          r.representation = std::max(r.representation, lhs.cwiseAbs().maxCoeff());
        }
    }
    return r;
  }

  void check_dim(const Vec& x) const {
    if (x.size() != dim_) throw InvalidInput("element dimension does not match algebra '" + name_ + "'");
  }

  // ad(x) as a dim x dim matrix: ad(x) y = [x,y].
  Mat ad(const Vec& x) const {
    check_dim(x);
    Mat m = Mat::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      if (x[i] != 0.0) m += x[i] * ad_[i];
    return m;
  }

  Vec bracket(const Vec& x, const Vec& y) const {
    check_dim(x);
    check_dim(y);
    Vec z = Vec::Zero(dim_);
    if (abelian_) return z;
    for (int k = 0; k < dim_; ++k) {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        if (x[i] == 0.0) continue;
        for (int j = 0; j < dim_; ++j) s += sc(k, i, j) * x[i] * y[j];
      }
      z[k] = s;
    }
    return z;
  }

  // <ad*(x) f, y> = <f, [x,y]>.
  Vec coadjoint(const Vec& x, const Vec& f) const {
    check_dim(f);
    if (abelian_) return Vec::Zero(dim_);
    return ad(x).transpose() * f;
  }

  Mat coadjoint_matrix(const Vec& x) const { return ad(x).transpose(); }

  Vec affine_coadjoint(const Vec& x, const Vec& f, const AlgebraCocycle& K) const {
    require(K.K.rows() == dim_ && K.K.cols() == dim_, "cocycle has wrong shape");
    require((K.K + K.K.transpose()).cwiseAbs().maxCoeff() <= default_tolerances().construction,
            "cocycle must be antisymmetric");
    return coadjoint(x, f) + K.K.transpose() * x;
  }

  // g-identifications between algebra and dual.
  Vec flat(const Vec& x) const { return pairing_ * x; }
  Vec sharp(const Vec& f) const { return pairing_inv_ * f; }
  double pair(const Vec& x, const Vec& y) const { return x.dot(pairing_ * y); }

  Mat rep_of(const Vec& x) const {
    require(has_rep(), "algebra '" + name_ + "' has no matrix representation");
    check_dim(x);
    Mat m = Mat::Zero(rep_[0].rows(), rep_[0].cols());
    for (int i = 0; i < dim_; ++i) m += x[i] * rep_[i];
    return m;
  }

  // Matrix exponential of t M(x) (Pade scaling and squaring).
  GroupElement exp_action(const Vec& x, double t = 1.0) const {
    Mat m = t * rep_of(x);
    return GroupElement{m.exp()};
  }

  // Coefficients of a matrix in the representation's span.
  Vec from_matrix(const Mat& X) const {
    require(has_rep(), "algebra '" + name_ + "' has no matrix representation");
    return rep_pinv_ * Eigen::Map<const Vec>(X.data(), X.size());
  }

  // Ad(g) as a dim x dim matrix (conjugation g M g^{-1}).
  Mat Ad(const GroupElement& g) const {
    const Mat ginv = g.M.inverse();
    Mat out(dim_, dim_);
    for (int i = 0; i < dim_; ++i) out.col(i) = from_matrix(g.M * rep_[i] * ginv);
    return out;
  }

  // Right coadjoint action Ad*(g) = Ad(g)^T, so <Ad*(g) f, y> = <f, Ad(g) y>.
  Mat Ad_star(const GroupElement& g) const { return Ad(g).transpose(); }

  // exp(ad*(x)) f, exact via the dim x dim exponential.
  Vec coadjoint_exp(const Vec& x, const Vec& f) const {
    if (abelian_) return f;
    Mat m = coadjoint_matrix(x);
    return m.exp() * f;
  }

  Vec adjoint_exp(const Vec& x, const Vec& y) const {
    if (abelian_) return y;
    Mat m = ad(x);
    return m.exp() * y;
  }

  Vec casimirs(const Vec& f) const {
    check_dim(f);
    if (abelian_) return f;
    Vec out(casimir_forms_.size());
    for (std::size_t m = 0; m < casimir_forms_.size(); ++m) out[static_cast<Index>(m)] = f.dot(casimir_forms_[m] * f);
    return out;
  }

  Index n_casimirs() const { return abelian_ ? dim_ : static_cast<Index>(casimir_forms_.size()); }

 private:
  std::string name_;
  int dim_ = 0;
  std::vector<double> c_;
  Mat pairing_, pairing_inv_;
  std::vector<Mat> rep_;
  std::vector<int> casimir_degrees_;
  std::vector<Mat> casimir_forms_;
  bool pairing_invariant_ = true;
  bool abelian_ = true;
  std::vector<Mat> ad_;
  Mat rep_pinv_;
};

inline CocycleTest test_cocycle(const LieAlgebra& g, const AlgebraCocycle& K, double tol = 1e-12) {
  CocycleTest t;
  const int n = g.dim();
  require(K.K.rows() == n && K.K.cols() == n, "cocycle has wrong shape");
  t.antisymmetry = (K.K + K.K.transpose()).cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec ei = Vec::Unit(n, i), ej = Vec::Unit(n, j), ek = Vec::Unit(n, k);
        const double s = g.bracket(ei, ej).dot(K.K * ek) + g.bracket(ej, ek).dot(K.K * ei) +
                         g.bracket(ek, ei).dot(K.K * ej);
        if (std::abs(s) > t.cocycle) {
          t.cocycle = std::abs(s);
          t.worst_triple = {i, j, k};
        }
      }
  t.accepted = t.antisymmetry <= tol && t.cocycle <= tol;
  return t;
}

namespace presets {

inline std::vector<Mat> rotation_blocks(int n) {
  std::vector<Mat> rep;
  for (int i = 0; i < n; ++i) {
    Mat m = Mat::Zero(2 * n, 2 * n);
    m(2 * i, 2 * i + 1) = -1.0;
    m(2 * i + 1, 2 * i) = 1.0;
    rep.push_back(m);
  }
  return rep;
}

inline LieAlgebra abelian(int n, const std::string& name = "") {
  return LieAlgebra(name.empty() ? "R" + std::to_string(n) : name, n, std::vector<double>(n * n * n, 0.0),
                    Mat::Identity(n, n), rotation_blocks(n), {1}, {});
}

inline LieAlgebra u1() { return abelian(1, "u1"); }

inline std::vector<double> epsilon3() {
  std::vector<double> c(27, 0.0);
  auto set = [&](int k, int i, int j, double v) { c[(k * 3 + i) * 3 + j] = v; };
  set(2, 0, 1, 1.0);
  set(2, 1, 0, -1.0);
  set(0, 1, 2, 1.0);
  set(0, 2, 1, -1.0);
  set(1, 2, 0, 1.0);
  set(1, 0, 2, -1.0);
  return c;
}

// Realification of the 2x2 complex matrices M_k = -(i/2) sigma_k.
inline std::vector<Mat> su2_real_rep() {
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  Eigen::Matrix2cd s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, -I, I, 0;
  s3 << 1, 0, 0, -1;
  std::vector<Mat> rep;
  for (const auto* s : {&s1, &s2, &s3}) {
    Eigen::Matrix2cd m = (-0.5 * I) * (*s);
    Mat r(4, 4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        r(2 * a, 2 * b) = m(a, b).real();
        r(2 * a, 2 * b + 1) = -m(a, b).imag();
        r(2 * a + 1, 2 * b) = m(a, b).imag();
        r(2 * a + 1, 2 * b + 1) = m(a, b).real();
      }
    rep.push_back(r);
  }
  return rep;
}

// su(2) with epsilon structure constants; -2 tr pairing on the 2x2 rep is the identity.
inline LieAlgebra su2() {
  return LieAlgebra("su2", 3, epsilon3(), Mat::Identity(3, 3), su2_real_rep(), {2}, {Mat::Identity(3, 3)});
}

// g x| g*: [(x,a),(y,b)] = ([x,y], -ad(x)^T b + ad(y)^T a), pairing a(y) + b(x).
inline LieAlgebra semidirect_dual(const LieAlgebra& base) {
  const int d = base.dim(), n = 2 * d;
  std::vector<double> c(n * n * n, 0.0);
  auto set = [&](int k, int i, int j, double v) { c[(k * n + i) * n + j] += v; };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const double v = base.sc(k, i, j);
        if (v == 0.0) continue;
        set(k, i, j, v);
        // [e_i, eps^k]: -ad(e_i)^T eps^k has component at eps^j equal to -c[k][i][j]
        set(d + j, i, d + k, -v);
        set(d + j, d + k, i, v);
      }
  Mat pairing = Mat::Zero(n, n);
  pairing.topRightCorner(d, d) = Mat::Identity(d, d);
  pairing.bottomLeftCorner(d, d) = Mat::Identity(d, d);
  std::vector<Mat> rep;
  std::vector<Mat> forms;
  if (base.abelian()) {
    rep = rotation_blocks(n);
  } else {
    for (int i = 0; i < n; ++i) {
      Mat m = Mat::Zero(n, n);
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) m(k, j) = c[(k * n + i) * n + j];
      rep.push_back(m);
    }
    // Dual coordinates (a dual to g, b dual to g*): invariants a.b and b.b.
    Mat q1 = Mat::Zero(n, n);
    q1.topRightCorner(d, d) = 0.5 * Mat::Identity(d, d);
    q1.bottomLeftCorner(d, d) = 0.5 * Mat::Identity(d, d);
    Mat q2 = Mat::Zero(n, n);
    q2.bottomRightCorner(d, d) = base.pairing_inv().inverse();
    forms = {q1, q2};
  }
  return LieAlgebra(base.name() + "_semidirect", n, c, pairing, rep, {2, 2}, forms);
}

inline LieAlgebra by_name(const std::string& name) {
  if (name == "u1") return u1();
  if (name == "su2") return su2();
  if (name == "su2_semidirect") return semidirect_dual(su2());
  if (name == "u1_semidirect") return semidirect_dual(u1());
  if (name.size() > 1 && name[0] == 'R') {
    const int n = std::stoi(name.substr(1));
    require(n >= 1, "abelian preset dimension must be positive");
    return abelian(n);
  }
  throw InvalidInput("unknown algebra preset '" + name + "'");
}

// Truncated loop cocycle on R^{2M}: modes (cos n theta, sin n theta), n = 1..M, K = int xi d eta = n pi.
inline AlgebraCocycle loop_truncation_cocycle(int modes) {
  require(modes >= 1, "need at least one mode");
  AlgebraCocycle K{Mat::Zero(2 * modes, 2 * modes)};
  for (int n = 1; n <= modes; ++n) {
    K.K(2 * n - 2, 2 * n - 1) = n * std::numbers::pi;
    K.K(2 * n - 1, 2 * n - 2) = -n * std::numbers::pi;
  }
  return K;
}

}  // namespace presets

// Central extension g (+)_K R with bracket ([x,y], K(x,y)); extra generator is central.
inline LieAlgebra central_extend(const LieAlgebra& g, const AlgebraCocycle& K) {
  const CocycleTest t = test_cocycle(g, K);
  if (!t.accepted) {
    std::ostringstream os;
    os << "cocycle rejected: antisymmetry " << t.antisymmetry << ", cocycle residual " << t.cocycle << " at triple ("
       << t.worst_triple[0] << "," << t.worst_triple[1] << "," << t.worst_triple[2] << ")";
    throw InvalidInput(os.str());
  }
  const int d = g.dim(), n = d + 1;
  std::vector<double> c(n * n * n, 0.0);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) c[(k * n + i) * n + j] = g.sc(k, i, j);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) c[(d * n + i) * n + j] = K.K(i, j);
  Mat pairing = Mat::Identity(n, n);
  pairing.topLeftCorner(d, d) = g.pairing();

  std::vector<Mat> rep;
  if (g.abelian()) {
    // Heisenberg block on (s, y, t): (x,r) -> (1/2 K(x,y) + r t, x t, 0).
    const int m = d + 2;
    for (int i = 0; i < n; ++i) {
      Mat M = Mat::Zero(m, m);
      if (i < d) {
        for (int j = 0; j < d; ++j) M(0, 1 + j) = 0.5 * K.K(i, j);
        M(1 + i, m - 1) = 1.0;
      } else {
        M(0, m - 1) = 1.0;
      }
      rep.push_back(M);
    }
  } else if (g.has_rep()) {
    // K(x,y) = <alpha,[x,y]>: use rep (+) (r - alpha(x)).
    Mat B(d * d, d);
    Vec kv(d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) B(i * d + j, k) = g.sc(k, i, j);
        kv[i * d + j] = K.K(i, j);
      }
    Vec alpha = B.completeOrthogonalDecomposition().solve(kv);
    if ((B * alpha - kv).norm() <= 1e-12 * std::max(1.0, kv.norm())) {
      const Index m0 = g.rep()[0].rows();
      for (int i = 0; i < n; ++i) {
        Mat M = Mat::Zero(m0 + 1, m0 + 1);
        if (i < d) {
          M.topLeftCorner(m0, m0) = g.rep()[i];
          M(m0, m0) = -alpha[i];
        } else {
          M(m0, m0) = 1.0;
        }
        rep.push_back(M);
      }
    }
  }
  return LieAlgebra(g.name() + "_ext", n, c, pairing, rep, {}, {}, false);
}

}  // namespace gaugelab
