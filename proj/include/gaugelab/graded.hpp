#pragma once

#include "gaugelab/core.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace gaugelab {

// Monomial x_{i1} ... x_{ip} c_{a1} ... c_{aq}: commuting indices sorted, ghost indices strictly increasing.
struct Monomial {
  std::vector<int> x;
  std::vector<int> c;
  auto operator<=>(const Monomial&) const = default;
  int ghost_degree() const { return static_cast<int>(c.size()); }
  int poly_degree() const { return static_cast<int>(x.size()); }
};

// Polynomial in commuting coordinates x_a and odd ghosts c_a (a < n), real coefficients.
class GradedFunction {
 public:
  GradedFunction() = default;
  explicit GradedFunction(int n) : n_(n) {}

  static GradedFunction constant(int n, double v) {
    GradedFunction f(n);
    f.add({}, v);
    return f;
  }
  static GradedFunction x(int n, int i) {
    GradedFunction f(n);
    f.add(Monomial{{i}, {}}, 1.0);
    return f;
  }
  static GradedFunction c(int n, int a) {
    GradedFunction f(n);
    f.add(Monomial{{}, {a}}, 1.0);
    return f;
  }

  int n() const { return n_; }
  const std::map<Monomial, double>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // Adds coef * monomial, normalizing order and sign.
  void add(Monomial m, double coef) {
    if (coef == 0.0) return;
    std::sort(m.x.begin(), m.x.end());
    int sign = 1;
    // Bubble sort on ghosts tracks the permutation parity; repeats vanish.
    for (std::size_t i = 0; i < m.c.size(); ++i)
      for (std::size_t j = 0; j + 1 < m.c.size() - i; ++j)
        if (m.c[j] > m.c[j + 1]) {
          std::swap(m.c[j], m.c[j + 1]);
          sign = -sign;
        }
    for (std::size_t j = 0; j + 1 < m.c.size(); ++j)
      if (m.c[j] == m.c[j + 1]) return;
    for (int i : m.x) require(i >= 0 && i < n_, "coordinate index out of range");
    for (int a : m.c) require(a >= 0 && a < n_, "ghost index out of range");
    auto [it, ins] = terms_.emplace(std::move(m), sign * coef);
    if (!ins) {
      it->second += sign * coef;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  GradedFunction& operator+=(const GradedFunction& o) {
    n_ = std::max(n_, o.n_);
    for (const auto& [m, v] : o.terms_) add(m, v);
    return *this;
  }
  GradedFunction& operator-=(const GradedFunction& o) {
    n_ = std::max(n_, o.n_);
    for (const auto& [m, v] : o.terms_) add(m, -v);
    return *this;
  }
  GradedFunction operator+(const GradedFunction& o) const { GradedFunction r = *this; return r += o; }
  GradedFunction operator-(const GradedFunction& o) const { GradedFunction r = *this; return r -= o; }
  GradedFunction operator*(double s) const {
    GradedFunction r(n_);
    for (const auto& [m, v] : terms_) r.add(m, s * v);
    return r;
  }

  // Graded-commutative product.
  GradedFunction operator*(const GradedFunction& o) const {
    GradedFunction r(std::max(n_, o.n_));
    for (const auto& [m1, v1] : terms_)
      for (const auto& [m2, v2] : o.terms_) {
        Monomial m;
        m.x = m1.x;
        m.x.insert(m.x.end(), m2.x.begin(), m2.x.end());
        m.c = m1.c;
        m.c.insert(m.c.end(), m2.c.begin(), m2.c.end());
        r.add(std::move(m), v1 * v2);
      }
    return r;
  }

  GradedFunction dx(int i) const {
    GradedFunction r(n_);
    for (const auto& [m, v] : terms_) {
      const auto cnt = std::count(m.x.begin(), m.x.end(), i);
      if (!cnt) continue;
      Monomial k = m;
      k.x.erase(std::find(k.x.begin(), k.x.end(), i));
      r.add(std::move(k), v * static_cast<double>(cnt));
    }
    return r;
  }

  // Left derivative: move c_a to the front, then drop it.
  GradedFunction dc_left(int a) const {
    GradedFunction r(n_);
    for (const auto& [m, v] : terms_) {
      const auto it = std::find(m.c.begin(), m.c.end(), a);
      if (it == m.c.end()) continue;
      const auto p = it - m.c.begin();
      Monomial k = m;
      k.c.erase(k.c.begin() + p);
      r.add(std::move(k), (p % 2 ? -1.0 : 1.0) * v);
    }
    return r;
  }

  // Right derivative: move c_a to the back, then drop it.
  GradedFunction dc_right(int a) const {
    GradedFunction r(n_);
    for (const auto& [m, v] : terms_) {
      const auto it = std::find(m.c.begin(), m.c.end(), a);
      if (it == m.c.end()) continue;
      const auto p = it - m.c.begin();
      const auto after = static_cast<long>(m.c.size()) - 1 - p;
      Monomial k = m;
      k.c.erase(k.c.begin() + p);
      r.add(std::move(k), (after % 2 ? -1.0 : 1.0) * v);
    }
    return r;
  }

  bool homogeneous_ghost_degree(int* deg = nullptr) const {
    int d = -1;
    for (const auto& [m, v] : terms_) {
      if (d < 0) d = m.ghost_degree();
      else if (d != m.ghost_degree()) return false;
    }
    if (deg) *deg = d < 0 ? 0 : d;
    return true;
  }

  double max_abs() const {
    double w = 0;
    for (const auto& [m, v] : terms_) w = std::max(w, std::abs(v));
    return w;
  }

  // Evaluate a ghost-degree-0 function at x.
  double eval(const Vec& xv) const {
    double s = 0;
    for (const auto& [m, v] : terms_) {
      require(m.c.empty(), "eval needs a ghost-free function");
      double t = v;
      for (int i : m.x) t *= xv[i];
      s += t;
    }
    return s;
  }

  // Drop coefficients below tol (for reporting only).
  GradedFunction chop(double tol) const {
    GradedFunction r(n_);
    for (const auto& [m, v] : terms_)
      if (std::abs(v) > tol) r.add(m, v);
    return r;
  }

  std::string str() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [m, v] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << v;
      for (int i : m.x) os << "*x" << i;
      for (int a : m.c) os << "*c" << a;
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  int n_ = 0;
  std::map<Monomial, double> terms_;
};

// Odd bracket {F,G} = sum_a (F dR/dc_a)(dG/dx_a) - (dF/dx_a)(dL/dc_a G).
inline GradedFunction odd_bracket(const GradedFunction& F, const GradedFunction& G) {
  const int n = std::max(F.n(), G.n());
  GradedFunction r(n);
  for (int a = 0; a < n; ++a) {
    const GradedFunction Gx = G.dx(a);
    if (!Gx.empty()) {
      const GradedFunction Fc = F.dc_right(a);
      if (!Fc.empty()) r += Fc * Gx;
    }
    const GradedFunction Gc = G.dc_left(a);
    if (!Gc.empty()) {
      const GradedFunction Fx = F.dx(a);
      if (!Fx.empty()) r -= Fx * Gc;
    }
  }
  return r;
}

}  // namespace gaugelab
