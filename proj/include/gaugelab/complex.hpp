#pragma once

#include "gaugelab/core.hpp"
#include "gaugelab/liealg.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <tuple>

namespace gaugelab {

class CellComplex {
 public:
  int dim = 1;
  std::string name;
  Mat coords;  // nV x 3
  std::vector<std::array<int, 2>> edges;  // (tail, head)
  std::vector<std::array<int, 3>> faces;  // (v0, v1, v2), positively oriented

  // Derived data (filled by finalize()).
  Eigen::SparseMatrix<int> D0i, D1i;
  SpMat D0, D1;
  std::vector<char> bnd_vertex, bnd_edge;
  std::vector<int> bverts;             // boundary vertices, ascending
  std::vector<int> bedges;             // boundary edges (dim 2), ascending
  std::vector<int> bindex;             // vertex -> position in bverts or -1
  std::vector<double> bsign;           // induced orientation per boundary vertex (dim 1: +-1, dim 2: +1)
  std::vector<double> bedge_sign;      // per boundary edge: +1 if its orientation is the induced one
  std::vector<int> bedge_face;         // per boundary edge: its unique face
  std::vector<std::array<int, 3>> face_edges;     // edges (01, 12, 02)
  std::vector<std::array<double, 3>> face_signs;  // orientation of those edges along v0->v1, v1->v2, v0->v2
  std::vector<std::vector<int>> vertex_edges;
  Vec vol1, vol2, dual0, dual1;
  std::vector<int> component;   // per vertex
  int n_components = 0;
  std::vector<int> bcomponent;  // per boundary vertex (index into bverts)
  int n_bcomponents = 0;
  bool closed_surface = false;

  Index nv() const { return coords.rows(); }
  Index ne() const { return static_cast<Index>(edges.size()); }
  Index nf() const { return static_cast<Index>(faces.size()); }
  Index nb() const { return static_cast<Index>(bverts.size()); }
  Index cells(int k) const { return k == 0 ? nv() : k == 1 ? ne() : nf(); }
  bool has_boundary() const { return !bverts.empty(); }
  std::vector<int> interior_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < nv(); ++v)
      if (!bnd_vertex[v]) out.push_back(v);
    return out;
  }

  void finalize();
};

struct ComplexInvariants {
  bool dd_zero = true;
  bool boundary_ok = true;
  bool volumes_positive = true;
  bool components_ok = true;
  double min_volume = 0.0;
};

namespace detail {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

inline std::vector<int> label(UnionFind& uf, int n, int& count) {
  std::map<int, int> ids;
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) {
    auto [it, ins] = ids.emplace(uf.find(i), static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  count = static_cast<int>(ids.size());
  return out;
}

}  // namespace detail

inline void CellComplex::finalize() {
  const int V = static_cast<int>(nv()), E = static_cast<int>(ne()), F = static_cast<int>(nf());
  require(dim == 1 || dim == 2, "complex dimension must be 1 or 2");
  std::map<std::pair<int, int>, int> edge_id;
  for (int e = 0; e < E; ++e) {
    require(edges[e][0] != edges[e][1], "degenerate edge");
    edge_id[{edges[e][0], edges[e][1]}] = e;
  }
  std::vector<Eigen::Triplet<int>> t0;
  for (int e = 0; e < E; ++e) {
    t0.emplace_back(e, edges[e][1], 1);
    t0.emplace_back(e, edges[e][0], -1);
  }
  D0i.resize(E, V);
  D0i.setFromTriplets(t0.begin(), t0.end());
  D0 = D0i.cast<double>();
  vertex_edges.assign(V, {});
  for (int e = 0; e < E; ++e) {
    vertex_edges[edges[e][0]].push_back(e);
    vertex_edges[edges[e][1]].push_back(e);
  }

  auto lookup = [&](int a, int b) -> std::pair<int, double> {
    auto it = edge_id.find({a, b});
    if (it != edge_id.end()) return {it->second, 1.0};
    it = edge_id.find({b, a});
    require(it != edge_id.end(), "face references a missing edge");
    return {it->second, -1.0};
  };

  face_edges.assign(F, {});
  face_signs.assign(F, {});
  std::vector<Eigen::Triplet<int>> t1;
  std::vector<int> edge_faces(E, 0);
  std::vector<int> some_face(E, -1);
  for (int f = 0; f < F; ++f) {
    const auto& v = faces[f];
    auto [e01, s01] = lookup(v[0], v[1]);
    auto [e12, s12] = lookup(v[1], v[2]);
    auto [e02, s02] = lookup(v[0], v[2]);
    face_edges[f] = {e01, e12, e02};
    face_signs[f] = {s01, s12, s02};
    t1.emplace_back(f, e01, static_cast<int>(s01));
    t1.emplace_back(f, e12, static_cast<int>(s12));
    t1.emplace_back(f, e02, -static_cast<int>(s02));
    for (int e : {e01, e12, e02}) {
      ++edge_faces[e];
      some_face[e] = f;
    }
  }
  D1i.resize(F, E);
  D1i.setFromTriplets(t1.begin(), t1.end());
  D1 = D1i.cast<double>();

  bnd_vertex.assign(V, 0);
  bnd_edge.assign(E, 0);
  bverts.clear();
  bedges.clear();
  bedge_sign.clear();
  bedge_face.clear();
  if (dim == 1) {
    for (int v = 0; v < V; ++v)
      if (vertex_edges[v].size() == 1) bnd_vertex[v] = 1;
  } else {
    for (int e = 0; e < E; ++e)
      if (edge_faces[e] == 1) {
        bnd_edge[e] = 1;
        bnd_vertex[edges[e][0]] = bnd_vertex[edges[e][1]] = 1;
      }
  }
  for (int v = 0; v < V; ++v)
    if (bnd_vertex[v]) bverts.push_back(v);
  bindex.assign(V, -1);
  for (int i = 0; i < static_cast<int>(bverts.size()); ++i) bindex[bverts[i]] = i;
  bsign.assign(bverts.size(), 1.0);
  if (dim == 1) {
    for (std::size_t i = 0; i < bverts.size(); ++i) {
      const int e = vertex_edges[bverts[i]][0];
      bsign[i] = edges[e][1] == bverts[i] ? 1.0 : -1.0;
    }
  } else {
    for (int e = 0; e < E; ++e) {
      if (!bnd_edge[e]) continue;
      bedges.push_back(e);
      const int f = some_face[e];
      bedge_face.push_back(f);
      const auto& fv = faces[f];
      // Does the face traverse tail -> head?
      double s = -1.0;
      for (int k = 0; k < 3; ++k)
        if (fv[k] == edges[e][0] && fv[(k + 1) % 3] == edges[e][1]) s = 1.0;
      bedge_sign.push_back(s);
    }
  }
  closed_surface = dim == 2 && bverts.empty();

  // Metric volumes.
  vol1.resize(E);
  for (int e = 0; e < E; ++e) vol1[e] = (coords.row(edges[e][1]) - coords.row(edges[e][0])).norm();
  vol2.resize(F);
  dual0 = Vec::Zero(V);
  dual1 = Vec::Zero(E);
  if (dim == 1) {
    for (int e = 0; e < E; ++e) {
      dual0[edges[e][0]] += 0.5 * vol1[e];
      dual0[edges[e][1]] += 0.5 * vol1[e];
      dual1[e] = 1.0;
    }
  } else {
    for (int f = 0; f < F; ++f) {
      const Eigen::RowVector3d a = coords.row(faces[f][0]), b = coords.row(faces[f][1]), c = coords.row(faces[f][2]);
      vol2[f] = 0.5 * (b - a).cross(c - a).norm();
      const Eigen::RowVector3d bc = (a + b + c) / 3.0;
      for (int k = 0; k < 3; ++k) dual0[faces[f][k]] += vol2[f] / 3.0;
      for (int e : face_edges[f]) {
        const Eigen::RowVector3d mid = 0.5 * (coords.row(edges[e][0]) + coords.row(edges[e][1]));
        dual1[e] += (mid - bc).norm();
      }
    }
  }

  detail::UnionFind uf(V);
  for (const auto& e : edges) uf.unite(e[0], e[1]);
  component = detail::label(uf, V, n_components);
  const int nbv = static_cast<int>(bverts.size());
  detail::UnionFind ub(nbv);
  if (dim == 2)
    for (int e : bedges) ub.unite(bindex[edges[e][0]], bindex[edges[e][1]]);
  bcomponent = detail::label(ub, nbv, n_bcomponents);
}

inline ComplexInvariants check_invariants(const CellComplex& m) {
  ComplexInvariants r;
  if (m.dim == 2 && m.nf() > 0) {
    Eigen::SparseMatrix<int> dd = m.D1i * m.D0i;
    for (int k = 0; k < dd.outerSize(); ++k)
      for (Eigen::SparseMatrix<int>::InnerIterator it(dd, k); it; ++it)
        if (it.value() != 0) r.dd_zero = false;
  }
  if (m.dim == 1) {
    for (int v : m.bverts)
      if (m.vertex_edges[v].size() != 1) r.boundary_ok = false;
  } else {
    std::vector<int> cnt(m.ne(), 0);
    for (int f = 0; f < m.nf(); ++f)
      for (int e : m.face_edges[f]) ++cnt[e];
    for (int e = 0; e < m.ne(); ++e) {
      if (m.bnd_edge[e] && cnt[e] != 1) r.boundary_ok = false;
      if (!m.bnd_edge[e] && cnt[e] != 2) r.boundary_ok = false;
    }
  }
  double mn = std::numeric_limits<double>::infinity();
  for (Index e = 0; e < m.ne(); ++e) mn = std::min({mn, m.vol1[e], m.dual1[e]});
  for (Index v = 0; v < m.nv(); ++v) mn = std::min(mn, m.dual0[v]);
  for (Index f = 0; f < m.nf(); ++f) mn = std::min(mn, m.vol2[f]);
  r.min_volume = mn;
  r.volumes_positive = mn > 0.0;
  // Independent BFS closure of incidence against the stored labels.
  std::vector<int> seen(m.nv(), -1);
  int comp = 0;
  for (int s = 0; s < m.nv(); ++s) {
    if (seen[s] >= 0) continue;
    std::vector<int> stack{s};
    seen[s] = comp;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int e : m.vertex_edges[v]) {
        const int w = m.edges[e][0] == v ? m.edges[e][1] : m.edges[e][0];
        if (seen[w] < 0) {
          seen[w] = comp;
          stack.push_back(w);
        }
      }
    }
    ++comp;
  }
  if (comp != m.n_components) r.components_ok = false;
  for (int a = 0; a < m.nv(); ++a)
    for (int e : m.vertex_edges[a]) {
      const int b = m.edges[e][0] == a ? m.edges[e][1] : m.edges[e][0];
      if ((seen[a] == seen[b]) != (m.component[a] == m.component[b])) r.components_ok = false;
    }
  return r;
}

inline void validate(const CellComplex& m) {
  const ComplexInvariants r = check_invariants(m);
  require(r.dd_zero, "complex violates D1 D0 = 0");
  require(r.boundary_ok, "complex boundary cells are not manifold-like");
  require(r.volumes_positive, "complex has non-positive volumes");
  require(r.components_ok, "complex component labels are inconsistent");
}

namespace mesh {

inline CellComplex interval(int N, double h = 1.0) {
  require(N >= 2, "interval needs N >= 2");
  require(h > 0.0, "edge length must be positive");
  CellComplex m;
  m.dim = 1;
  m.name = "interval(" + std::to_string(N) + ")";
  m.coords = Mat::Zero(N + 1, 3);
  for (int i = 0; i <= N; ++i) m.coords(i, 0) = i * h;
  for (int i = 0; i < N; ++i) m.edges.push_back({i, i + 1});
  m.finalize();
  validate(m);
  return m;
}

inline CellComplex circle(int N, double circumference = 2.0 * std::numbers::pi) {
  require(N >= 2, "circle needs N >= 2");
  CellComplex m;
  m.dim = 1;
  m.name = "circle(" + std::to_string(N) + ")";
  m.coords = Mat::Zero(N, 3);
  const double R = circumference / (2.0 * std::numbers::pi);
  for (int i = 0; i < N; ++i) {
    const double t = 2.0 * std::numbers::pi * i / N;
    m.coords(i, 0) = R * std::cos(t);
    m.coords(i, 1) = R * std::sin(t);
  }
  for (int i = 0; i < N; ++i) m.edges.push_back({i, (i + 1) % N});
  m.finalize();
  // Arc lengths rather than chords so that the total length is the circumference.
  m.vol1.setConstant(circumference / N);
  m.dual0.setConstant(circumference / N);
  validate(m);
  return m;
}

namespace detail {
inline void edges_from_faces(CellComplex& m) {
  std::map<std::pair<int, int>, int> seen;
  for (const auto& f : m.faces)
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      if (seen.emplace(std::make_pair(a, b), 0).second) m.edges.push_back({a, b});
    }
}
}  // namespace detail

// Hexagonal-lattice disk of radius 1; ring k projected onto the circle of radius k/r.
inline CellComplex disk(int r) {
  require(r >= 1, "disk needs r >= 1");
  CellComplex m;
  m.dim = 2;
  m.name = "disk(" + std::to_string(r) + ")";
  std::map<std::pair<int, int>, int> id;
  std::vector<std::array<double, 3>> pts;
  auto hexd = [](int a, int b) { return std::max({std::abs(a), std::abs(b), std::abs(a + b)}); };
  for (int k = 0; k <= r; ++k)
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b) {
        if (hexd(a, b) != k) continue;
        double x = a + 0.5 * b, y = std::sqrt(3.0) / 2.0 * b;
        if (k > 0) {
          const double n = std::hypot(x, y);
          x *= static_cast<double>(k) / (r * n);
          y *= static_cast<double>(k) / (r * n);
        }
        id[{a, b}] = static_cast<int>(pts.size());
        pts.push_back({x, y, 0.0});
      }
  auto has = [&](int a, int b) { return hexd(a, b) <= r; };
  for (int a = -r - 1; a <= r; ++a)
    for (int b = -r - 1; b <= r; ++b) {
      if (has(a, b) && has(a + 1, b) && has(a, b + 1)) m.faces.push_back({id[{a, b}], id[{a + 1, b}], id[{a, b + 1}]});
      if (has(a + 1, b) && has(a + 1, b + 1) && has(a, b + 1))
        m.faces.push_back({id[{a + 1, b}], id[{a + 1, b + 1}], id[{a, b + 1}]});
    }
  m.coords.resize(static_cast<Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int c = 0; c < 3; ++c) m.coords(static_cast<Index>(i), c) = pts[i][c];
  detail::edges_from_faces(m);
  m.finalize();
  validate(m);
  return m;
}

// Annulus 1 <= |x| <= 2 with r radial layers and max(8, 6r) vertices per ring.
inline CellComplex annulus(int r) {
  require(r >= 1, "annulus needs r >= 1");
  CellComplex m;
  m.dim = 2;
  m.name = "annulus(" + std::to_string(r) + ")";
  const int n = std::max(8, 6 * r);
  m.coords.resize((r + 1) * n, 3);
  auto vid = [&](int k, int j) { return k * n + ((j % n) + n) % n; };
  for (int k = 0; k <= r; ++k)
    for (int j = 0; j < n; ++j) {
      const double rad = 1.0 + static_cast<double>(k) / r;
      const double t = 2.0 * std::numbers::pi * j / n;
      m.coords.row(vid(k, j)) << rad * std::cos(t), rad * std::sin(t), 0.0;
    }
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < n; ++j) {
      const int A = vid(k, j), B = vid(k, j + 1), C = vid(k + 1, j + 1), D = vid(k + 1, j);
      m.faces.push_back({A, B, C});
      m.faces.push_back({A, C, D});
    }
  detail::edges_from_faces(m);
  m.finalize();
  validate(m);
  return m;
}

// Closed surface: octahedron with each face split into r^2 triangles, projected to the unit sphere.
inline CellComplex sphere(int r) {
  require(r >= 1, "sphere needs r >= 1");
  CellComplex m;
  m.dim = 2;
  m.name = "sphere(" + std::to_string(r) + ")";
  const std::array<Eigen::Vector3d, 6> P{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0, 0), Eigen::Vector3d(0, 1, 0),
                                         Eigen::Vector3d(0, -1, 0), Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(0, 0, -1)};
  const std::array<std::array<int, 3>, 8> oct{{{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                               {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}}};
  std::map<std::tuple<long, long, long>, int> id;
  std::vector<Eigen::Vector3d> pts;
  auto vertex = [&](const Eigen::Vector3d& p) {
    const Eigen::Vector3d q = p.normalized();
    const auto key = std::make_tuple(std::lround(q[0] * 1e9), std::lround(q[1] * 1e9), std::lround(q[2] * 1e9));
    auto it = id.find(key);
    if (it != id.end()) return it->second;
    const int k = static_cast<int>(pts.size());
    id.emplace(key, k);
    pts.push_back(q);
    return k;
  };
  for (const auto& f : oct) {
    const Eigen::Vector3d A = P[f[0]], B = P[f[1]], C = P[f[2]];
    auto at = [&](int i, int j) { return vertex(A + (B - A) * i / r + (C - A) * j / r); };
    for (int i = 0; i < r; ++i)
      for (int j = 0; i + j < r; ++j) {
        m.faces.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
        if (i + j + 2 <= r) m.faces.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
      }
  }
  m.coords.resize(static_cast<Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.coords.row(static_cast<Index>(i)) = pts[i].transpose();
  detail::edges_from_faces(m);
  m.finalize();
  validate(m);
  return m;
}

inline CellComplex by_name(const std::string& builder, int n) {
  if (builder == "interval") return interval(n);
  if (builder == "circle") return circle(n);
  if (builder == "disk") return disk(n);
  if (builder == "annulus") return annulus(n);
  if (builder == "sphere") return sphere(n);
  throw InvalidInput("unknown mesh builder '" + builder + "'");
}

}  // namespace mesh

// ---------------------------------------------------------------------------
// Cochains

enum class ValueSpace { scalar, algebra, dual };

struct Cochain {
  int degree = 0;
  ValueSpace space = ValueSpace::scalar;
  int vdim = 1;
  Vec data;

  Index cells() const { return vdim ? data.size() / vdim : 0; }
  auto cell(Index i) { return data.segment(i * vdim, vdim); }
  auto cell(Index i) const { return data.segment(i * vdim, vdim); }
};

inline Cochain make_cochain(const CellComplex& m, int degree, ValueSpace space, int vdim, Vec data = Vec()) {
  require(degree >= 0 && degree <= m.dim, "cochain degree outside complex dimension");
  const Index n = m.cells(degree) * vdim;
  if (data.size() == 0) data = Vec::Zero(n);
  require(data.size() == n, "cochain data length must equal #cells x value dimension");
  return Cochain{degree, space, vdim, std::move(data)};
}

// Apply a scalar incidence matrix blockwise to cell-major data with block size d.
inline Vec apply_blockwise(const SpMat& D, const Vec& x, int d) {
  require(x.size() == D.cols() * d, "blockwise operand has wrong length");
  Eigen::Map<const Mat> X(x.data(), d, D.cols());
  Mat Y = X * D.transpose();
  return Eigen::Map<Vec>(Y.data(), Y.size());
}

inline Vec apply_blockwise_transpose(const SpMat& D, const Vec& y, int d) {
  require(y.size() == D.rows() * d, "blockwise operand has wrong length");
  Eigen::Map<const Mat> Y(y.data(), d, D.rows());
  Mat X = Y * D;
  return Eigen::Map<Vec>(X.data(), X.size());
}

inline SpMat kron_identity(const SpMat& D, int d) {
  std::vector<Triplet> t;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SpMat::InnerIterator it(D, k); it; ++it)
      for (int i = 0; i < d; ++i) t.emplace_back(it.row() * d + i, it.col() * d + i, it.value());
  SpMat out(D.rows() * d, D.cols() * d);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

inline Cochain d(const CellComplex& m, const Cochain& a) {
  require(a.degree < m.dim, "d of a top-degree cochain is rejected");
  require(a.data.size() == m.cells(a.degree) * a.vdim, "cochain shape does not match complex");
  const SpMat& D = a.degree == 0 ? m.D0 : m.D1;
  return Cochain{a.degree + 1, a.space, a.vdim, apply_blockwise(D, a.data, a.vdim)};
}

// Endpoint average of a vertex field on each edge.
inline Vec edge_average(const CellComplex& m, const Vec& xi, int d) {
  Vec out(m.ne() * d);
  for (Index e = 0; e < m.ne(); ++e)
    out.segment(e * d, d) = 0.5 * (xi.segment(m.edges[e][0] * d, d) + xi.segment(m.edges[e][1] * d, d));
  return out;
}

// (d_A xi)_e = (d xi)_e + [A_e, avg xi].
inline Vec d_twisted(const LieAlgebra& g, const CellComplex& m, const Vec& A, const Vec& xi) {
  const int d = g.dim();
  require(A.size() == m.ne() * d, "A must be an algebra-valued 1-cochain");
  require(xi.size() == m.nv() * d, "xi must be an algebra-valued 0-cochain");
  Vec out = apply_blockwise(m.D0, xi, d);
  if (g.abelian()) return out;
  const Vec xb = edge_average(m, xi, d);
  for (Index e = 0; e < m.ne(); ++e) out.segment(e * d, d) += g.bracket(A.segment(e * d, d), xb.segment(e * d, d));
  return out;
}

inline Cochain d_twisted(const LieAlgebra& g, const CellComplex& m, const Cochain& A, const Cochain& xi) {
  require(A.degree == 1 && A.space == ValueSpace::algebra, "A must be an algebra-valued 1-cochain");
  require(xi.degree == 0 && xi.space == ValueSpace::algebra, "xi must be an algebra-valued 0-cochain");
  return Cochain{1, ValueSpace::algebra, g.dim(), d_twisted(g, m, A.data, xi.data)};
}

// Sparse matrix of xi -> d_A xi.
inline SpMat d_twisted_matrix(const LieAlgebra& g, const CellComplex& m, const Vec& A) {
  const int d = g.dim();
  std::vector<Triplet> t;
  for (Index e = 0; e < m.ne(); ++e) {
    const int tl = m.edges[e][0], hd = m.edges[e][1];
    for (int i = 0; i < d; ++i) {
      t.emplace_back(e * d + i, hd * d + i, 1.0);
      t.emplace_back(e * d + i, tl * d + i, -1.0);
    }
    if (!g.abelian()) {
      const Mat ad = 0.5 * g.ad(A.segment(e * d, d));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (ad(i, j) != 0.0) {
            t.emplace_back(e * d + i, hd * d + j, ad(i, j));
            t.emplace_back(e * d + i, tl * d + j, ad(i, j));
          }
    }
  }
  SpMat out(m.ne() * d, m.nv() * d);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

// (d_A^T E)_v = sum_e D0[e,v] E_e + 1/2 sum_{e ni v} ad*(A_e) E_e.
inline Vec divergence(const LieAlgebra& g, const CellComplex& m, const Vec& A, const Vec& E) {
  const int d = g.dim();
  require(E.size() == m.ne() * d, "E must be a dual-valued edge field");
  Vec out = apply_blockwise_transpose(m.D0, E, d);
  if (g.abelian()) return out;
  for (Index e = 0; e < m.ne(); ++e) {
    const Vec w = 0.5 * g.coadjoint(A.segment(e * d, d), E.segment(e * d, d));
    out.segment(m.edges[e][0] * d, d) += w;
    out.segment(m.edges[e][1] * d, d) += w;
  }
  return out;
}

struct GreenSplit {
  Vec bulk;  // per vertex (zero at boundary vertices)
  Vec bdry;  // per boundary cell
  std::vector<double> sign;
};

// sum_e <E_e,(d_A xi)_e> = -sum_v <bulk_v, xi_v> + sum_b s_b <bdry_b, xi_b> for every xi.
inline GreenSplit green_pairing(const LieAlgebra& g, const CellComplex& m, const Vec& E, const Vec& A) {
  const int d = g.dim();
  const Vec div = divergence(g, m, A, E);
  GreenSplit s;
  s.bulk = -div;
  s.bdry = Vec::Zero(m.nb() * d);
  s.sign = m.bsign;
  for (Index i = 0; i < m.nb(); ++i) {
    const int v = m.bverts[i];
    s.bdry.segment(i * d, d) = m.bsign[i] * div.segment(v * d, d);
    s.bulk.segment(v * d, d).setZero();
  }
  return s;
}

struct GreenIdentity {
  double lhs = 0.0, rhs = 0.0, scale = 0.0;
  double residual() const { return std::abs(lhs - rhs); }
};

inline GreenIdentity green_identity(const LieAlgebra& g, const CellComplex& m, const Vec& E, const Vec& xi,
                                    const Vec& A) {
  const int d = g.dim();
  GreenIdentity r;
  const Vec dxi = d_twisted(g, m, A, xi);
  r.lhs = E.dot(dxi);
  r.scale = E.cwiseAbs().dot(dxi.cwiseAbs());
  const GreenSplit s = green_pairing(g, m, E, A);
  r.rhs = -s.bulk.dot(xi);
  for (Index i = 0; i < m.nb(); ++i) r.rhs += s.sign[i] * s.bdry.segment(i * d, d).dot(xi.segment(m.bverts[i] * d, d));
  return r;
}

// Tangential trace: restriction to boundary cells of the same degree.
inline Cochain trace_t(const CellComplex& m, const Cochain& a) {
  require(m.has_boundary(), "trace needs a nonempty boundary");
  const int d = a.vdim;
  if (a.degree == 0) {
    Vec out(m.nb() * d);
    for (Index i = 0; i < m.nb(); ++i) out.segment(i * d, d) = a.cell(m.bverts[i]);
    return Cochain{0, a.space, d, out};
  }
  if (m.dim == 1 && a.degree == 1) {
    require(a.space == ValueSpace::dual, "1D trace of a primal 1-cochain vanishes; only dual edge fields have a trace");
    Vec out(m.nb() * d);
    for (Index i = 0; i < m.nb(); ++i) out.segment(i * d, d) = a.cell(m.vertex_edges[m.bverts[i]][0]);
    return Cochain{0, a.space, d, out};
  }
  require(m.dim == 2 && a.degree == 1, "degree too high for a boundary restriction");
  Vec out(static_cast<Index>(m.bedges.size()) * d);
  for (std::size_t i = 0; i < m.bedges.size(); ++i) out.segment(static_cast<Index>(i) * d, d) = a.cell(m.bedges[i]);
  return Cochain{1, a.space, d, out};
}

// Normal trace through the unique adjacent interior cell.
inline Cochain trace_n(const CellComplex& m, const Cochain& a) {
  require(m.has_boundary(), "trace needs a nonempty boundary");
  const int d = a.vdim;
  if (m.dim == 1) {
    require(a.degree == 1, "normal trace in 1D acts on edge fields");
    Vec out(m.nb() * d);
    for (Index i = 0; i < m.nb(); ++i) out.segment(i * d, d) = m.bsign[i] * a.cell(m.vertex_edges[m.bverts[i]][0]);
    return Cochain{0, a.space, d, out};
  }
  require(a.degree == 2, "normal trace in 2D is defined for face cochains");
  Vec out(static_cast<Index>(m.bedges.size()) * d);
  for (std::size_t i = 0; i < m.bedges.size(); ++i)
    out.segment(static_cast<Index>(i) * d, d) = m.bedge_sign[i] * a.cell(m.bedge_face[i]);
  return Cochain{1, a.space, d, out};
}

// Tangential boundary differential on boundary 0-cochains (2D: along boundary edges).
inline Vec boundary_d(const CellComplex& m, const Vec& b, int d) {
  require(m.dim == 2, "boundary differential needs a 2D complex");
  Vec out(static_cast<Index>(m.bedges.size()) * d);
  for (std::size_t i = 0; i < m.bedges.size(); ++i) {
    const auto& e = m.edges[m.bedges[i]];
    out.segment(static_cast<Index>(i) * d, d) = b.segment(m.bindex[e[1]] * d, d) - b.segment(m.bindex[e[0]] * d, d);
  }
  return out;
}

// Lumped masses per cell.
inline Vec masses(const CellComplex& m, int degree, ValueSpace space) {
  Vec w;
  if (degree == 0) w = m.dual0;
  else if (degree == 1) w = m.dual1.cwiseQuotient(m.vol1);
  else w = m.vol2.cwiseInverse();
  if (space == ValueSpace::dual) w = w.cwiseInverse();
  return w;
}

inline double inner(const CellComplex& m, const LieAlgebra* g, const Cochain& a, const Cochain& b) {
  require(a.degree == b.degree && a.space == b.space && a.vdim == b.vdim, "inner needs matching cochains");
  require(a.data.size() == m.cells(a.degree) * a.vdim, "cochain shape does not match complex");
  const Vec w = masses(m, a.degree, a.space);
  double s = 0.0;
  for (Index c = 0; c < a.cells(); ++c) {
    double t;
    if (a.space == ValueSpace::scalar || g == nullptr) t = a.cell(c).dot(b.cell(c));
    else if (a.space == ValueSpace::algebra) t = a.cell(c).dot(g->pairing() * b.cell(c));
    else t = a.cell(c).dot(g->pairing_inv() * b.cell(c));
    s += w[c] * t;
  }
  return s;
}

// Mass matrix (block diagonal) for algebra-valued cochains of a given degree.
inline SpMat mass_matrix(const CellComplex& m, const LieAlgebra& g, int degree, ValueSpace space) {
  const Vec w = masses(m, degree, space);
  const Mat& P = space == ValueSpace::dual ? g.pairing_inv() : g.pairing();
  const int d = g.dim();
  std::vector<Triplet> t;
  for (Index c = 0; c < w.size(); ++c)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (P(i, j) != 0.0) t.emplace_back(c * d + i, c * d + j, w[c] * P(i, j));
  SpMat M(w.size() * d, w.size() * d);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

}  // namespace gaugelab
