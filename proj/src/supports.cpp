#include "toric/supports.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>

namespace toric {
namespace {

bool points_equal(const RatPoint& a, const RatPoint& b) {
  return a == b;
}

bool lex_less(const RatPoint& a, const RatPoint& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<RatPoint> dedup(std::vector<RatPoint> pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end(), points_equal), pts.end());
  return pts;
}

// Row-reduces the difference vectors (pts[i] - pts[0]); returns the rank and
// the pivot columns, which identify a coordinate subset on which the affine
// hull projects bijectively.
struct AffineBasis {
  int rank = 0;
  std::vector<int> pivot_cols;
  std::vector<int> basis_rows;  // indices i with pts[i]-pts[0] independent
};

AffineBasis affine_basis(const std::vector<RatPoint>& pts) {
  AffineBasis out;
  if (pts.empty()) return out;
  const int n = static_cast<int>(pts[0].size());
  std::vector<RatPoint> rows;
  std::vector<int> row_src;
  for (size_t i = 1; i < pts.size(); ++i) {
    RatPoint d(n);
    for (int j = 0; j < n; ++j) d[j] = pts[i][j] - pts[0][j];
    rows.push_back(std::move(d));
    row_src.push_back(static_cast<int>(i));
  }
  std::vector<bool> used(rows.size(), false);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (!used[r] && rows[r][col] != Rat(0)) { pivot = static_cast<int>(r); break; }
    }
    if (pivot < 0) continue;
    used[pivot] = true;
    out.pivot_cols.push_back(col);
    out.basis_rows.push_back(row_src[pivot]);
    ++out.rank;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(r) == pivot || rows[r][col] == Rat(0)) continue;
      Rat factor = rows[r][col] / rows[pivot][col];
      for (int j = col; j < n; ++j) rows[r][j] -= factor * rows[pivot][j];
    }
  }
  return out;
}

// ---- 2D hull: monotone chain, exact cross products ----

Rat cross2(const RatPoint& o, const RatPoint& a, const RatPoint& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<RatPoint> hull2d(std::vector<RatPoint> pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end(), points_equal), pts.end());
  const size_t m = pts.size();
  std::vector<RatPoint> h(2 * m);
  size_t k = 0;
  for (size_t i = 0; i < m; ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= Rat(0)) --k;
    h[k++] = pts[i];
  }
  for (size_t i = m - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= Rat(0)) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;  // counter-clockwise
}

Rat shoelace_twice(const std::vector<RatPoint>& ccw) {
  Rat s(0);
  const size_t m = ccw.size();
  for (size_t i = 0; i < m; ++i) {
    const RatPoint& a = ccw[i];
    const RatPoint& b = ccw[(i + 1) % m];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return s;  // = 2 * area, positive for CCW
}

// ---- 3D hull: incremental with exact orientation tests ----

Rat det3(const RatPoint& u, const RatPoint& v, const RatPoint& w) {
  return u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
         u[2] * (v[0] * w[1] - v[1] * w[0]);
}

RatPoint sub(const RatPoint& a, const RatPoint& b) {
  RatPoint d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

struct Facet {
  std::array<int, 3> v;  // indices, oriented so interior points give side < 0
  bool alive = true;
};

Rat facet_side(const std::vector<RatPoint>& pts, const Facet& f, const RatPoint& x) {
  return det3(sub(pts[f.v[1]], pts[f.v[0]]), sub(pts[f.v[2]], pts[f.v[0]]),
              sub(x, pts[f.v[0]]));
}

struct Hull3 {
  std::vector<Facet> facets;     // alive ones triangulate the boundary
  std::vector<int> vertex_ids;   // extreme point indices
};

Hull3 hull3d(const std::vector<RatPoint>& pts, const AffineBasis& ab) {
  // Initial tetrahedron from the affine basis rows.
  std::vector<int> init = {0, ab.basis_rows[0], ab.basis_rows[1], ab.basis_rows[2]};
  RatPoint centroid(3, Rat(0));
  for (int id : init)
    for (int j = 0; j < 3; ++j) centroid[j] += pts[id][j] / Rat(4);

  Hull3 h;
  auto add_facet = [&](int a, int b, int c) {
    Facet f{{a, b, c}, true};
    if (facet_side(pts, f, centroid) > Rat(0)) std::swap(f.v[1], f.v[2]);
    h.facets.push_back(f);
  };
  add_facet(init[0], init[1], init[2]);
  add_facet(init[0], init[1], init[3]);
  add_facet(init[0], init[2], init[3]);
  add_facet(init[1], init[2], init[3]);

  std::set<int> init_set(init.begin(), init.end());
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    if (init_set.count(i)) continue;
    std::vector<int> visible;
    for (int fi = 0; fi < static_cast<int>(h.facets.size()); ++fi) {
      if (!h.facets[fi].alive) continue;
      if (facet_side(pts, h.facets[fi], pts[i]) > Rat(0)) visible.push_back(fi);
    }
    if (visible.empty()) continue;  // inside or on the current hull
    // Horizon = undirected edges used exactly once by the visible set.
    std::map<std::pair<int, int>, int> edge_count;
    for (int fi : visible) {
      const auto& v = h.facets[fi].v;
      for (int e = 0; e < 3; ++e) {
        int a = v[e], b = v[(e + 1) % 3];
        if (a > b) std::swap(a, b);
        edge_count[{a, b}]++;
      }
      h.facets[fi].alive = false;
    }
    for (const auto& [edge, cnt] : edge_count) {
      if (cnt == 1) add_facet(edge.first, edge.second, i);
    }
  }

  std::set<int> verts;
  for (const auto& f : h.facets)
    if (f.alive) verts.insert(f.v.begin(), f.v.end());

  // The triangulation may retain points lying inside facets or edges; keep
  // only points whose active facet planes have normals of full rank 3.
  std::vector<RatPoint> normals_all;
  std::vector<std::vector<int>> plane_of_vertex;
  std::map<int, std::vector<RatPoint>> active_normals;
  for (const auto& f : h.facets) {
    if (!f.alive) continue;
    RatPoint nrm(3);
    RatPoint e1 = sub(pts[f.v[1]], pts[f.v[0]]);
    RatPoint e2 = sub(pts[f.v[2]], pts[f.v[0]]);
    nrm[0] = e1[1] * e2[2] - e1[2] * e2[1];
    nrm[1] = e1[2] * e2[0] - e1[0] * e2[2];
    nrm[2] = e1[0] * e2[1] - e1[1] * e2[0];
    for (int vid : f.v) active_normals[vid].push_back(nrm);
  }
  for (int vid : verts) {
    // Coplanar facets contribute parallel normals; rank over all of them is
    // the same as over the distinct planes.
    std::vector<RatPoint> rows = active_normals[vid];
    int rank = 0;
    for (int col = 0; col < 3 && rank < static_cast<int>(rows.size()); ++col) {
      int pivot = -1;
      for (int r = rank; r < static_cast<int>(rows.size()); ++r)
        if (rows[r][col] != Rat(0)) { pivot = r; break; }
      if (pivot < 0) continue;
      std::swap(rows[rank], rows[pivot]);
      for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
        if (r == rank || rows[r][col] == Rat(0)) continue;
        Rat factor = rows[r][col] / rows[rank][col];
        for (int j = col; j < 3; ++j) rows[r][j] -= factor * rows[rank][j];
      }
      ++rank;
    }
    if (rank == 3) h.vertex_ids.push_back(vid);
  }
  std::sort(h.vertex_ids.begin(), h.vertex_ids.end());
  return h;
}

Rat hull3d_volume_six(const std::vector<RatPoint>& pts, const Hull3& h) {
  // Divergence-theorem fan from pts of first live facet vertex; outward
  // orientation makes every term nonnegative in total.
  Rat six_vol(0);
  const RatPoint o = pts[h.facets[0].v[0]];
  for (const auto& f : h.facets) {
    if (!f.alive) continue;
    six_vol += det3(sub(pts[f.v[0]], o), sub(pts[f.v[1]], o), sub(pts[f.v[2]], o));
  }
  if (six_vol < Rat(0)) six_vol = -six_vol;
  return six_vol;
}

// Maps a degenerate point set into its pivot-coordinate chart, hulls there,
// and pulls the vertex choice back. Linear isomorphisms preserve extremality.
Polytope hull_degenerate(const std::vector<RatPoint>& pts, const AffineBasis& ab,
                         int ambient) {
  Polytope out;
  out.ambient = ambient;
  out.dim = ab.rank;
  if (ab.rank == 0) {
    out.vertices = {pts[0]};
    return out;
  }
  std::vector<RatPoint> proj(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    RatPoint q(ab.rank);
    for (int j = 0; j < ab.rank; ++j) q[j] = pts[i][ab.pivot_cols[j]];
    proj[i] = std::move(q);
  }
  Polytope sub_hull = convex_hull(proj);
  // Recover originals by matching projected coordinates (projection is
  // injective on the affine hull, so the match is unique among inputs).
  for (const auto& v : sub_hull.vertices) {
    for (size_t i = 0; i < pts.size(); ++i) {
      if (proj[i] == v) { out.vertices.push_back(pts[i]); break; }
    }
  }
  out.vertices = dedup(out.vertices);
  return out;
}

}  // namespace

Polytope convex_hull(const std::vector<RatPoint>& points) {
  if (points.empty()) throw ValidationError("convex_hull: empty point set");
  const int n = static_cast<int>(points[0].size());
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != n)
      throw ValidationError("convex_hull: inconsistent point dimensions");
  std::vector<RatPoint> pts = dedup(points);

  Polytope out;
  out.ambient = n;
  AffineBasis ab = affine_basis(pts);
  if (ab.rank < n || n > 3) {
    if (ab.rank == n)
      throw ValidationError("convex_hull: ambient dimension > 3 not supported");
    return hull_degenerate(pts, ab, n);
  }
  out.dim = n;
  if (n == 1) {
    out.vertices = {pts.front(), pts.back()};  // pts sorted by dedup
  } else if (n == 2) {
    out.vertices = hull2d(pts);
  } else {
    Hull3 h = hull3d(pts, ab);
    for (int id : h.vertex_ids) out.vertices.push_back(pts[id]);
  }
  return out;
}

Rat normalized_volume(const Polytope& p) {
  if (p.dim < p.ambient) return Rat(0);
  const int n = p.ambient;
  if (n == 1) {
    Rat lo = p.vertices[0][0], hi = lo;
    for (const auto& v : p.vertices) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    return hi - lo;
  }
  if (n == 2) {
    std::vector<RatPoint> ccw = hull2d(p.vertices);
    return shoelace_twice(ccw);  // 2! * Lebesgue
  }
  if (n == 3) {
    AffineBasis ab = affine_basis(dedup(p.vertices));
    Hull3 h = hull3d(dedup(p.vertices), ab);
    return hull3d_volume_six(dedup(p.vertices), h);  // 3! * Lebesgue
  }
  throw ValidationError("normalized_volume: ambient dimension > 3 not supported");
}

Polytope minkowski_sum(const Polytope& a, const Polytope& b) {
  if (a.ambient != b.ambient)
    throw ValidationError("minkowski_sum: ambient dimensions differ");
  std::vector<RatPoint> sums;
  sums.reserve(a.vertices.size() * b.vertices.size());
  for (const auto& u : a.vertices)
    for (const auto& v : b.vertices) {
      RatPoint s(a.ambient);
      for (int j = 0; j < a.ambient; ++j) s[j] = u[j] + v[j];
      sums.push_back(std::move(s));
    }
  return convex_hull(sums);
}

Rat mixed_volume_oracle(const std::vector<Polytope>& ps) {
  const int n = static_cast<int>(ps.size());
  if (n == 0) throw ValidationError("mixed_volume_oracle: no polytopes");
  for (const auto& p : ps)
    if (p.ambient != n)
      throw ValidationError("mixed_volume_oracle: ambient dimension must equal count");
  if (n > 3) throw ValidationError("mixed_volume_oracle: n > 3 not supported");
  // Sum over nonempty subsets of Lebesgue volumes of Minkowski sums. With
  // Lebesgue normalization this polarization already satisfies
  // MV(P,..,P) = n! * Leb(P) = normalized_volume(P).
  Rat total(0);
  const Rat nfact(n == 1 ? 1 : (n == 2 ? 2 : 6));
  for (int mask = 1; mask < (1 << n); ++mask) {
    Polytope acc;
    bool first = true;
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1 << i))) continue;
      acc = first ? ps[i] : minkowski_sum(acc, ps[i]);
      first = false;
    }
    Rat leb = normalized_volume(acc) / nfact;
    int sign = ((n - __builtin_popcount(mask)) % 2 == 0) ? 1 : -1;
    total += Rat(sign) * leb;
  }
  return total;
}

std::vector<HalfSpace> facet_halfspaces(const Polytope& p) {
  if (p.dim != p.ambient)
    throw ValidationError("facet_halfspaces: polytope not full-dimensional");
  const int n = p.ambient;
  std::vector<HalfSpace> out;
  auto as_vec = [&](const RatPoint& q) {
    Vec v(n);
    for (int j = 0; j < n; ++j) v[j] = boost::rational_cast<double>(q[j]);
    return v;
  };
  if (n == 1) {
    double lo = as_vec(p.vertices[0])[0], hi = lo;
    for (const auto& v : p.vertices) {
      lo = std::min(lo, as_vec(v)[0]);
      hi = std::max(hi, as_vec(v)[0]);
    }
    HalfSpace a, b;
    a.normal = Vec::Constant(1, 1.0); a.offset = hi;
    b.normal = Vec::Constant(1, -1.0); b.offset = -lo;
    return {a, b};
  }
  if (n == 2) {
    std::vector<RatPoint> ccw = hull2d(p.vertices);
    for (size_t i = 0; i < ccw.size(); ++i) {
      Vec a = as_vec(ccw[i]), b = as_vec(ccw[(i + 1) % ccw.size()]);
      Vec e = b - a;
      Vec nrm(2);
      nrm << e[1], -e[0];  // outward for CCW order
      nrm.normalize();
      out.push_back({nrm, nrm.dot(a)});
    }
    return out;
  }
  std::vector<RatPoint> pts = dedup(p.vertices);
  Hull3 h = hull3d(pts, affine_basis(pts));
  std::vector<std::pair<Vec, double>> seen;
  for (const auto& f : h.facets) {
    if (!f.alive) continue;
    Vec a = as_vec(pts[f.v[0]]), b = as_vec(pts[f.v[1]]), c = as_vec(pts[f.v[2]]);
    Eigen::Vector3d nrm = Eigen::Vector3d(b - a).cross(Eigen::Vector3d(c - a));
    if (nrm.norm() == 0.0) continue;
    nrm.normalize();
    double off = nrm.dot(a);
    bool dup = false;
    for (const auto& [sn, so] : seen)
      if ((sn - Vec(nrm)).norm() < 1e-12 && std::abs(so - off) < 1e-12) dup = true;
    if (!dup) {
      seen.push_back({Vec(nrm), off});
      out.push_back({Vec(nrm), off});
    }
  }
  return out;
}

double interior_distance(const std::vector<HalfSpace>& facets, const Vec& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& f : facets) d = std::min(d, f.offset - f.normal.dot(x));
  return d;
}

Support Support::from_rows(const IMat& rows) {
  if (rows.rows() < 1 || rows.cols() < 1)
    throw ValidationError("Support: need at least one row and one column");
  for (int i = 0; i < rows.rows(); ++i)
    for (int k = i + 1; k < rows.rows(); ++k)
      if (rows.row(i) == rows.row(k))
        throw ValidationError("Support: rows must be pairwise distinct");
  Support s;
  s.exponents = rows;
  std::vector<RatPoint> pts;
  for (int i = 0; i < rows.rows(); ++i) {
    RatPoint q(rows.cols());
    for (int j = 0; j < rows.cols(); ++j) q[j] = Rat(rows(i, j));
    pts.push_back(std::move(q));
  }
  s.full_dim = affine_basis(dedup(pts)).rank == rows.cols();
  return s;
}

Polytope newton_polytope(const Support& s) {
  std::vector<RatPoint> pts;
  for (int i = 0; i < s.rows(); ++i) {
    RatPoint q(s.n());
    for (int j = 0; j < s.n(); ++j) q[j] = Rat(s.exponents(i, j));
    pts.push_back(std::move(q));
  }
  return convex_hull(pts);
}

RatPoint rat_point(std::initializer_list<long long> coords) {
  RatPoint p;
  for (long long c : coords) p.push_back(Rat(c));
  return p;
}

Polytope lattice_polytope(const std::vector<std::vector<long long>>& points) {
  std::vector<RatPoint> pts;
  for (const auto& row : points) {
    RatPoint p;
    for (long long c : row) p.push_back(Rat(c));
    pts.push_back(std::move(p));
  }
  return convex_hull(pts);
}

}  // namespace toric
