#include "toric/randsys.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace toric {
namespace {

// Box-Muller on explicit uniforms keeps sampling independent of the standard
// library's normal_distribution implementation.
struct Gauss {
  std::mt19937_64 eng;
  explicit Gauss(std::uint64_t seed) : eng(seed) {}
  double uniform() {
    // in (0, 1]
    return (static_cast<double>(eng() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
  }
  Complex complex_normal() {
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
  }
  double real_normal() {
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }
};

}  // namespace

bool Ensemble::unmixed() const {
  for (int i = 1; i < n(); ++i) {
    if (supports[i].exponents != supports[0].exponents) return false;
    if (covariances[i].weights != covariances[0].weights) return false;
  }
  return true;
}

Ensemble Ensemble::make(std::vector<Support> s, std::vector<DiagonalCovariance> c,
                        Field f) {
  if (s.empty() || s.size() != c.size())
    throw ValidationError("ensemble: need matching support/covariance lists");
  const int n = static_cast<int>(s.size());
  for (const auto& sup : s)
    if (sup.n() != n)
      throw ValidationError("ensemble: support ambient dimension must equal system size");
  for (size_t i = 0; i < s.size(); ++i)
    if (c[i].weights.size() != s[i].rows())
      throw ValidationError("ensemble: covariance length mismatch");
  return Ensemble{std::move(s), std::move(c), f};
}

Ensemble Ensemble::linear(int n, Field f) {
  IMat rows = IMat::Zero(n + 1, n);
  for (int j = 0; j < n; ++j) rows(j + 1, j) = 1;
  Support s = Support::from_rows(rows);
  std::vector<Support> ss(n, s);
  std::vector<DiagonalCovariance> cc(n, DiagonalCovariance::identity(n + 1));
  return make(std::move(ss), std::move(cc), f);
}

Ensemble Ensemble::unmixed_from(const Support& s, const DiagonalCovariance& c, int n,
                                Field f) {
  return make(std::vector<Support>(n, s), std::vector<DiagonalCovariance>(n, c), f);
}

double SparseSystem::norm() const {
  double acc = 0.0;
  for (const auto& v : coeffs) acc += v.squaredNorm();
  return std::sqrt(acc);
}

SparseSystem sample(const Ensemble& e, std::uint64_t seed) {
  Gauss g(seed);
  SparseSystem f;
  for (int i = 0; i < e.n(); ++i) {
    CVec v(e.supports[i].rows());
    for (int a = 0; a < v.size(); ++a)
      v[a] = e.field == Field::Complex ? g.complex_normal()
                                       : Complex(g.real_normal(), 0.0);
    f.coeffs.push_back(std::move(v));
  }
  return f;
}

CVec evaluate(const SparseSystem& f, const Ensemble& e, const TorusPoint& z) {
  if (f.n() != e.n()) throw ValidationError("evaluate: system/ensemble mismatch");
  CVec out(e.n());
  for (int i = 0; i < e.n(); ++i) {
    CVec vh = veronese_hat(e.supports[i], e.covariances[i], z);
    out[i] = f.coeffs[i].transpose() * vh;  // bilinear, no conjugation
  }
  return out;
}

CVec evaluate_scaled(const SparseSystem& f, const Ensemble& e, const TorusPoint& z) {
  CVec out(e.n());
  for (int i = 0; i < e.n(); ++i) {
    KahlerFrame fr = make_frame(e.supports[i], e.covariances[i], z);
    out[i] = f.coeffs[i].transpose() * fr.unit;
  }
  return out;
}

double dp_distance(const SparseSystem& f, const SparseSystem& g) {
  if (f.n() != g.n()) throw ValidationError("dp_distance: size mismatch");
  double acc = 0.0;
  for (int i = 0; i < f.n(); ++i) {
    double nf = f.coeffs[i].squaredNorm(), ng = g.coeffs[i].squaredNorm();
    if (nf == 0.0 || ng == 0.0)
      throw ValidationError("dp_distance: zero component vector");
    Complex inner = (f.coeffs[i].adjoint() * g.coeffs[i])(0, 0);
    double sin2 = 1.0 - std::norm(inner) / (nf * ng);
    acc += std::max(0.0, sin2);
  }
  return std::sqrt(acc);
}

double Box::volume() const {
  double v = 1.0;
  for (const auto& iv : p) v *= iv.length();
  for (const auto& iv : q) v *= iv.length();
  return v;
}

double Box::p_volume() const {
  double v = 1.0;
  for (const auto& iv : p) v *= iv.length();
  return v;
}

Region Region::from_boxes(std::vector<Box> raw, int n) {
  Region r;
  r.n = n;
  for (const auto& b : raw) {
    if (static_cast<int>(b.p.size()) != n || static_cast<int>(b.q.size()) != n)
      throw ValidationError("region: box dimension mismatch");
    for (const auto& iv : b.p)
      if (!(iv.lo <= iv.hi)) throw ValidationError("region: empty p interval");
    for (const auto& iv : b.q) {
      if (!(iv.lo <= iv.hi)) throw ValidationError("region: empty q interval");
      if (iv.lo < 0.0 || iv.hi > kTwoPi)
        throw ValidationError("region: q interval must lie within [0, 2*pi)");
    }
  }
  if (raw.empty()) return r;
  if (raw.size() == 1) {
    r.boxes = std::move(raw);
    return r;
  }
  // Fragment along every breakpoint per axis, then keep covered cells once.
  const int d = 2 * n;
  auto coord = [&](const Box& b, int axis) -> const Interval& {
    return axis < n ? b.p[axis] : b.q[axis - n];
  };
  std::vector<std::vector<double>> cuts(d);
  for (const auto& b : raw)
    for (int a = 0; a < d; ++a) {
      cuts[a].push_back(coord(b, a).lo);
      cuts[a].push_back(coord(b, a).hi);
    }
  for (auto& c : cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::vector<int> idx(d, 0);
  std::vector<Box> cells;
  while (true) {
    bool valid = true;
    for (int a = 0; a < d; ++a)
      if (idx[a] + 1 >= static_cast<int>(cuts[a].size())) valid = false;
    if (valid) {
      Box cell;
      cell.p.resize(n);
      cell.q.resize(n);
      for (int a = 0; a < d; ++a) {
        Interval iv{cuts[a][idx[a]], cuts[a][idx[a] + 1]};
        if (a < n) cell.p[a] = iv; else cell.q[a - n] = iv;
      }
      for (const auto& b : raw) {
        bool inside = true;
        for (int a = 0; a < d; ++a) {
          double mid = 0.5 * (coord(cell, a).lo + coord(cell, a).hi);
          if (!std::isfinite(mid))
            mid = std::isfinite(coord(cell, a).lo) ? coord(cell, a).lo + 1.0
                                                   : coord(cell, a).hi - 1.0;
          if (!coord(b, a).contains(mid)) { inside = false; break; }
        }
        if (inside) { cells.push_back(cell); break; }
      }
    }
    int a = d - 1;
    while (a >= 0) {
      if (++idx[a] + 1 < static_cast<int>(cuts[a].size())) break;
      idx[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
  r.boxes = std::move(cells);
  return r;
}

Region Region::full_q(std::vector<Interval> p_box) {
  const int n = static_cast<int>(p_box.size());
  Box b;
  b.p = std::move(p_box);
  b.q.assign(n, Interval{0.0, kTwoPi});
  return from_boxes({b}, n);
}

Region Region::all(int n) {
  const double inf = std::numeric_limits<double>::infinity();
  return full_q(std::vector<Interval>(n, Interval{-inf, inf}));
}

double Region::volume() const {
  double v = 0.0;
  for (const auto& b : boxes) v += b.volume();
  return v;
}

double Region::p_volume() const {
  double v = 0.0;
  for (const auto& b : boxes) v += b.p_volume();
  return v;
}

bool Region::p_bounded() const {
  for (const auto& b : boxes)
    for (const auto& iv : b.p)
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) return false;
  return true;
}

bool Region::contains(const TorusPoint& z) const {
  for (const auto& b : boxes) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) ok = b.p[j].contains(z.p[j]);
    for (int j = 0; j < n && ok; ++j) {
      double qq = std::fmod(z.q[j], kTwoPi);
      if (qq < 0) qq += kTwoPi;
      ok = b.q[j].contains(qq);
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace toric
