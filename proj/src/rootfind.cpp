#include "toric/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace toric {
namespace {

constexpr double kMergeTol = 1e-6;
constexpr double kResidualTol = 1e-8;
constexpr double kEscapeLo = 1e-12;
constexpr double kEscapeHi = 1e12;

double q_dist(double a, double b) {
  double d = std::abs(std::fmod(a - b, kTwoPi));
  return std::min(d, kTwoPi - d);
}

bool same_root(const TorusPoint& a, const TorusPoint& b) {
  for (int j = 0; j < a.n(); ++j) {
    if (std::abs(a.p[j] - b.p[j]) > kMergeTol) return false;
    if (q_dist(a.q[j], b.q[j]) > kMergeTol) return false;
  }
  return true;
}

void merge_and_sort(RootList& rl) {
  std::vector<TorusPoint> merged;
  std::vector<double> res;
  for (size_t i = 0; i < rl.roots.size(); ++i) {
    bool dup = false;
    for (size_t k = 0; k < merged.size(); ++k) {
      if (same_root(rl.roots[i], merged[k])) {
        dup = true;
        rl.multiplicity_flag = true;
        res[k] = std::min(res[k], rl.residuals[i]);
        break;
      }
    }
    if (!dup) {
      merged.push_back(rl.roots[i]);
      res.push_back(rl.residuals[i]);
    }
  }
  std::vector<int> order(merged.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    for (int j = 0; j < merged[a].n(); ++j) {
      if (merged[a].p[j] != merged[b].p[j]) return merged[a].p[j] < merged[b].p[j];
      if (merged[a].q[j] != merged[b].q[j]) return merged[a].q[j] < merged[b].q[j];
    }
    return false;
  });
  rl.roots.clear();
  rl.residuals.clear();
  for (int i : order) {
    rl.roots.push_back(merged[i]);
    rl.residuals.push_back(res[i]);
  }
}

// ---- dense univariate helpers ----

Complex poly_eval(const std::vector<Complex>& c, Complex x) {
  Complex acc = 0.0;
  for (size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

Complex poly_deriv_eval(const std::vector<Complex>& c, Complex x) {
  Complex acc = 0.0;
  for (size_t k = c.size(); k-- > 1;) acc = acc * x + double(k) * c[k];
  return acc;
}

std::vector<Complex> companion_roots(std::vector<Complex> c) {
  // strip negligible leading coefficients
  double top = 0.0;
  for (const auto& v : c) top = std::max(top, std::abs(v));
  while (c.size() > 1 && std::abs(c.back()) < 1e-13 * top) c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  if (d < 1) return {};
  CMat comp = CMat::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[i] / c[d];
  Eigen::ComplexEigenSolver<CMat> es(comp);
  std::vector<Complex> roots(es.eigenvalues().data(),
                             es.eigenvalues().data() + d);
  // Newton polish on the dense polynomial.
  for (auto& x : roots) {
    for (int it = 0; it < 20; ++it) {
      Complex dp = poly_deriv_eval(c, x);
      if (std::abs(dp) == 0.0) break;
      Complex step = poly_eval(c, x) / dp;
      x -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
  }
  return roots;
}

// ---- bivariate machinery ----

struct Term {
  int a1 = 0, a2 = 0;
  Complex c;
};

using TermList = std::vector<Term>;

TermList whiten_terms(const CVec& coeffs, const Support& s,
                      const DiagonalCovariance& c) {
  TermList t;
  for (int a = 0; a < s.rows(); ++a) {
    Term tm;
    tm.a1 = s.exponents(a, 0);
    tm.a2 = s.n() > 1 ? s.exponents(a, 1) : 0;
    tm.c = coeffs[a] * std::sqrt(c.weights[a]);
    t.push_back(tm);
  }
  return t;
}

void shift_to_origin(TermList& t) {
  int m1 = t[0].a1, m2 = t[0].a2;
  for (const auto& tm : t) { m1 = std::min(m1, tm.a1); m2 = std::min(m2, tm.a2); }
  for (auto& tm : t) { tm.a1 -= m1; tm.a2 -= m2; }
}

Complex eval_terms(const TermList& t, Complex x1, Complex x2) {
  Complex acc = 0.0;
  for (const auto& tm : t)
    acc += tm.c * std::pow(x1, tm.a1) * std::pow(x2, tm.a2);
  return acc;
}

Complex eval_terms_d(const TermList& t, Complex x1, Complex x2, int var) {
  Complex acc = 0.0;
  for (const auto& tm : t) {
    int a = var == 0 ? tm.a1 : tm.a2;
    if (a == 0) continue;
    Complex mono = var == 0 ? std::pow(x1, tm.a1 - 1) * std::pow(x2, tm.a2)
                            : std::pow(x1, tm.a1) * std::pow(x2, tm.a2 - 1);
    acc += tm.c * double(a) * mono;
  }
  return acc;
}

// Coefficients in the main variable, each entry a dense poly in the parameter.
std::vector<std::vector<Complex>> as_main_poly(const TermList& t, int main_var) {
  int dm = 0, dp = 0;
  for (const auto& tm : t) {
    dm = std::max(dm, main_var == 0 ? tm.a1 : tm.a2);
    dp = std::max(dp, main_var == 0 ? tm.a2 : tm.a1);
  }
  std::vector<std::vector<Complex>> out(dm + 1, std::vector<Complex>(dp + 1, 0.0));
  for (const auto& tm : t) {
    int km = main_var == 0 ? tm.a1 : tm.a2;
    int kp = main_var == 0 ? tm.a2 : tm.a1;
    out[km][kp] += tm.c;
  }
  return out;
}

struct PencilResult {
  bool ok = false;
  std::vector<Complex> params;  // candidate values of the parameter variable
};

// Sylvester matrix in the main variable; entries are polynomials in the
// parameter. Singularity values come from a companion-style linearization of
// the matrix polynomial, solved by shift-and-invert.
PencilResult pencil_parameter_values(const std::vector<std::vector<Complex>>& p1,
                                     const std::vector<std::vector<Complex>>& p2) {
  PencilResult out;
  const int d1 = static_cast<int>(p1.size()) - 1;
  const int d2 = static_cast<int>(p2.size()) - 1;
  if (d1 < 1 || d2 < 1) return out;
  int e = 0;
  for (const auto& row : p1) e = std::max(e, static_cast<int>(row.size()) - 1);
  for (const auto& row : p2) e = std::max(e, static_cast<int>(row.size()) - 1);
  const int nn = d1 + d2;

  auto sylvester_coeff = [&](int m) {
    CMat s = CMat::Zero(nn, nn);
    auto coef = [&](const std::vector<std::vector<Complex>>& p, int k) {
      if (k < 0 || k >= static_cast<int>(p.size())) return Complex(0.0);
      if (m >= static_cast<int>(p[k].size())) return Complex(0.0);
      return p[k][m];
    };
    for (int r = 0; r < d2; ++r)
      for (int k = 0; k <= d1; ++k) s(r, r + k) = coef(p1, d1 - k);
    for (int r = 0; r < d1; ++r)
      for (int k = 0; k <= d2; ++k) s(d2 + r, r + k) = coef(p2, d2 - k);
    return s;
  };

  std::vector<CMat> sm(e + 1);
  for (int m = 0; m <= e; ++m) sm[m] = sylvester_coeff(m);

  const int big = nn * std::max(1, e);
  CMat c0 = CMat::Zero(big, big), c1 = CMat::Zero(big, big);
  if (e == 0) return out;  // parameter absent; degenerate setup
  for (int j = 0; j + 1 < e; ++j)
    c0.block(j * nn, (j + 1) * nn, nn, nn) = CMat::Identity(nn, nn);
  for (int m = 0; m < e; ++m)
    c0.block((e - 1) * nn, m * nn, nn, nn) = -sm[m];
  for (int j = 0; j + 1 < e; ++j)
    c1.block(j * nn, j * nn, nn, nn) = CMat::Identity(nn, nn);
  c1.block((e - 1) * nn, (e - 1) * nn, nn, nn) = sm[e];

  const Complex sigma(0.43712, 0.29184);  // arbitrary deterministic shift
  CMat m = c0 - sigma * c1;
  Eigen::PartialPivLU<CMat> lu(m);
  CMat u = lu.matrixLU().triangularView<Eigen::Upper>();
  double umax = 0.0, umin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < big; ++i) {
    umax = std::max(umax, std::abs(u(i, i)));
    umin = std::min(umin, std::abs(u(i, i)));
  }
  if (!(umax > 0.0) || umin / umax < 1e-13) return out;
  CMat t = lu.solve(c1);
  if (!t.allFinite()) return out;
  Eigen::ComplexEigenSolver<CMat> es(t);
  if (es.info() != Eigen::Success) return out;
  for (int i = 0; i < big; ++i) {
    Complex mu = es.eigenvalues()[i];
    if (std::abs(mu) < 1e-10) continue;  // parameter value at infinity
    out.params.push_back(sigma + 1.0 / mu);
  }
  out.ok = true;
  return out;
}

bool newton2(const TermList& t1, const TermList& t2, Complex& x1, Complex& x2) {
  for (int it = 0; it < 40; ++it) {
    Eigen::Vector2cd f;
    f << eval_terms(t1, x1, x2), eval_terms(t2, x1, x2);
    Eigen::Matrix2cd j;
    j << eval_terms_d(t1, x1, x2, 0), eval_terms_d(t1, x1, x2, 1),
        eval_terms_d(t2, x1, x2, 0), eval_terms_d(t2, x1, x2, 1);
    if (!f.allFinite() || !j.allFinite()) return false;
    Eigen::Vector2cd step = j.fullPivLu().solve(f);
    if (!step.allFinite()) return false;
    x1 -= step[0];
    x2 -= step[1];
    if (step.norm() < 1e-14 * (1.0 + std::abs(x1) + std::abs(x2))) return true;
  }
  return true;  // let the residual filter decide
}

struct Attempt {
  TermList t1, t2;
  IMat backmap;  // 2x2 unimodular U with new exponents a' = U a
};

TermList transform_terms(const TermList& t, const IMat& u) {
  TermList out = t;
  for (auto& tm : out) {
    int b1 = u(0, 0) * tm.a1 + u(0, 1) * tm.a2;
    int b2 = u(1, 0) * tm.a1 + u(1, 1) * tm.a2;
    tm.a1 = b1;
    tm.a2 = b2;
  }
  shift_to_origin(out);
  return out;
}

}  // namespace

RootList univariate_roots(const SparseSystem& f, const Support& s,
                          const DiagonalCovariance& c) {
  if (s.n() != 1) throw ValidationError("univariate_roots: support must be 1-d");
  if (f.n() != 1) throw ValidationError("univariate_roots: system must have 1 equation");
  int lo = s.exponents.col(0).minCoeff();
  int hi = s.exponents.col(0).maxCoeff();
  std::vector<Complex> dense(hi - lo + 1, 0.0);
  for (int a = 0; a < s.rows(); ++a)
    dense[s.exponents(a, 0) - lo] += f.coeffs[0][a] * std::sqrt(c.weights[a]);
  double top = 0.0;
  for (const auto& v : dense) top = std::max(top, std::abs(v));
  if (top == 0.0) throw ValidationError("univariate_roots: zero polynomial");
  // trailing near-zero coefficients put roots at zero; drop them
  size_t first = 0;
  while (first + 1 < dense.size() && std::abs(dense[first]) < 1e-13 * top) ++first;
  dense.erase(dense.begin(), dense.begin() + first);

  RootList rl;
  Ensemble one = Ensemble::make({s}, {c}, Field::Complex);
  double fnorm = f.norm();
  for (Complex x : companion_roots(dense)) {
    double ax = std::abs(x);
    if (!(ax >= kEscapeLo && ax <= kEscapeHi)) {
      ++rl.boundary_escapes;
      continue;
    }
    Vec p(1), q(1);
    p[0] = std::log(ax);
    q[0] = std::arg(x);
    TorusPoint z(p, q);
    double res = evaluate_scaled(f, one, z).norm() / fnorm;
    if (res > kResidualTol) {
      rl.degenerate_flag = true;
      continue;
    }
    rl.roots.push_back(z);
    rl.residuals.push_back(res);
  }
  merge_and_sort(rl);
  return rl;
}

RootList bivariate_roots(const SparseSystem& f, const Ensemble& e) {
  if (e.n() != 2) throw ValidationError("bivariate_roots: need n = 2");
  for (const auto& s : e.supports)
    if (!s.full_dim)
      throw ValidationError("bivariate_roots: supports must be full-dimensional");
  TermList base1 = whiten_terms(f.coeffs[0], e.supports[0], e.covariances[0]);
  TermList base2 = whiten_terms(f.coeffs[1], e.supports[1], e.covariances[1]);
  shift_to_origin(base1);
  shift_to_origin(base2);

  // Retry ladder: hide x1, hide x2, then two unimodular exponent changes.
  IMat id(2, 2), sh1(2, 2), sh2(2, 2);
  id << 1, 0, 0, 1;
  sh1 << 1, 1, 0, 1;
  sh2 << 1, 0, 1, 1;
  struct Plan { IMat u; int param_var; };
  std::vector<Plan> plans = {{id, 0}, {id, 1}, {sh1, 0}, {sh2, 1}};

  double fnorm = f.norm();
  for (const auto& plan : plans) {
    RootList rl;
    TermList t1 = transform_terms(base1, plan.u);
    TermList t2 = transform_terms(base2, plan.u);
    int main_var = 1 - plan.param_var;
    auto p1 = as_main_poly(t1, main_var);
    auto p2 = as_main_poly(t2, main_var);
    PencilResult pr = pencil_parameter_values(p1, p2);
    if (!pr.ok) continue;

    // Unique parameter values; back-substitution recovers all main roots.
    std::vector<Complex> params;
    for (Complex v : pr.params) {
      bool dup = false;
      for (Complex w : params)
        if (std::abs(v - w) < 1e-9 * (1.0 + std::abs(w))) dup = true;
      if (!dup) params.push_back(v);
    }

    Mat ut = plan.u.cast<double>().transpose();  // log x = U^T log y
    for (Complex tv : params) {
      if (!(std::abs(tv) >= kEscapeLo && std::abs(tv) <= kEscapeHi)) {
        ++rl.boundary_escapes;
        continue;
      }
      // Dense poly in the main variable at the fixed parameter.
      std::vector<Complex> dense(p1.size());
      for (size_t k = 0; k < p1.size(); ++k) dense[k] = poly_eval(p1[k], tv);
      for (Complex mv : companion_roots(dense)) {
        Complex y1 = plan.param_var == 0 ? tv : mv;
        Complex y2 = plan.param_var == 0 ? mv : tv;
        if (!newton2(t1, t2, y1, y2)) continue;
        double a1 = std::abs(y1), a2 = std::abs(y2);
        if (!(a1 >= kEscapeLo && a1 <= kEscapeHi && a2 >= kEscapeLo &&
              a2 <= kEscapeHi)) {
          ++rl.boundary_escapes;
          continue;
        }
        Vec py(2), qy(2);
        py << std::log(a1), std::log(a2);
        qy << std::arg(y1), std::arg(y2);
        TorusPoint z(ut * py, ut * qy);
        // Final polish in the original coordinates guards transformed plans.
        Complex x1 = std::exp(Complex(z.p[0], z.q[0]));
        Complex x2 = std::exp(Complex(z.p[1], z.q[1]));
        if (newton2(base1, base2, x1, x2)) {
          double b1 = std::abs(x1), b2 = std::abs(x2);
          if (b1 >= kEscapeLo && b1 <= kEscapeHi && b2 >= kEscapeLo &&
              b2 <= kEscapeHi) {
            Vec px(2), qx(2);
            px << std::log(b1), std::log(b2);
            qx << std::arg(x1), std::arg(x2);
            z = TorusPoint(px, qx);
          }
        }
        double res = evaluate_scaled(f, e, z).norm() / fnorm;
        if (res > kResidualTol) continue;
        rl.roots.push_back(z);
        rl.residuals.push_back(res);
      }
    }
    if (!rl.roots.empty()) {
      merge_and_sort(rl);
      return rl;
    }
  }
  RootList rl;
  rl.degenerate_flag = true;
  return rl;
}

namespace {

// Real Newton in p for a fixed sign pattern zeta_j = s_j exp(p_j).
bool real_newton(const SparseSystem& f, const Ensemble& e, Vec& p, const Vec& signs) {
  const int n = e.n();
  for (int it = 0; it < 40; ++it) {
    Vec val(n);
    Mat jac(n, n);
    for (int i = 0; i < n; ++i) {
      const Support& s = e.supports[i];
      const auto& w = e.covariances[i].weights;
      double acc = 0.0;
      Vec dacc = Vec::Zero(n);
      for (int a = 0; a < s.rows(); ++a) {
        double sgn = 1.0;
        double expo = 0.0;
        for (int j = 0; j < n; ++j) {
          if (signs[j] < 0 && (s.exponents(a, j) % 2 != 0)) sgn = -sgn;
          expo += s.exponents(a, j) * p[j];
        }
        double term = f.coeffs[i][a].real() * std::sqrt(w[a]) * sgn * std::exp(expo);
        acc += term;
        for (int j = 0; j < n; ++j) dacc[j] += term * s.exponents(a, j);
      }
      val[i] = acc;
      jac.row(i) = dacc;
    }
    Vec step = jac.fullPivLu().solve(-val);
    if (!step.allFinite()) return false;
    p += step;
    if (step.norm() < 1e-14 * (1.0 + p.norm())) return true;
  }
  return true;
}

RootList filter_real(const SparseSystem& f, const Ensemble& e, const RootList& all,
                     bool both_signs) {
  const int n = e.n();
  RootList rl;
  rl.degenerate_flag = all.degenerate_flag;
  rl.multiplicity_flag = all.multiplicity_flag;
  rl.boundary_escapes = all.boundary_escapes;
  double fnorm = f.norm();
  for (const auto& z : all.roots) {
    bool ok = true;
    Vec signs(n), q(n);
    for (int j = 0; j < n; ++j) {
      double q0 = q_dist(z.q[j], 0.0);
      double qpi = q_dist(z.q[j], kTwoPi / 2.0);
      if (q0 <= 1e-8) { signs[j] = 1.0; q[j] = 0.0; }
      else if (both_signs && qpi <= 1e-8) { signs[j] = -1.0; q[j] = kTwoPi / 2.0; }
      else { ok = false; break; }
    }
    if (!ok) continue;
    Vec p = z.p;
    if (!real_newton(f, e, p, signs)) continue;
    TorusPoint zr(p, q);
    double res = evaluate_scaled(f, e, zr).norm() / fnorm;
    if (res > kResidualTol) continue;
    rl.roots.push_back(zr);
    rl.residuals.push_back(res);
  }
  merge_and_sort(rl);
  return rl;
}

RootList all_roots(const SparseSystem& f, const Ensemble& e) {
  if (e.n() == 1) return univariate_roots(f, e.supports[0], e.covariances[0]);
  if (e.n() == 2) return bivariate_roots(f, e);
  throw ValidationError("root enumeration supports n <= 2 only");
}

}  // namespace

RootList real_roots(const SparseSystem& f, const Ensemble& e) {
  if (e.field != Field::Real)
    throw ValidationError("real_roots: ensemble must be real");
  return filter_real(f, e, all_roots(f, e), false);
}

RootList real_roots_all_signs(const SparseSystem& f, const Ensemble& e) {
  if (e.field != Field::Real)
    throw ValidationError("real_roots_all_signs: ensemble must be real");
  return filter_real(f, e, all_roots(f, e), true);
}

int count_roots_in_region(const RootList& roots, const Region& u) {
  int c = 0;
  for (const auto& z : roots.roots)
    if (u.contains(z)) ++c;
  return c;
}

}  // namespace toric
