#include "toric/kahler.hpp"

#include <cmath>

namespace toric {
namespace {

// Per-row log magnitudes l_a = (1/2) log C_aa + A^a . p and the shifted
// norm; everything downstream works with l_a - log|vhat| to stay bounded.
struct LogData {
  Vec log_mag;
  Vec phase;
  double log_norm;
};

LogData log_data(const Support& s, const DiagonalCovariance& c, const TorusPoint& z) {
  const int m = s.rows();
  LogData d;
  d.log_mag.resize(m);
  d.phase.resize(m);
  Vec ap = s.exponents.cast<double>() * z.p;
  Vec aq = s.exponents.cast<double>() * z.q;
  for (int a = 0; a < m; ++a) {
    d.log_mag[a] = 0.5 * std::log(c.weights[a]) + ap[a];
    d.phase[a] = aq[a];
  }
  double shift = d.log_mag.maxCoeff();
  double acc = 0.0;
  for (int a = 0; a < m; ++a) acc += std::exp(2.0 * (d.log_mag[a] - shift));
  d.log_norm = shift + 0.5 * std::log(acc);
  return d;
}

void check_shapes(const Support& s, const DiagonalCovariance& c) {
  if (c.weights.size() != s.rows())
    throw ValidationError("covariance length does not match support row count");
}

}  // namespace

DiagonalCovariance DiagonalCovariance::from_weights(const Vec& w) {
  if (w.size() < 1) throw ValidationError("covariance: empty weight vector");
  for (int i = 0; i < w.size(); ++i)
    if (!(w[i] > 0.0))
      throw ValidationError("covariance: weights must be strictly positive");
  return DiagonalCovariance{w};
}

TorusPoint::TorusPoint(Vec p_, Vec q_) : p(std::move(p_)), q(std::move(q_)) {
  if (p.size() != q.size()) throw ValidationError("TorusPoint: p/q size mismatch");
  for (int i = 0; i < q.size(); ++i) {
    q[i] = std::fmod(q[i], kTwoPi);
    if (q[i] < 0) q[i] += kTwoPi;
  }
}

CVec veronese_hat(const Support& s, const DiagonalCovariance& c, const TorusPoint& z) {
  check_shapes(s, c);
  LogData d = log_data(s, c, z);
  CVec v(s.rows());
  for (int a = 0; a < s.rows(); ++a)
    v[a] = std::exp(d.log_mag[a]) * Complex(std::cos(d.phase[a]), std::sin(d.phase[a]));
  return v;
}

double potential(const Support& s, const DiagonalCovariance& c, const Vec& p) {
  check_shapes(s, c);
  return log_data(s, c, TorusPoint(p, Vec::Zero(p.size()))).log_norm;
}

KahlerFrame make_frame(const Support& s, const DiagonalCovariance& c,
                       const TorusPoint& z) {
  check_shapes(s, c);
  const int m = s.rows();
  KahlerFrame f;
  f.support = s;
  f.cov = c;
  f.point = z;
  LogData d = log_data(s, c, z);
  f.log_vhat_norm = d.log_norm;
  f.unit.resize(m);
  f.weights.resize(m);
  for (int a = 0; a < m; ++a) {
    double r = std::exp(d.log_mag[a] - d.log_norm);
    f.unit[a] = r * Complex(std::cos(d.phase[a]), std::sin(d.phase[a]));
    f.weights[a] = r * r;
  }
  Mat ad = s.exponents.cast<double>();
  f.grad = ad.transpose() * f.weights;
  f.hess = 2.0 * (ad.transpose() * f.weights.asDiagonal() * ad - f.grad * f.grad.transpose());
  f.hess = 0.5 * (f.hess + f.hess.transpose()).eval();
  // Dv = (I - u u^H) Diag(u) A
  CMat diag_ua = f.unit.asDiagonal() * ad.cast<Complex>();
  f.dv = diag_ua - f.unit * (f.unit.adjoint() * diag_ua);
  return f;
}

void momentum_hessian(const Support& s, const DiagonalCovariance& c, const Vec& p,
                      Vec* grad, Mat* hess) {
  check_shapes(s, c);
  const int m = s.rows();
  Vec log_mag = s.exponents.cast<double>() * p;
  for (int a = 0; a < m; ++a) log_mag[a] += 0.5 * std::log(c.weights[a]);
  double shift = log_mag.maxCoeff();
  double acc = 0.0;
  for (int a = 0; a < m; ++a) acc += std::exp(2.0 * (log_mag[a] - shift));
  double log_norm = shift + 0.5 * std::log(acc);
  Vec w(m);
  for (int a = 0; a < m; ++a) w[a] = std::exp(2.0 * (log_mag[a] - log_norm));
  Mat ad = s.exponents.cast<double>();
  Vec g = ad.transpose() * w;
  if (grad) *grad = g;
  if (hess) {
    Mat h = 2.0 * (ad.transpose() * w.asDiagonal() * ad - g * g.transpose());
    *hess = 0.5 * (h + h.transpose());
  }
}

Vec momentum(const Support& s, const DiagonalCovariance& c, const Vec& p,
             bool allow_degenerate) {
  if (!allow_degenerate && !s.full_dim)
    throw ValidationError("momentum: support hull is not full-dimensional");
  Vec g;
  momentum_hessian(s, c, p, &g, nullptr);
  return g;
}

Mat hessian(const Support& s, const DiagonalCovariance& c, const Vec& p) {
  Mat h;
  momentum_hessian(s, c, p, nullptr, &h);
  return h;
}

CMat dveronese(const Support& s, const DiagonalCovariance& c, const TorusPoint& z) {
  return make_frame(s, c, z).dv;
}

double norm_A(const CVec& u, const Mat& hess) {
  Complex val = (u.adjoint() * (0.5 * hess).cast<Complex>() * u)(0, 0);
  return std::sqrt(std::max(0.0, val.real()));
}

double norm_A(const CVec& u, const KahlerFrame& frame) {
  return norm_A(u, frame.hess);
}

Vec invert_momentum(const Support& s, const DiagonalCovariance& c, const Vec& y,
                    double tol, int max_iter) {
  if (!s.full_dim)
    throw ValidationError("invert_momentum: support hull is not full-dimensional");
  const int n = s.n();
  Vec p = Vec::Zero(n);
  // Minimize g(p) - y.p; strictly convex with PD Hessian, so damped Newton
  // with Armijo backtracking converges from anywhere for interior y.
  double fval = potential(s, c, p) - y.dot(p);
  for (int it = 0; it < max_iter; ++it) {
    Vec mom;
    Mat hess;
    momentum_hessian(s, c, p, &mom, &hess);
    Vec g = mom - y;
    if (g.norm() <= tol) return p;
    Vec step = hess.ldlt().solve(-g);
    if (!step.allFinite()) throw NumericalError("invert_momentum: singular Hessian");
    double t = 1.0;
    double slope = g.dot(step);
    for (int ls = 0; ls < 60; ++ls) {
      Vec cand = p + t * step;
      double fc = potential(s, c, cand) - y.dot(cand);
      if (fc <= fval + 1e-4 * t * slope) {
        p = cand;
        fval = fc;
        break;
      }
      t *= 0.5;
      if (ls == 59) throw NumericalError("invert_momentum: line search failed");
    }
  }
  // Accept slightly looser gradients before giving up; near-boundary targets
  // are ill-conditioned.
  Vec mom;
  momentum_hessian(s, c, p, &mom, nullptr);
  if ((mom - y).norm() <= 1e3 * tol) return p;
  throw NumericalError("invert_momentum: did not converge (target too close to hull boundary?)");
}

}  // namespace toric
