// Toric Kahler layer: potential, momentum map, Hessian metric, Veronese maps
// and their derivatives, per-support Hermitian norms, momentum inversion.
#pragma once

#include "toric/supports.hpp"
#include "toric/types.hpp"

namespace toric {

struct DiagonalCovariance {
  Vec weights;  // strictly positive, length M

  static DiagonalCovariance identity(int m) {
    return DiagonalCovariance{Vec::Ones(m)};
  }
  static DiagonalCovariance from_weights(const Vec& w);
};

struct TorusPoint {
  Vec p;  // log-moduli
  Vec q;  // arguments, reduced to [0, 2*pi)

  TorusPoint() = default;
  TorusPoint(Vec p_, Vec q_);
  static TorusPoint origin(int n) { return TorusPoint(Vec::Zero(n), Vec::Zero(n)); }
  int n() const { return static_cast<int>(p.size()); }
};

// Point-local cache of the Veronese data for one (support, covariance) pair.
struct KahlerFrame {
  Support support;
  DiagonalCovariance cov;
  TorusPoint point;

  double log_vhat_norm = 0.0;  // log |vhat|
  CVec unit;                   // vhat / |vhat|
  Vec weights;                 // |unit_a|^2, the momentum-map weights
  CMat dv;                     // M x n, derivative of the projectivized map
  Vec grad;                    // momentum map value at p
  Mat hess;                    // D^2 g_A at p, symmetric
};

KahlerFrame make_frame(const Support& s, const DiagonalCovariance& c,
                       const TorusPoint& z);

// Raw Veronese image C^{1/2} exp(A (p + iq)); may overflow for extreme p,
// all internal consumers use the unit vector from the frame instead.
CVec veronese_hat(const Support& s, const DiagonalCovariance& c, const TorusPoint& z);

// g_A(p) = (1/2) log( exp(Ap)^T C exp(Ap) ), evaluated with a max shift.
double potential(const Support& s, const DiagonalCovariance& c, const Vec& p);

// Gradient of g_A; lies in the interior of Conv(A) when the support is
// full-dimensional. Set allow_degenerate to skip the full_dim check.
Vec momentum(const Support& s, const DiagonalCovariance& c, const Vec& p,
             bool allow_degenerate = false);

// D^2 g_A as twice the centered second moment of the weight distribution.
Mat hessian(const Support& s, const DiagonalCovariance& c, const Vec& p);

// Real-only fast path: momentum and (optionally) the Hessian without
// building the complex Veronese derivative. Used by the quadrature loops.
void momentum_hessian(const Support& s, const DiagonalCovariance& c, const Vec& p,
                      Vec* grad, Mat* hess);

CMat dveronese(const Support& s, const DiagonalCovariance& c, const TorusPoint& z);

// sqrt( u^H (1/2 D^2 g_A) u ) = |Dv_A u|.
double norm_A(const CVec& u, const KahlerFrame& frame);
double norm_A(const CVec& u, const Mat& hess);

// Solves grad g_A(p) = y for interior targets y by damped Newton on the
// strictly convex potential. Throws NumericalError if it stalls.
Vec invert_momentum(const Support& s, const DiagonalCovariance& c, const Vec& y,
                    double tol = 1e-12, int max_iter = 300);

}  // namespace toric
