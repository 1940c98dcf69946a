// Wedge-form densities, expected-root integrals, the mixed-volume quadrature
// route, the real-root bound, and momentum pushforward volumes.
#pragma once

#include "toric/randsys.hpp"

namespace toric {

// Scalar density of the wedge of the n Kahler 2-forms against the canonical
// dp dq volume: n! * MixedDet(H_1/2, .., H_n/2), computed by polarization.
// Collapses to n! * det(H/2) when all arguments agree.
double mixed_density(const std::vector<Mat>& hessians);

struct QuadratureOptions {
  double rel_tol = 1e-5;       // panel refinement target (relative)
  double abs_tol = 1e-12;
  int max_panels = 200000;
  double boundary_delta = 1e-4;  // momentum-to-hull proximity for truncation
};

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;  // quadrature + truncation estimate
  std::size_t evaluations = 0;
};

// (1/pi^n) * integral over U of the mixed density; the q directions factor
// out exactly. Unbounded p boxes are truncated where the momentum image of
// the boundary is within boundary_delta of the hull boundary.
IntegralResult expected_roots(const Ensemble& e, const Region& u,
                              const QuadratureOptions& opts = {});

// Expected roots over the whole torus; equals the mixed volume of the Newton
// polytopes (and is covariance-independent), which the tests verify.
IntegralResult mixed_volume_integral(const Ensemble& e,
                                     const QuadratureOptions& opts = {});

// Upper bound on the average number of real roots in exp(U_p):
// (4 pi^2)^(-n/2) * sqrt(lambda(U_p)) * sqrt((2 pi)^n integral of density).
double real_roots_bound(const Ensemble& e, const std::vector<Box>& p_boxes,
                        const QuadratureOptions& opts = {});

// omega_A-volume of (grad g_A)^{-1}(V) x [0,2pi)^n for V a union of boxes
// inside Conv(A); compared in tests against pi^n * Lebesgue(V).
double momentum_pushforward_volume(const Support& s, const DiagonalCovariance& c,
                                   const std::vector<std::vector<Interval>>& v_boxes,
                                   const QuadratureOptions& opts = {});

// Truncation radius: [-R, R]^n such that the momentum image of the boundary
// is within delta of the hull boundary for every support.
double truncation_radius(const Ensemble& e, double delta);

}  // namespace toric
