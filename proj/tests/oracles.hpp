// Test-only independent oracles: finite differences, direct wedge expansion,
// constrained projection onto the discriminant slice, Sturm counting. These
// deliberately avoid the library's own computation paths.
#pragma once

#include "toric/conditioning.hpp"
#include "toric/randsys.hpp"

namespace toric::oracles {

// Central-difference gradient of the potential.
Vec fd_gradient(const Support& s, const DiagonalCovariance& c, const Vec& p,
                double h = 1e-5);

// Central-difference Jacobian of the momentum map.
Mat fd_hessian(const Support& s, const DiagonalCovariance& c, const Vec& p,
               double h = 1e-5);

// Density of (-1)^{n(n-1)/2} wedge of the n Kahler 2-forms against
// dp_1..dp_n dq_1..dq_n, by brute-force expansion over permutations of the
// 2n slots (no polarization identity involved).
double wedge_density(const std::vector<Mat>& hessians);

// Distance from f to the discriminant slice by direct projection: minimizes
// over unit u the componentwise sine-angles to the linear spaces
// { g : g . vhat_i = 0, g . (Dv_i u) = 0 }. Independent of the D(f)^{-1}
// route used by the library.
double sigma_projection_distance(const SparseSystem& f, const Ensemble& e,
                                 const TorusPoint& z);

// Number of distinct real roots of a real dense polynomial via Sturm chains.
int sturm_real_root_count(const std::vector<double>& coeffs);

// Area of a convex polygon given its vertices in any order (doubles); used
// to cross-check the exact 2-d Minkowski arithmetic.
double polygon_area(std::vector<std::pair<double, double>> pts);

}  // namespace toric::oracles
