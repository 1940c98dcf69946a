// Condition matrix D(f), distance to the fiber discriminant, condition
// number sandwich bounds, restricted condition over a region, mixed dilation.
#pragma once

#include "toric/randsys.hpp"

namespace toric {

struct ConditionMatrix {
  CMat rows;  // n x n, row i = f^i . Dv_{A_i} at the point
  std::vector<KahlerFrame> frames;
};

// Requires |evaluate(f, z)| <= tol * |f| (approximate root).
ConditionMatrix condition_matrix(const SparseSystem& f, const Ensemble& e,
                                 const TorusPoint& z, double tol = 1e-8);

// Multiprojective distance from f (scaled to unit components) to the
// discriminant slice through the fiber at z. Zero iff D(f) is singular.
// Requires z to be an approximate root of f.
double distance_to_sigma(const SparseSystem& f, const Ensemble& e,
                         const TorusPoint& z, double tol = 1e-8);

// Sandwich bounds: lower <= 1/distance_to_sigma <= upper. Both are
// +infinity at a degenerate root. The upper bound is an exact eigenvalue
// computation; the lower bound is a multistart maximization and collapses to
// the upper bound for unmixed ensembles.
struct ConditionBounds {
  double lower = 0.0;
  double upper = 0.0;
};
ConditionBounds condition_bounds(const SparseSystem& f, const Ensemble& e,
                                 const TorusPoint& z, double tol = 1e-8);

struct RestrictedOptions {
  int grid_points = 7;    // per axis, both p and q
  int refine_rounds = 6;  // local refinement passes around the best node
};

struct RestrictedCondition {
  double mu = 0.0;  // 1 / min distance, may be +infinity
  double min_distance = 0.0;
  TorusPoint argmin;
  double final_spacing = 0.0;
};

// sup over a deterministic, locally refined grid of 1/d_P(f, Sigma_(p,q)).
// At non-root fiber points f is first projected onto the fiber.
RestrictedCondition restricted_condition(const SparseSystem& f, const Ensemble& e,
                                         const Region& u,
                                         const RestrictedOptions& opts = {});

// Distance of the fiber projection of f to the discriminant slice at an
// arbitrary point (no root precondition); building block of the above.
double fiber_distance_at(const SparseSystem& f, const Ensemble& e,
                         const TorusPoint& z);

struct DilationReport {
  double kappa_upper = 1.0;  // certified upper bound on the mixed dilation
  Mat minimizer;             // det-normalized upper-triangular L
  Vec per_support_ratios;
};

// min over det-1 upper-triangular L of max_i cond(L^T H_i L); any feasible L
// certifies an upper bound, exact when n = 1 or all H_i coincide.
DilationReport mixed_dilation(const std::vector<Mat>& hessians);

struct KappaOptions {
  int grid_points = 9;  // per p axis
};

struct KappaReport {
  double kappa_upper = 1.0;
  double grid_spacing = 0.0;
};

// Max of mixed_dilation over a p-grid of the region (the dilation does not
// depend on q). Requires bounded p boxes unless the ensemble is unmixed.
KappaReport kappa_over_region(const Ensemble& e, const Region& u,
                              const KappaOptions& opts = {});

}  // namespace toric
