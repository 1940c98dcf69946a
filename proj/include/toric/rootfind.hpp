// Exhaustive root enumeration for n <= 2; the ground-truth oracle behind the
// expectation experiments. Univariate roots via a companion matrix, bivariate
// roots via a hidden-variable Sylvester pencil and eigenvalues.
#pragma once

#include "toric/randsys.hpp"

namespace toric {

struct RootList {
  std::vector<TorusPoint> roots;
  // Scale-invariant residual per root: |f . unit Veronese| / |f|, i.e. the
  // evaluation divided by |vhat|; meaningful for roots of any magnitude.
  std::vector<double> residuals;
  bool multiplicity_flag = false;      // clustered roots were merged
  bool degenerate_flag = false;        // numerical trouble; discard upstream
  int boundary_escapes = 0;            // |zeta| outside [1e-12, 1e12]
};

// All roots in C^* of the univariate sparse polynomial in log coordinates.
RootList univariate_roots(const SparseSystem& f, const Support& s,
                          const DiagonalCovariance& c);

// All isolated roots in (C^*)^2. Near-singular pencils retry with the other
// hidden variable and then a unimodular exponent change before flagging.
RootList bivariate_roots(const SparseSystem& f, const Ensemble& e);

// Roots with zeta in the positive orthant (q = 0), re-verified by real
// Newton. Requires a real ensemble, n <= 2.
RootList real_roots(const SparseSystem& f, const Ensemble& e);

// Roots with all coordinates real of either sign (q components 0 or pi).
RootList real_roots_all_signs(const SparseSystem& f, const Ensemble& e);

int count_roots_in_region(const RootList& roots, const Region& u);

}  // namespace toric
