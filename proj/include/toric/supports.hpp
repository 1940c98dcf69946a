// Exponent supports, convex hulls over exact rationals, normalized volumes,
// and the inclusion-exclusion mixed-volume oracle (dimensions 1..3).
#pragma once

#include <boost/rational.hpp>
#include <vector>

#include "toric/types.hpp"

namespace toric {

using Rat = boost::rational<long long>;
using RatPoint = std::vector<Rat>;

// Convex polytope given by an irredundant vertex list.
struct Polytope {
  std::vector<RatPoint> vertices;
  int dim = -1;      // affine dimension of the vertex set
  int ambient = 0;   // dimension of the surrounding space
};

// Integer exponent matrix, rows are monomial exponent vectors.
struct Support {
  IMat exponents;       // M x n
  bool full_dim = false;  // hull of the rows has affine dimension n

  int rows() const { return static_cast<int>(exponents.rows()); }
  int n() const { return static_cast<int>(exponents.cols()); }

  // Validates pairwise-distinct rows and caches the full-dimension flag.
  static Support from_rows(const IMat& rows);
};

// Irredundant hull of a point set; degenerate (lower-dimensional) hulls are
// fine, dim records the affine dimension.
Polytope convex_hull(const std::vector<RatPoint>& points);

// n! times the Lebesgue volume; zero when dim < ambient. Exact.
Rat normalized_volume(const Polytope& p);

// Hull of all pairwise vertex sums.
Polytope minkowski_sum(const Polytope& a, const Polytope& b);

// Inclusion-exclusion polarization over Minkowski sums, normalized so that
// n standard simplices give 1 (equivalently MV(P,..,P) = normalized_volume(P)).
// Exact; intended for ambient dimension <= 3.
Rat mixed_volume_oracle(const std::vector<Polytope>& ps);

// Outward facet half-spaces a.x <= b with |a| = 1, in doubles. Requires a
// full-dimensional polytope (ambient <= 3).
struct HalfSpace {
  Vec normal;
  double offset = 0.0;
};
std::vector<HalfSpace> facet_halfspaces(const Polytope& p);

// Distance from x to the hull boundary; positive inside, negative outside.
double interior_distance(const std::vector<HalfSpace>& facets, const Vec& x);

Polytope newton_polytope(const Support& s);

// Convenience constructors used throughout the tests and the CLI.
RatPoint rat_point(std::initializer_list<long long> coords);
Polytope lattice_polytope(const std::vector<std::vector<long long>>& points);

}  // namespace toric
