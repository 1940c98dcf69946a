// Gaussian ensembles of sparse systems, evaluation, the multiprojective
// metric d_P, and box regions in (p, q) space.
#pragma once

#include <cstdint>
#include <vector>

#include "toric/kahler.hpp"

namespace toric {

enum class Field { Complex, Real };

// Square system data: n (support, covariance) pairs over a common dimension.
struct Ensemble {
  std::vector<Support> supports;
  std::vector<DiagonalCovariance> covariances;
  Field field = Field::Complex;

  int n() const { return static_cast<int>(supports.size()); }
  bool unmixed() const;
  static Ensemble make(std::vector<Support> s, std::vector<DiagonalCovariance> c,
                       Field f);
  // The linear ensemble: supports {0, e_1, .., e_n} with unit weights.
  static Ensemble linear(int n, Field f);
  // Unmixed ensemble repeating one (support, covariance) pair n times.
  static Ensemble unmixed_from(const Support& s, const DiagonalCovariance& c, int n,
                               Field f);
};

// Whitened coefficient vectors; the stored entries are expressed in the
// C^{1/2}-scaled monomial basis, so their Euclidean norm is the C^{-1} norm
// of the raw coefficients and Gaussian sampling is standard normal.
struct SparseSystem {
  std::vector<CVec> coeffs;

  int n() const { return static_cast<int>(coeffs.size()); }
  double norm() const;
};

// Standard Gaussian sample (complex: independent N(0,1) real and imaginary
// parts). Deterministic in (ensemble shape, seed).
SparseSystem sample(const Ensemble& e, std::uint64_t seed);

// Component i is coeffs[i] . vhat_{A_i}(p + iq).
CVec evaluate(const SparseSystem& f, const Ensemble& e, const TorusPoint& z);

// Same, divided by |vhat_{A_i}|; bounded for any p, used for residual tests.
CVec evaluate_scaled(const SparseSystem& f, const Ensemble& e, const TorusPoint& z);

// sqrt( sum_i sin^2 angle(f^i, g^i) ); scale-invariant per component.
double dp_distance(const SparseSystem& f, const SparseSystem& g);

struct Interval {
  double lo = 0.0, hi = 0.0;  // lo <= hi; p intervals may be infinite
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct Box {
  std::vector<Interval> p;
  std::vector<Interval> q;
  double volume() const;    // Lebesgue in (p, q)
  double p_volume() const;  // Lebesgue in p alone
};

// Finite union of product boxes, canonicalized to pairwise disjoint cells on
// construction (overlapping inputs are treated as a union).
struct Region {
  std::vector<Box> boxes;
  int n = 0;

  static Region from_boxes(std::vector<Box> raw, int n);
  static Region full_q(std::vector<Interval> p_box);  // p-box x [0,2pi)^n
  static Region all(int n);                           // R^n x [0,2pi)^n
  double volume() const;
  double p_volume() const;
  bool p_bounded() const;
  bool empty() const { return boxes.empty(); }
  bool contains(const TorusPoint& z) const;  // q compared modulo 2*pi
};

}  // namespace toric
