// Small deterministic local optimizers for the low-dimensional minimizations
// in the conditioning module (unit-sphere distances, mixed dilation).
#pragma once

#include <functional>

#include "toric/types.hpp"

namespace toric {
namespace optim {

using Objective = std::function<double(const Vec&)>;

struct Result {
  Vec x;
  double value = 0.0;
};

// Derivative-free simplex descent; robust for the nonsmooth max/min
// objectives that appear in the dilation and lower-bound searches.
Result nelder_mead(const Objective& f, const Vec& x0, double scale,
                   int max_iter = 400, double tol = 1e-14);

// A few damped Newton steps with central-difference derivatives; tightens a
// smooth local minimum to near machine precision.
Result newton_polish(const Objective& f, const Vec& x0, double h = 1e-5,
                     int steps = 25);

// Deterministic quasi-random direction on the unit sphere of R^d.
Vec unit_direction(int d, std::uint64_t index);

}  // namespace optim
}  // namespace toric
