#include "toric/volume.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace toric {
namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGl = 8;
const double kGlNode[kGl] = {-0.9602898564975363, -0.7966664774136267,
                             -0.5255324099163290, -0.1834346424956498,
                             0.1834346424956498,  0.5255324099163290,
                             0.7966664774136267,  0.9602898564975363};
const double kGlWeight[kGl] = {0.1012285362903763, 0.2223810344533745,
                               0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};

struct Panel {
  Vec lo, hi;
  double value = 0.0;
  double error = 0.0;
  long id = 0;
};

template <typename F>
double gl_tensor(const F& f, const Vec& lo, const Vec& hi, std::size_t* evals) {
  const int n = static_cast<int>(lo.size());
  std::vector<int> idx(n, 0);
  double acc = 0.0;
  while (true) {
    Vec x(n);
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      double half = 0.5 * (hi[j] - lo[j]);
      x[j] = 0.5 * (lo[j] + hi[j]) + half * kGlNode[idx[j]];
      w *= half * kGlWeight[idx[j]];
    }
    acc += w * f(x);
    ++*evals;
    int a = n - 1;
    while (a >= 0) {
      if (++idx[a] < kGl) break;
      idx[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return acc;
}

// Adaptive bisection on the largest-error panel; children re-estimated by a
// two-way split along the widest axis. Summation is done in panel-id order
// so results do not depend on refinement scheduling.
template <typename F>
IntegralResult adaptive_integrate(const F& f, const Vec& lo, const Vec& hi,
                                  const QuadratureOptions& opts) {
  IntegralResult out;
  long next_id = 0;
  auto estimate = [&](Panel& p) {
    p.value = gl_tensor(f, p.lo, p.hi, &out.evaluations);
    // error via comparison with a split along the widest axis
    int axis = 0;
    for (int j = 1; j < p.lo.size(); ++j)
      if (p.hi[j] - p.lo[j] > p.hi[axis] - p.lo[axis]) axis = j;
    Vec mid_hi = p.hi, mid_lo = p.lo;
    mid_hi[axis] = mid_lo[axis] = 0.5 * (p.lo[axis] + p.hi[axis]);
    double split = gl_tensor(f, p.lo, mid_hi, &out.evaluations) +
                   gl_tensor(f, mid_lo, p.hi, &out.evaluations);
    p.error = std::abs(split - p.value);
    p.value = split;
  };

  // Base grid with panels near the O(1) feature width of the exp-type
  // densities; a single wide panel would fool the split-based error
  // estimate (coarse and split both miss concentrated mass).
  const int n = static_cast<int>(lo.size());
  const double base_width = n >= 3 ? 4.0 : 2.0;
  std::vector<int> segs(n);
  std::vector<int> idx(n, 0);
  for (int j = 0; j < n; ++j)
    segs[j] = std::clamp(static_cast<int>(std::ceil((hi[j] - lo[j]) / base_width)),
                         1, 32);
  std::vector<Panel> leaves;
  while (true) {
    Panel p;
    p.lo = lo;
    p.hi = hi;
    for (int j = 0; j < n; ++j) {
      double w = (hi[j] - lo[j]) / segs[j];
      p.lo[j] = lo[j] + idx[j] * w;
      p.hi[j] = lo[j] + (idx[j] + 1) * w;
    }
    p.id = next_id++;
    estimate(p);
    leaves.push_back(p);
    int a = n - 1;
    while (a >= 0) {
      if (++idx[a] < segs[a]) break;
      idx[a] = 0;
      --a;
    }
    if (a < 0) break;
  }

  auto total_error = [&] {
    double e = 0.0;
    for (const auto& p : leaves) e += p.error;
    return e;
  };
  auto total_value = [&] {
    double v = 0.0;
    for (const auto& p : leaves) v += p.value;
    return v;
  };

  while (static_cast<int>(leaves.size()) < opts.max_panels) {
    double err = total_error();
    double val = std::abs(total_value());
    if (err <= std::max(opts.abs_tol, opts.rel_tol * std::max(val, 1e-300))) break;
    // split the worst panel (ties broken by id for determinism)
    size_t worst = 0;
    for (size_t i = 1; i < leaves.size(); ++i) {
      if (leaves[i].error > leaves[worst].error ||
          (leaves[i].error == leaves[worst].error && leaves[i].id < leaves[worst].id))
        worst = i;
    }
    Panel p = leaves[worst];
    leaves.erase(leaves.begin() + worst);
    int axis = 0;
    for (int j = 1; j < p.lo.size(); ++j)
      if (p.hi[j] - p.lo[j] > p.hi[axis] - p.lo[axis]) axis = j;
    double mid = 0.5 * (p.lo[axis] + p.hi[axis]);
    Panel a{p.lo, p.hi, 0, 0, next_id++};
    a.hi[axis] = mid;
    Panel b{p.lo, p.hi, 0, 0, next_id++};
    b.lo[axis] = mid;
    estimate(a);
    estimate(b);
    leaves.push_back(a);
    leaves.push_back(b);
  }
  std::sort(leaves.begin(), leaves.end(),
            [](const Panel& a, const Panel& b) { return a.id < b.id; });
  for (const auto& p : leaves) {
    out.value += p.value;
    out.error += p.error;
  }
  return out;
}

double density_at(const Ensemble& e, const Vec& p) {
  std::vector<Mat> hs(e.n());
  for (int i = 0; i < e.n(); ++i)
    momentum_hessian(e.supports[i], e.covariances[i], p, nullptr, &hs[i]);
  return mixed_density(hs);
}

void require_full_dim(const Ensemble& e, const char* who) {
  for (const auto& s : e.supports)
    if (!s.full_dim)
      throw ValidationError(std::string(who) + ": supports must be full-dimensional");
}

}  // namespace

double mixed_density(const std::vector<Mat>& hessians) {
  const int n = static_cast<int>(hessians.size());
  if (n == 0) throw ValidationError("mixed_density: no inputs");
  double acc = 0.0;
  for (int mask = 1; mask < (1 << n); ++mask) {
    Mat sum = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) sum += 0.5 * hessians[i];
    double sign = ((n - __builtin_popcount(mask)) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * sum.determinant();
  }
  return acc;
}

double truncation_radius(const Ensemble& e, double delta) {
  require_full_dim(e, "truncation_radius");
  const int n = e.n();
  std::vector<std::vector<HalfSpace>> hulls;
  for (const auto& s : e.supports) hulls.push_back(facet_halfspaces(newton_polytope(s)));

  double r = 2.0;
  for (int grow = 0; grow < 40; ++grow) {
    // sample boundary: face centers plus corners of [-r, r]^n
    std::vector<Vec> probes;
    for (int j = 0; j < n; ++j)
      for (double sgn : {-1.0, 1.0}) {
        Vec x = Vec::Zero(n);
        x[j] = sgn * r;
        probes.push_back(x);
      }
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vec x(n);
      for (int j = 0; j < n; ++j) x[j] = (mask & (1 << j)) ? r : -r;
      probes.push_back(x);
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (const auto& x : probes) {
        Vec m;
        momentum_hessian(e.supports[i], e.covariances[i], x, &m, nullptr);
        worst = std::max(worst, interior_distance(hulls[i], m));
      }
    if (worst <= delta) return r;
    r *= 1.5;
  }
  throw NumericalError("truncation_radius: momentum did not approach the hull boundary");
}

IntegralResult expected_roots(const Ensemble& e, const Region& u,
                              const QuadratureOptions& opts) {
  if (e.field != Field::Complex)
    throw ValidationError("expected_roots: complex ensemble required");
  require_full_dim(e, "expected_roots");
  if (u.empty()) return {};
  const int n = e.n();
  double r_trunc = -1.0;

  IntegralResult out;
  for (const auto& b : u.boxes) {
    double q_factor = 1.0;
    for (const auto& iv : b.q) q_factor *= iv.length();
    if (q_factor == 0.0) continue;
    Vec lo(n), hi(n);
    bool unbounded = false;
    for (int j = 0; j < n; ++j) {
      lo[j] = b.p[j].lo;
      hi[j] = b.p[j].hi;
      if (!std::isfinite(lo[j]) || !std::isfinite(hi[j])) unbounded = true;
    }
    if (unbounded) {
      if (r_trunc < 0) r_trunc = truncation_radius(e, opts.boundary_delta);
      // Mass beyond the truncation box decays exponentially (the momentum
      // image is pinned to a hull-boundary shell); grow the box until the
      // added shell is negligible, then charge the last shell as the tail.
      auto f = [&](const Vec& p) { return density_at(e, p); };
      auto box_at = [&](double extra) {
        std::pair<Vec, Vec> b{lo, hi};
        for (int j = 0; j < n; ++j) {
          if (!std::isfinite(lo[j])) b.first[j] = -r_trunc - extra;
          if (!std::isfinite(hi[j])) b.second[j] = r_trunc + extra;
        }
        return b;
      };
      auto [l0, h0] = box_at(0.0);
      IntegralResult cur = adaptive_integrate(f, l0, h0, opts);
      out.evaluations += cur.evaluations;
      double shell = std::abs(cur.value);
      for (int k = 1; k <= 6; ++k) {
        auto [lk, hk] = box_at(double(k));
        IntegralResult next = adaptive_integrate(f, lk, hk, opts);
        out.evaluations += next.evaluations;
        shell = std::abs(next.value - cur.value);
        cur = next;
        if (shell <= 0.2 * std::max(opts.abs_tol,
                                    opts.rel_tol * std::max(std::abs(cur.value), 1e-12)))
          break;
      }
      out.value += q_factor * cur.value;
      out.error += q_factor * (cur.error + shell);
    } else {
      auto f = [&](const Vec& p) { return density_at(e, p); };
      IntegralResult r = adaptive_integrate(f, lo, hi, opts);
      out.value += q_factor * r.value;
      out.error += q_factor * r.error;
      out.evaluations += r.evaluations;
    }
  }
  double scale = std::pow(M_PI, -n);
  out.value *= scale;
  out.error *= scale;
  if (out.error > 10 * std::max(opts.rel_tol * std::max(std::abs(out.value), 1.0),
                                opts.abs_tol))
    throw NumericalError("expected_roots: quadrature failed to converge (residual " +
                         std::to_string(out.error) + ")");
  return out;
}

IntegralResult mixed_volume_integral(const Ensemble& e,
                                     const QuadratureOptions& opts) {
  return expected_roots(e, Region::all(e.n()), opts);
}

double real_roots_bound(const Ensemble& e, const std::vector<Box>& p_boxes,
                        const QuadratureOptions& opts) {
  if (e.field != Field::Real)
    throw ValidationError("real_roots_bound: real ensemble required");
  require_full_dim(e, "real_roots_bound");
  const int n = e.n();
  double lambda = 0.0;
  double integral = 0.0;
  for (const auto& b : p_boxes) {
    Vec lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(b.p[j].lo) || !std::isfinite(b.p[j].hi))
        throw ValidationError("real_roots_bound: unbounded p box (infinite volume)");
      lo[j] = b.p[j].lo;
      hi[j] = b.p[j].hi;
    }
    lambda += b.p_volume();
    auto f = [&](const Vec& p) { return density_at(e, p); };
    integral += adaptive_integrate(f, lo, hi, opts).value;
  }
  double q_total = std::pow(kTwoPi, n) * integral;
  return std::pow(kTwoPi * kTwoPi, -n / 2.0) * std::sqrt(lambda) *
         std::sqrt(std::max(0.0, q_total));
}

double momentum_pushforward_volume(const Support& s, const DiagonalCovariance& c,
                                   const std::vector<std::vector<Interval>>& v_boxes,
                                   const QuadratureOptions& opts) {
  if (!s.full_dim)
    throw ValidationError("momentum_pushforward_volume: support must be full-dimensional");
  const int n = s.n();
  auto hull = facet_halfspaces(newton_polytope(s));
  for (const auto& box : v_boxes) {
    if (static_cast<int>(box.size()) != n)
      throw ValidationError("momentum_pushforward_volume: box dimension mismatch");
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vec corner(n);
      for (int j = 0; j < n; ++j)
        corner[j] = (mask & (1 << j)) ? box[j].hi : box[j].lo;
      if (interior_distance(hull, corner) < -1e-12)
        throw ValidationError("momentum_pushforward_volume: V extends outside Conv(A)");
    }
  }

  auto inside_v = [&](const Vec& y) {
    for (const auto& box : v_boxes) {
      bool in = true;
      for (int j = 0; j < n; ++j)
        if (!(y[j] >= box[j].lo && y[j] <= box[j].hi)) { in = false; break; }
      if (in) return true;
    }
    return false;
  };
  auto momentum_at = [&](const Vec& p) {
    Vec g;
    momentum_hessian(s, c, p, &g, nullptr);
    return g;
  };
  auto density = [&](const Vec& p) {
    Mat h;
    momentum_hessian(s, c, p, nullptr, &h);
    return (0.5 * h).determinant();
  };

  if (n == 1) {
    // exact interval preimages via momentum inversion
    double total = 0.0;
    for (const auto& box : v_boxes) {
      double pa = invert_momentum(s, c, Vec::Constant(1, box[0].lo))[0];
      double pb = invert_momentum(s, c, Vec::Constant(1, box[0].hi))[0];
      auto f = [&](const Vec& p) { return density(p); };
      total += adaptive_integrate(f, Vec::Constant(1, std::min(pa, pb)),
                                  Vec::Constant(1, std::max(pa, pb)), opts)
                   .value;
    }
    return total * kTwoPi;
  }

  // Bounding p-box: invert V corners (nudged inward so the inversion is
  // well-posed on the open hull interior), pad generously.
  Vec lo = Vec::Constant(n, 1e30), hi = Vec::Constant(n, -1e30);
  for (const auto& box : v_boxes) {
    Vec center(n);
    for (int j = 0; j < n; ++j) center[j] = 0.5 * (box[j].lo + box[j].hi);
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vec corner(n);
      for (int j = 0; j < n; ++j)
        corner[j] = (mask & (1 << j)) ? box[j].hi : box[j].lo;
      Vec target = corner + 1e-9 * (center - corner);
      Vec p = invert_momentum(s, c, target, 1e-10);
      for (int j = 0; j < n; ++j) {
        lo[j] = std::min(lo[j], p[j] - 2.0);
        hi[j] = std::max(hi[j], p[j] + 2.0);
      }
    }
  }

  // Cell tree over the p-box: cells fully inside the preimage integrate with
  // Gauss-Legendre, straddling cells recurse down to a width floor and then
  // contribute a sub-grid fraction of their midpoint density. The width
  // floor shrinks until the straddling-cell budget meets the tolerance.
  struct Cell { Vec lo, hi; };
  auto probes_of = [&](const Cell& cell) {
    std::vector<Vec> probes;
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vec x(n);
      for (int j = 0; j < n; ++j) x[j] = (mask & (1 << j)) ? cell.hi[j] : cell.lo[j];
      probes.push_back(x);
    }
    Vec mid = 0.5 * (cell.lo + cell.hi);
    probes.push_back(mid);
    for (int j = 0; j < n; ++j)
      for (double sgn : {-1.0, 1.0}) {
        Vec x = mid;
        x[j] = sgn > 0 ? cell.hi[j] : cell.lo[j];
        probes.push_back(x);
      }
    return probes;
  };
  auto classify = [&](const Cell& cell) {
    int in_count = 0, out_count = 0;
    for (const auto& x : probes_of(cell)) {
      if (inside_v(momentum_at(x))) ++in_count; else ++out_count;
    }
    if (out_count == 0) return 1;
    if (in_count == 0) return -1;
    return 0;
  };

  std::size_t evals = 0;
  auto run = [&](double min_width, double* budget) {
    double value = 0.0;
    *budget = 0.0;
    std::deque<Cell> queue{{lo, hi}};
    while (!queue.empty()) {
      Cell cell = queue.front();
      queue.pop_front();
      int cls = classify(cell);
      if (cls == -1) continue;
      double width = (cell.hi - cell.lo).maxCoeff();
      if (cls == 1) {
        value += gl_tensor([&](const Vec& p) { return density(p); }, cell.lo,
                           cell.hi, &evals);
        continue;
      }
      if (width <= min_width) {
        // 3^n sub-grid indicator fraction
        double vol = 1.0;
        for (int j = 0; j < n; ++j) vol *= cell.hi[j] - cell.lo[j];
        int inside = 0, total = 0;
        std::vector<int> idx(n, 0);
        while (true) {
          Vec x(n);
          for (int j = 0; j < n; ++j)
            x[j] = cell.lo[j] + (cell.hi[j] - cell.lo[j]) * (idx[j] + 0.5) / 3.0;
          if (inside_v(momentum_at(x))) ++inside;
          ++total;
          int a = n - 1;
          while (a >= 0) {
            if (++idx[a] < 3) break;
            idx[a] = 0;
            --a;
          }
          if (a < 0) break;
        }
        double dmid = density(0.5 * (cell.lo + cell.hi));
        value += vol * dmid * inside / total;
        *budget += vol * dmid / 3.0;  // indicator-fraction uncertainty
        continue;
      }
      std::vector<int> idx(n, 0);
      while (true) {
        Cell child;
        child.lo = cell.lo;
        child.hi = cell.hi;
        for (int j = 0; j < n; ++j) {
          double mid = 0.5 * (cell.lo[j] + cell.hi[j]);
          if (idx[j] == 0) child.hi[j] = mid; else child.lo[j] = mid;
        }
        queue.push_back(child);
        int a = n - 1;
        while (a >= 0) {
          if (++idx[a] < 2) break;
          idx[a] = 0;
          --a;
        }
        if (a < 0) break;
      }
    }
    return value;
  };

  double min_width = (hi - lo).maxCoeff() / 256.0;
  double value = 0.0;
  for (int pass = 0; pass < 5; ++pass) {
    double budget = 0.0;
    value = run(min_width, &budget);
    if (budget <= std::max(opts.abs_tol, 0.3 * opts.rel_tol * std::abs(value)))
      break;
    min_width *= 0.25;
  }
  return value * std::pow(kTwoPi, n);
}

}  // namespace toric
