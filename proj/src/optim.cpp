#include "toric/optim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace toric {
namespace optim {

Result nelder_mead(const Objective& f, const Vec& x0, double scale, int max_iter,
                   double tol) {
  const int d = static_cast<int>(x0.size());
  std::vector<Vec> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  for (int i = 0; i < d; ++i) xs[i + 1][i] += scale;
  for (int i = 0; i <= d; ++i) fs[i] = f(xs[i]);

  auto order = [&] {
    std::vector<int> idx(d + 1);
    for (int i = 0; i <= d; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Vec> nx(d + 1);
    std::vector<double> nf(d + 1);
    for (int i = 0; i <= d; ++i) { nx[i] = xs[idx[i]]; nf[i] = fs[idx[i]]; }
    xs = std::move(nx);
    fs = std::move(nf);
  };
  order();

  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fs[d] - fs[0]) <= tol * (1.0 + std::abs(fs[0]))) break;
    Vec centroid = Vec::Zero(d);
    for (int i = 0; i < d; ++i) centroid += xs[i];
    centroid /= d;

    Vec xr = centroid + (centroid - xs[d]);
    double fr = f(xr);
    if (fr < fs[0]) {
      Vec xe = centroid + 2.0 * (centroid - xs[d]);
      double fe = f(xe);
      if (fe < fr) { xs[d] = xe; fs[d] = fe; }
      else { xs[d] = xr; fs[d] = fr; }
    } else if (fr < fs[d - 1]) {
      xs[d] = xr; fs[d] = fr;
    } else {
      Vec xc = centroid + 0.5 * (xs[d] - centroid);
      double fc = f(xc);
      if (fc < fs[d]) { xs[d] = xc; fs[d] = fc; }
      else {
        for (int i = 1; i <= d; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]);
        }
      }
    }
    order();
  }
  return {xs[0], fs[0]};
}

Result newton_polish(const Objective& f, const Vec& x0, double h, int steps) {
  const int d = static_cast<int>(x0.size());
  Vec x = x0;
  double fx = f(x);
  for (int it = 0; it < steps; ++it) {
    Vec g(d);
    Mat hess(d, d);
    for (int i = 0; i < d; ++i) {
      Vec e = Vec::Zero(d);
      e[i] = h;
      double fp = f(x + e), fm = f(x - e);
      g[i] = (fp - fm) / (2.0 * h);
      hess(i, i) = (fp - 2.0 * fx + fm) / (h * h);
    }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        Vec ei = Vec::Zero(d), ej = Vec::Zero(d);
        ei[i] = h; ej[j] = h;
        double v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) /
                   (4.0 * h * h);
        hess(i, j) = hess(j, i) = v;
      }
    // Levenberg regularization keeps steps downhill when curvature is weak.
    double lam = 1e-12;
    Vec step;
    for (int tries = 0; tries < 30; ++tries) {
      Mat reg = hess + lam * Mat::Identity(d, d);
      step = reg.ldlt().solve(-g);
      if (step.allFinite() && f(x + step) <= fx) break;
      lam = std::max(lam * 10.0, 1e-10);
      if (tries == 29) step = Vec::Zero(d);
    }
    double fn = f(x + step);
    if (!(fn < fx)) break;
    x += step;
    if (fx - fn <= 1e-16 * (1.0 + std::abs(fx))) { fx = fn; break; }
    fx = fn;
  }
  return {x, fx};
}

Vec unit_direction(int d, std::uint64_t index) {
  Vec v(d);
  std::uint64_t state = splitmix64(0xC0FFEE ^ (index * 0x9E3779B97F4A7C15ULL));
  for (int i = 0; i < d; ++i) {
    state = splitmix64(state);
    double u1 = (static_cast<double>(state >> 11) + 1.0) / 9007199254740992.0;
    state = splitmix64(state);
    double u2 = (static_cast<double>(state >> 11) + 1.0) / 9007199254740992.0;
    v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }
  double nrm = v.norm();
  return nrm > 0 ? Vec(v / nrm) : Vec(Vec::Unit(d, 0));
}

}  // namespace optim
}  // namespace toric
