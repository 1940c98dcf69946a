#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "toric/kahler.hpp"
#include "toric/optim.hpp"

namespace toric::oracles {

Vec fd_gradient(const Support& s, const DiagonalCovariance& c, const Vec& p,
                double h) {
  const int n = static_cast<int>(p.size());
  Vec g(n);
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e[j] = h;
    g[j] = (potential(s, c, p + e) - potential(s, c, p - e)) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const Support& s, const DiagonalCovariance& c, const Vec& p,
               double h) {
  const int n = static_cast<int>(p.size());
  Mat out(n, n);
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e[j] = h;
    Vec gp = momentum(s, c, p + e, true);
    Vec gm = momentum(s, c, p - e, true);
    out.col(j) = (gp - gm) / (2.0 * h);
  }
  return 0.5 * (out + out.transpose());
}

double wedge_density(const std::vector<Mat>& hessians) {
  const int n = static_cast<int>(hessians.size());
  const int d = 2 * n;  // slots: 0..n-1 are dp, n..2n-1 are dq
  // omega_i(e_a, e_b) with e = (dp_1..dp_n, dq_1..dq_n) basis:
  // (1/2) H_ab for (dp_a, dq_b) pairs, antisymmetrized.
  std::vector<Mat> forms;
  for (const auto& h : hessians) {
    Mat f = Mat::Zero(d, d);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        f(a, n + b) = 0.5 * h(a, b);
        f(n + b, a) = -0.5 * h(a, b);
      }
    forms.push_back(f);
  }
  // (w_1 ^ .. ^ w_n)(e_1, .., e_2n) = (1/2^n) sum_sigma sgn(sigma)
  //     prod_i w_i(e_sigma(2i-1), e_sigma(2i))
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  double acc = 0.0;
  do {
    // permutation sign by counting inversions
    int inv = 0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        if (perm[a] > perm[b]) ++inv;
    double prod = (inv % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) prod *= forms[i](perm[2 * i], perm[2 * i + 1]);
    acc += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  acc /= std::pow(2.0, n);
  double sign = ((n * (n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  return sign * acc;
}

double sigma_projection_distance(const SparseSystem& f, const Ensemble& e,
                                 const TorusPoint& z) {
  const int n = e.n();
  std::vector<KahlerFrame> fr;
  for (int i = 0; i < n; ++i)
    fr.push_back(make_frame(e.supports[i], e.covariances[i], z));
  const bool real_mode = e.field == Field::Real;

  // Angle of f^i to the space { g : g.vhat = 0, g.(Dv u) = 0 }: project out
  // the conjugated spans and measure what is lost.
  auto dist_for = [&](const CVec& u) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      CVec a = fr[i].unit.conjugate();
      CVec b = (fr[i].dv * u).conjugate();
      // orthonormalize {a, b}
      a /= a.norm();
      b -= (a.adjoint() * b)(0, 0) * a;
      double nb = b.norm();
      const CVec& fi = f.coeffs[i];
      Complex ca = (a.adjoint() * fi)(0, 0);
      double lost = std::norm(ca);
      if (nb > 1e-13) {
        b /= nb;
        lost += std::norm((b.adjoint() * fi)(0, 0));
      }
      acc += lost / fi.squaredNorm();
    }
    return acc;
  };

  // Multistart over u charts (u on the unit sphere modulo scale).
  const int chart_dim = real_mode ? n - 1 : 2 * (n - 1);
  double best = std::numeric_limits<double>::infinity();
  std::vector<CVec> starts;
  for (int j = 0; j < n; ++j) starts.push_back(CVec::Unit(n, j));
  for (int r = 0; r < 10; ++r) {
    Vec raw = optim::unit_direction(real_mode ? n : 2 * n, 5000 + r);
    CVec u(n);
    for (int j = 0; j < n; ++j)
      u[j] = real_mode ? Complex(raw[j], 0.0) : Complex(raw[2 * j], raw[2 * j + 1]);
    starts.push_back(u);
  }
  for (const auto& s0 : starts) {
    if (n == 1) {
      best = std::min(best, dist_for(CVec::Ones(1)));
      continue;
    }
    int k = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(s0[j]) > std::abs(s0[k])) k = j;
    if (std::abs(s0[k]) < 1e-9) continue;
    CVec w = s0 / s0[k];
    Vec z0(chart_dim);
    int t = 0;
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      if (real_mode) z0[t++] = w[j].real();
      else { z0[t] = w[j].real(); z0[t + 1] = w[j].imag(); t += 2; }
    }
    auto from_chart = [&](const Vec& zc) {
      CVec u(n);
      int tt = 0;
      for (int j = 0; j < n; ++j) {
        if (j == k) { u[j] = 1.0; continue; }
        if (real_mode) u[j] = zc[tt++];
        else { u[j] = Complex(zc[tt], zc[tt + 1]); tt += 2; }
      }
      return u;
    };
    auto obj = [&](const Vec& zc) { return dist_for(from_chart(zc)); };
    auto nm = optim::nelder_mead(obj, z0, 0.4, 400, 1e-15);
    auto polished = optim::newton_polish(obj, nm.x, 1e-5, 25);
    best = std::min({best, nm.value, polished.value});
  }
  return std::sqrt(std::max(0.0, best));
}

int sturm_real_root_count(const std::vector<double>& coeffs) {
  auto trim = [](std::vector<double> p) {
    while (p.size() > 1 && std::abs(p.back()) < 1e-12) p.pop_back();
    return p;
  };
  auto deriv = [](const std::vector<double>& p) {
    std::vector<double> d;
    for (size_t k = 1; k < p.size(); ++k) d.push_back(k * p[k]);
    if (d.empty()) d.push_back(0.0);
    return d;
  };
  auto neg_rem = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r = a;
    while (r.size() >= b.size() && !(r.size() == 1 && std::abs(r[0]) < 1e-14)) {
      double factor = r.back() / b.back();
      size_t shift = r.size() - b.size();
      for (size_t k = 0; k < b.size(); ++k) r[shift + k] -= factor * b[k];
      r = trim(r);
      if (r.size() < b.size()) break;
    }
    for (auto& v : r) v = -v;
    return trim(r);
  };
  std::vector<std::vector<double>> chain;
  chain.push_back(trim(coeffs));
  chain.push_back(trim(deriv(chain[0])));
  while (chain.back().size() > 1 ||
         (chain.back().size() == 1 && std::abs(chain.back()[0]) > 1e-14)) {
    if (chain.back().size() == 1) break;
    auto r = neg_rem(chain[chain.size() - 2], chain.back());
    if (r.size() == 1 && std::abs(r[0]) < 1e-14) break;
    chain.push_back(r);
  }
  auto sign_changes_at = [&](double sign_of_inf) {
    int prev = 0, changes = 0;
    for (const auto& p : chain) {
      double lead = p.back();
      int deg = static_cast<int>(p.size()) - 1;
      double v = lead * (sign_of_inf > 0 ? 1.0 : (deg % 2 == 0 ? 1.0 : -1.0));
      int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++changes;
      prev = s;
    }
    return changes;
  };
  return sign_changes_at(-1.0) - sign_changes_at(+1.0);
}

double polygon_area(std::vector<std::pair<double, double>> pts) {
  double cx = 0.0, cy = 0.0;
  for (auto [x, y] : pts) { cx += x; cy += y; }
  cx /= pts.size();
  cy /= pts.size();
  std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
    return std::atan2(a.second - cy, a.first - cx) <
           std::atan2(b.second - cy, b.first - cx);
  });
  double acc = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    auto [x1, y1] = pts[i];
    auto [x2, y2] = pts[(i + 1) % pts.size()];
    acc += x1 * y2 - x2 * y1;
  }
  return 0.5 * std::abs(acc);
}

}  // namespace toric::oracles
