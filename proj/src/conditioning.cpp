#include "toric/conditioning.hpp"

#include <algorithm>
#include <cmath>

#include "toric/optim.hpp"

namespace toric {
namespace {

constexpr double kSingularTol = 1e-12;

std::vector<KahlerFrame> frames_at(const Ensemble& e, const TorusPoint& z) {
  std::vector<KahlerFrame> fr;
  fr.reserve(e.n());
  for (int i = 0; i < e.n(); ++i)
    fr.push_back(make_frame(e.supports[i], e.covariances[i], z));
  return fr;
}

CMat rows_of(const std::vector<CVec>& coeffs, const std::vector<KahlerFrame>& fr) {
  const int n = static_cast<int>(fr.size());
  CMat d(n, n);
  for (int i = 0; i < n; ++i) d.row(i) = coeffs[i].transpose() * fr[i].dv;
  return d;
}

// Chart-based minimization of a scale-invariant Rayleigh-type functional
// over the unit sphere of C^n (or R^n in real mode). The chart pins the
// largest coordinate to 1, removing the scale degeneracy.
struct SphereProblem {
  std::vector<CMat> forms;  // Hermitian PSD matrices Q_i
  bool real_mode = false;

  int n() const { return static_cast<int>(forms[0].rows()); }
  int chart_dim() const { return real_mode ? n() - 1 : 2 * (n() - 1); }

  CVec from_chart(int k, const Vec& z) const {
    CVec v(n());
    int t = 0;
    for (int j = 0; j < n(); ++j) {
      if (j == k) { v[j] = 1.0; continue; }
      if (real_mode) v[j] = z[t++];
      else { v[j] = Complex(z[t], z[t + 1]); t += 2; }
    }
    return v;
  }

  Vec to_chart(int k, const CVec& v) const {
    CVec w = v / v[k];
    Vec z(chart_dim());
    int t = 0;
    for (int j = 0; j < n(); ++j) {
      if (j == k) continue;
      if (real_mode) z[t++] = w[j].real();
      else { z[t] = w[j].real(); z[t + 1] = w[j].imag(); t += 2; }
    }
    return z;
  }

  std::vector<double> values(const CVec& v) const {
    double nv = v.squaredNorm();
    std::vector<double> out;
    out.reserve(forms.size());
    for (const auto& q : forms) {
      Complex r = (v.adjoint() * q * v)(0, 0);
      out.push_back(r.real() / nv);
    }
    return out;
  }
};

// Minimizes obj(v) over the sphere with deterministic multistart; obj maps
// the per-form Rayleigh values to a scalar.
double sphere_minimize(const SphereProblem& prob,
                       const std::function<double(const std::vector<double>&)>& agg,
                       const std::vector<CVec>& extra_starts) {
  const int n = prob.n();
  std::vector<CVec> starts;
  for (int j = 0; j < n; ++j) starts.push_back(CVec::Unit(n, j));
  for (const auto& s : extra_starts)
    if (s.norm() > 0) starts.push_back(s / s.norm());
  for (int r = 0; r < 8; ++r) {
    Vec raw = optim::unit_direction(prob.real_mode ? n : 2 * n, 1000 + r);
    CVec v(n);
    for (int j = 0; j < n; ++j)
      v[j] = prob.real_mode ? Complex(raw[j], 0.0) : Complex(raw[2 * j], raw[2 * j + 1]);
    starts.push_back(v / v.norm());
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    best = std::min(best, agg(prob.values(s)));
    int k = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(s[j]) > std::abs(s[k])) k = j;
    if (std::abs(s[k]) < 1e-9) continue;
    Vec z0 = prob.to_chart(k, s);
    auto f = [&](const Vec& z) { return agg(prob.values(prob.from_chart(k, z))); };
    auto nm = optim::nelder_mead(f, z0, 0.3, 300, 1e-15);
    auto polished = optim::newton_polish(f, nm.x, 1e-5, 20);
    best = std::min({best, nm.value, polished.value});
  }
  return best;
}

// distance^2 aggregate: sum_i |v_i|^2 / |D^-1 v|_{A_i}^2 with the row
// normalization already folded into the forms.
struct DistanceData {
  SphereProblem prob;  // forms Q_i = D^-H (1/2 H_i) D^-1
  bool singular = false;
};

DistanceData distance_data(const std::vector<CVec>& coeffs,
                           const std::vector<KahlerFrame>& fr, Field field) {
  const int n = static_cast<int>(fr.size());
  DistanceData out;
  out.prob.real_mode = field == Field::Real;
  std::vector<CVec> unit_coeffs(coeffs.size());
  for (int i = 0; i < n; ++i) {
    double nf = coeffs[i].norm();
    if (nf < kSingularTol) { out.singular = true; return out; }
    unit_coeffs[i] = coeffs[i] / nf;
  }
  CMat d = rows_of(unit_coeffs, fr);
  Eigen::JacobiSVD<CMat> svd(d);
  if (svd.singularValues()[n - 1] < kSingularTol * svd.singularValues()[0] ||
      svd.singularValues()[n - 1] < kSingularTol) {
    out.singular = true;
    return out;
  }
  CMat dinv = d.inverse();
  for (int i = 0; i < n; ++i) {
    CMat q = dinv.adjoint() * (0.5 * fr[i].hess).cast<Complex>() * dinv;
    out.prob.forms.push_back(0.5 * (q + CMat(q.adjoint())));
  }
  return out;
}

double distance_from_data(const DistanceData& dd) {
  if (dd.singular) return 0.0;
  const int n = dd.prob.n();
  if (n == 1) {
    // |v| = 1 forced: d = 1 / sqrt(Q_00).
    return 1.0 / std::sqrt(dd.prob.forms[0](0, 0).real());
  }
  // phi(v) = sum_i |v_i|^2 / (v^H Q_i v), scale-invariant by construction.
  SphereProblem prob = dd.prob;
  auto phi = [&](const CVec& v) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double bi = (v.adjoint() * prob.forms[i] * v)(0, 0).real();
      if (bi <= 0.0) return std::numeric_limits<double>::infinity();
      acc += std::norm(v[i]) / bi;
    }
    return acc;
  };
  // Starts: basis vectors, eigenvectors of the summed form, quasi-random.
  std::vector<CVec> starts;
  for (int j = 0; j < n; ++j) starts.push_back(CVec::Unit(n, j));
  CMat total = CMat::Zero(n, n);
  for (const auto& q : prob.forms) total += q;
  Eigen::SelfAdjointEigenSolver<CMat> es(total);
  for (int j = 0; j < n; ++j) starts.push_back(es.eigenvectors().col(j));
  for (int r = 0; r < 8; ++r) {
    Vec raw = optim::unit_direction(prob.real_mode ? n : 2 * n, 7000 + r);
    CVec v(n);
    for (int j = 0; j < n; ++j)
      v[j] = prob.real_mode ? Complex(raw[j], 0.0) : Complex(raw[2 * j], raw[2 * j + 1]);
    starts.push_back(v);
  }
  double best = std::numeric_limits<double>::infinity();
  for (auto s : starts) {
    if (prob.real_mode)
      for (int j = 0; j < n; ++j) s[j] = Complex(s[j].real(), 0.0);
    if (s.norm() < 1e-12) continue;
    s /= s.norm();
    best = std::min(best, phi(s));
    int k = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(s[j]) > std::abs(s[k])) k = j;
    if (std::abs(s[k]) < 1e-9) continue;
    Vec z0 = prob.to_chart(k, s);
    auto f = [&](const Vec& z) { return phi(prob.from_chart(k, z)); };
    auto nm = optim::nelder_mead(f, z0, 0.3, 300, 1e-15);
    auto polished = optim::newton_polish(f, nm.x, 1e-5, 20);
    best = std::min({best, nm.value, polished.value});
  }
  // d_P is a sum of n sine-squared terms, so it never exceeds sqrt(n)
  return std::min(std::sqrt(double(n)), std::sqrt(std::max(0.0, best)));
}

void check_root(const SparseSystem& f, const Ensemble& e, const TorusPoint& z,
                double tol, const char* who) {
  // Scale-invariant residual: evaluation against the unit Veronese vectors,
  // so the test is meaningful for roots of any magnitude.
  double res = evaluate_scaled(f, e, z).norm();
  if (res > tol * f.norm())
    throw ValidationError(std::string(who) + ": point is not a root (residual " +
                          std::to_string(res) + ")");
}

std::vector<CVec> fiber_projection(const SparseSystem& f,
                                   const std::vector<KahlerFrame>& fr) {
  std::vector<CVec> out(f.coeffs.size());
  for (size_t i = 0; i < f.coeffs.size(); ++i) {
    Complex c = f.coeffs[i].transpose() * fr[i].unit;
    out[i] = f.coeffs[i] - c * fr[i].unit.conjugate();
  }
  return out;
}

}  // namespace

ConditionMatrix condition_matrix(const SparseSystem& f, const Ensemble& e,
                                 const TorusPoint& z, double tol) {
  check_root(f, e, z, tol, "condition_matrix");
  ConditionMatrix cm;
  cm.frames = frames_at(e, z);
  cm.rows = rows_of(f.coeffs, cm.frames);
  return cm;
}

double fiber_distance_at(const SparseSystem& f, const Ensemble& e,
                         const TorusPoint& z) {
  auto fr = frames_at(e, z);
  auto proj = fiber_projection(f, fr);
  return distance_from_data(distance_data(proj, fr, e.field));
}

double distance_to_sigma(const SparseSystem& f, const Ensemble& e,
                         const TorusPoint& z, double tol) {
  check_root(f, e, z, tol, "distance_to_sigma");
  auto fr = frames_at(e, z);
  // Projection removes the (tiny) residual component, putting f exactly in
  // the fiber the distance is defined on.
  auto proj = fiber_projection(f, fr);
  return distance_from_data(distance_data(proj, fr, e.field));
}

ConditionBounds condition_bounds(const SparseSystem& f, const Ensemble& e,
                                 const TorusPoint& z, double tol) {
  check_root(f, e, z, tol, "condition_bounds");
  auto fr = frames_at(e, z);
  auto proj = fiber_projection(f, fr);
  DistanceData dd = distance_data(proj, fr, e.field);
  const double inf = std::numeric_limits<double>::infinity();
  if (dd.singular) return {inf, inf};  // degenerate root
  const int n = dd.prob.n();

  // upper = max_i sqrt(lambda_max(Q_i)), exact.
  double upper = 0.0;
  std::vector<CVec> top_vecs;
  for (const auto& q : dd.prob.forms) {
    Eigen::SelfAdjointEigenSolver<CMat> es(q);
    upper = std::max(upper, std::sqrt(std::max(0.0, es.eigenvalues()[n - 1])));
    top_vecs.push_back(es.eigenvectors().col(n - 1));
  }

  // lower = max over the sphere of min_i sqrt(v^H Q_i v); seeding with the
  // top eigenvectors makes the unmixed case exact.
  SphereProblem prob = dd.prob;
  auto agg = [](const std::vector<double>& vals) {
    return -*std::min_element(vals.begin(), vals.end());
  };
  double neg = sphere_minimize(prob, agg, top_vecs);
  double lower = std::sqrt(std::max(0.0, -neg));
  return {lower, upper};
}

RestrictedCondition restricted_condition(const SparseSystem& f, const Ensemble& e,
                                         const Region& u,
                                         const RestrictedOptions& opts) {
  if (u.empty()) throw ValidationError("restricted_condition: empty region");
  if (!u.p_bounded())
    throw ValidationError("restricted_condition: region must have bounded p boxes");
  const int n = u.n;
  const int g = std::max(1, opts.grid_points);

  RestrictedCondition best;
  best.min_distance = std::numeric_limits<double>::infinity();

  auto eval_at = [&](const TorusPoint& z) {
    double d = fiber_distance_at(f, e, z);
    if (d < best.min_distance) {
      best.min_distance = d;
      best.argmin = z;
    }
  };
  auto grid_scan = [&](const std::vector<Interval>& axes) {
    // axes holds 2n intervals: p then q.
    std::vector<int> idx(2 * n, 0);
    double spacing = 0.0;
    for (const auto& iv : axes) spacing = std::max(spacing, iv.length() / std::max(1, g - 1));
    while (true) {
      Vec p(n), q(n);
      for (int a = 0; a < 2 * n; ++a) {
        const Interval& iv = axes[a];
        double x = g == 1 ? 0.5 * (iv.lo + iv.hi)
                          : iv.lo + iv.length() * idx[a] / (g - 1);
        if (a < n) p[a] = x; else q[a - n] = x;
      }
      eval_at(TorusPoint(p, q));
      int a = 2 * n - 1;
      while (a >= 0) {
        if (++idx[a] < g) break;
        idx[a] = 0;
        --a;
      }
      if (a < 0) break;
    }
    return spacing;
  };

  double spacing = 0.0;
  for (const auto& b : u.boxes) {
    std::vector<Interval> axes = b.p;
    axes.insert(axes.end(), b.q.begin(), b.q.end());
    spacing = std::max(spacing, grid_scan(axes));
  }
  // Local refinement around the best node, clamped into the owning box.
  for (int round = 0; round < opts.refine_rounds && spacing > 0; ++round) {
    TorusPoint center = best.argmin;
    double h = spacing;
    std::vector<Interval> axes(2 * n);
    for (int j = 0; j < n; ++j) {
      axes[j] = Interval{center.p[j] - h, center.p[j] + h};
      axes[n + j] = Interval{center.q[j] - h, center.q[j] + h};
    }
    // Clamp to region: shrink axes toward the containing box of the center.
    for (const auto& b : u.boxes) {
      bool inside = true;
      for (int j = 0; j < n && inside; ++j) inside = b.p[j].contains(center.p[j]);
      if (!inside) continue;
      for (int j = 0; j < n; ++j) {
        axes[j].lo = std::max(axes[j].lo, b.p[j].lo);
        axes[j].hi = std::min(axes[j].hi, b.p[j].hi);
        axes[n + j].lo = std::max(axes[n + j].lo, b.q[j].lo);
        axes[n + j].hi = std::min(axes[n + j].hi, b.q[j].hi);
      }
      break;
    }
    spacing = grid_scan(axes);
  }
  best.final_spacing = spacing;
  best.mu = best.min_distance > 0 ? 1.0 / best.min_distance
                                  : std::numeric_limits<double>::infinity();
  return best;
}

DilationReport mixed_dilation(const std::vector<Mat>& hessians) {
  const int n = static_cast<int>(hessians.size());
  if (n == 0) throw ValidationError("mixed_dilation: no inputs");
  for (const auto& h : hessians) {
    if (h.rows() != n || h.cols() != n)
      throw ValidationError("mixed_dilation: matrices must be n x n");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.eigenvalues()[0] <= 0.0)
      throw ValidationError("mixed_dilation: inputs must be positive definite");
  }

  auto det_normalize = [&](Mat l) {
    double det = l.determinant();
    return Mat(l / std::pow(std::abs(det), 1.0 / n));
  };
  auto ratios_for = [&](const Mat& l) {
    Vec r(n);
    for (int i = 0; i < n; ++i) {
      Mat m = l.transpose() * hessians[i] * l;
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
      r[i] = es.eigenvalues()[n - 1] / es.eigenvalues()[0];
    }
    return r;
  };

  DilationReport rep;
  if (n == 1) {
    rep.minimizer = Mat::Identity(1, 1);
    rep.per_support_ratios = Vec::Ones(1);
    rep.kappa_upper = 1.0;
    return rep;
  }
  bool all_equal = true;
  for (int i = 1; i < n; ++i)
    if ((hessians[i] - hessians[0]).norm() > 1e-12 * hessians[0].norm())
      all_equal = false;
  if (all_equal) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hessians[0]);
    Mat inv_sqrt = es.operatorInverseSqrt();
    rep.minimizer = det_normalize(inv_sqrt);
    rep.per_support_ratios = ratios_for(rep.minimizer);
    rep.kappa_upper = rep.per_support_ratios.maxCoeff();
    return rep;
  }

  // Parametrize det-1 upper-triangular L: n-1 log-diagonal entries (last one
  // balances the determinant) plus the strict upper triangle.
  const int diag_params = n - 1;
  const int off_params = n * (n - 1) / 2;
  const int dim = diag_params + off_params;
  auto unpack = [&](const Vec& x) {
    Mat l = Mat::Zero(n, n);
    double sum = 0.0;
    for (int i = 0; i < diag_params; ++i) {
      l(i, i) = std::exp(x[i]);
      sum += x[i];
    }
    l(n - 1, n - 1) = std::exp(-sum);
    int t = diag_params;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) l(i, j) = x[t++];
    return l;
  };
  auto objective = [&](const Vec& x) { return ratios_for(unpack(x)).maxCoeff(); };

  // Whitening the averaged metric is a strong deterministic start.
  Mat mean = Mat::Zero(n, n);
  for (const auto& h : hessians) mean += h / n;
  Eigen::LLT<Mat> llt(mean);
  Mat r_upper = llt.matrixU();
  Mat start_l = det_normalize(r_upper.inverse());
  Vec x0(dim);
  {
    int t = 0;
    for (int i = 0; i < diag_params; ++i) x0[i] = std::log(start_l(i, i));
    t = diag_params;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) x0[t++] = start_l(i, j);
  }

  Vec best_x = x0;
  double best_val = objective(x0);
  std::vector<Vec> starts = {x0, Vec::Zero(dim)};
  for (int r = 0; r < 6; ++r) starts.push_back(x0 + 0.5 * optim::unit_direction(dim, 300 + r));
  for (const auto& s : starts) {
    auto nm = optim::nelder_mead(objective, s, 0.25, 500, 1e-14);
    if (nm.value < best_val) { best_val = nm.value; best_x = nm.x; }
  }
  rep.minimizer = det_normalize(unpack(best_x));
  rep.per_support_ratios = ratios_for(rep.minimizer);
  rep.kappa_upper = rep.per_support_ratios.maxCoeff();
  return rep;
}

KappaReport kappa_over_region(const Ensemble& e, const Region& u,
                              const KappaOptions& opts) {
  if (u.empty()) throw ValidationError("kappa_over_region: empty region");
  KappaReport rep;
  if (e.unmixed()) {
    rep.kappa_upper = 1.0;
    return rep;
  }
  if (!u.p_bounded())
    throw ValidationError("kappa_over_region: p boxes must be bounded");
  const int n = u.n;
  const int g = std::max(2, opts.grid_points);
  double best = 1.0;
  for (const auto& b : u.boxes) {
    std::vector<int> idx(n, 0);
    for (const auto& iv : b.p)
      rep.grid_spacing = std::max(rep.grid_spacing, iv.length() / (g - 1));
    while (true) {
      Vec p(n);
      for (int j = 0; j < n; ++j)
        p[j] = b.p[j].lo + b.p[j].length() * idx[j] / (g - 1);
      std::vector<Mat> hs;
      for (int i = 0; i < e.n(); ++i)
        hs.push_back(hessian(e.supports[i], e.covariances[i], p));
      best = std::max(best, mixed_dilation(hs).kappa_upper);
      int a = n - 1;
      while (a >= 0) {
        if (++idx[a] < g) break;
        idx[a] = 0;
        --a;
      }
      if (a < 0) break;
    }
  }
  rep.kappa_upper = best;
  return rep;
}

}  // namespace toric
