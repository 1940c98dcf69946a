#include "toric/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace toric {
namespace {

constexpr double kZTwoSided99 = 2.5758293035489004;
constexpr double kZOneSided99 = 2.3263478740408408;

double wilson_center(long k, long n, double z, int sign) {
  if (n == 0) return 0.0;
  double p = static_cast<double>(k) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = p + z2 / (2.0 * n);
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::clamp((center + sign * half) / denom, 0.0, 1.0);
}

struct RootEventOutcome {
  bool degenerate = false;
  bool root_event = false;
  bool sweep_event = false;
};

TorusPoint real_log_point(const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec p(n), q(n);
  for (int j = 0; j < n; ++j) {
    p[j] = std::log(std::abs(x[j]));
    q[j] = x[j] >= 0 ? 0.0 : kTwoPi / 2.0;
  }
  return TorusPoint(p, q);
}

// Solves the sampled linear system and returns its unique torus root, or
// signals a degenerate draw (singular matrix / zero coordinate).
bool linear_root(const SparseSystem& f, int n, Field field, TorusPoint* z) {
  CMat m(n, n);
  CVec rhs(n);
  for (int i = 0; i < n; ++i) {
    rhs[i] = -f.coeffs[i][0];
    for (int j = 0; j < n; ++j) m(i, j) = f.coeffs[i][j + 1];
  }
  Eigen::FullPivLU<CMat> lu(m);
  if (lu.rank() < n) return false;
  CVec x = lu.solve(rhs);
  for (int j = 0; j < n; ++j) {
    double ax = std::abs(x[j]);
    if (!(ax > 1e-12 && ax < 1e12)) return false;
  }
  if (field == Field::Real) {
    Vec xr(n);
    for (int j = 0; j < n; ++j) xr[j] = x[j].real();
    *z = real_log_point(xr);
  } else {
    Vec p(n), q(n);
    for (int j = 0; j < n; ++j) {
      p[j] = std::log(std::abs(x[j]));
      q[j] = std::arg(x[j]);
    }
    *z = TorusPoint(p, q);
  }
  return true;
}

RootList enumerate_roots(const SparseSystem& f, const Ensemble& e) {
  if (e.n() == 1) return univariate_roots(f, e.supports[0], e.covariances[0]);
  return bivariate_roots(f, e);
}

// Distance at enumerated roots; the fiber projection inside strips the
// (already tiny) residual, so no root precondition can misfire on the far
// tail draws these estimators exist to count.
double min_distance_over(const SparseSystem& f, const Ensemble& e,
                         const std::vector<TorusPoint>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : pts) best = std::min(best, fiber_distance_at(f, e, z));
  return best;
}

std::vector<TorusPoint> sweep_grid(const Region& u, int g) {
  std::vector<TorusPoint> pts;
  if (g <= 0) return pts;
  const int n = u.n;
  for (const auto& b : u.boxes) {
    std::vector<int> idx(2 * n, 0);
    while (true) {
      Vec p(n), q(n);
      for (int a = 0; a < 2 * n; ++a) {
        const Interval& iv = a < n ? b.p[a] : b.q[a - n];
        double x = g == 1 ? 0.5 * (iv.lo + iv.hi)
                          : iv.lo + iv.length() * (idx[a] + 0.5) / g;
        if (a < n) p[a] = x; else q[a - n] = x;
      }
      pts.push_back(TorusPoint(p, q));
      int a = 2 * n - 1;
      while (a >= 0) {
        if (++idx[a] < g) break;
        idx[a] = 0;
        --a;
      }
      if (a < 0) break;
    }
  }
  return pts;
}

TrialReport mean_report(const std::vector<double>& values, long discarded,
                        std::uint64_t seed) {
  TrialReport r;
  r.trials = static_cast<long>(values.size());
  r.discarded_degenerate = discarded;
  r.seed = seed;
  if (values.empty()) return r;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = values.size() > 1 ? var / (values.size() - 1) : 0.0;
  r.estimate = mean;
  r.std_error = std::sqrt(var / values.size());
  r.conf_lo = mean - kZTwoSided99 * r.std_error;
  r.conf_hi = mean + kZTwoSided99 * r.std_error;
  return r;
}

}  // namespace

double wilson_lower(long successes, long total, double z) {
  return wilson_center(successes, total, z, -1);
}

double wilson_upper(long successes, long total, double z) {
  return wilson_center(successes, total, z, +1);
}

TrialReport probability_report(long successes, long valid, long discarded,
                               std::uint64_t seed) {
  TrialReport r;
  r.trials = valid;
  r.discarded_degenerate = discarded;
  r.seed = seed;
  if (valid > 0) {
    r.estimate = static_cast<double>(successes) / valid;
    r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / valid);
    r.conf_lo = wilson_lower(successes, valid, kZTwoSided99);
    r.conf_hi = wilson_upper(successes, valid, kZTwoSided99);
  }
  return r;
}

TrialReport estimate_nu_lin(int n, double eps, long trials, std::uint64_t seed,
                            Field field, int threads) {
  Ensemble lin = Ensemble::linear(n, field);
  struct Outcome { bool degenerate; bool event; };
  auto per_trial = [&](long, std::uint64_t s) -> Outcome {
    SparseSystem f = sample(lin, s);
    TorusPoint z;
    if (!linear_root(f, n, field, &z)) return {true, false};
    if (n == 1) {
      // The univariate linear fiber has an empty discriminant slice, so the
      // multiprojective distance is identically 1 and its tail carries no
      // information. Use the flat-metric condition number instead: the
      // largest singular value of D(f)^-1 after unit row scaling.
      auto fr = make_frame(lin.supports[0], lin.covariances[0], z);
      Complex row = (f.coeffs[0].transpose() * fr.dv)(0, 0);
      double dval = std::abs(row) / f.coeffs[0].norm();
      return {false, dval < eps};
    }
    return {false, fiber_distance_at(f, lin, z) < eps};
  };
  auto outcomes = run_trials<Outcome>(trials, seed, threads, per_trial);
  long k = 0, valid = 0, discarded = 0;
  for (const auto& o : outcomes) {
    if (o.degenerate) { ++discarded; continue; }
    ++valid;
    if (o.event) ++k;
  }
  return probability_report(k, valid, discarded, seed);
}

NuSparseReport estimate_nu_A(const Ensemble& e, const Region& u, double eps,
                             long trials, std::uint64_t seed,
                             const NuSparseOptions& opts, int threads) {
  auto grid = sweep_grid(u, opts.sweep_points);
  auto per_trial = [&](long, std::uint64_t s) -> RootEventOutcome {
    RootEventOutcome o;
    if (u.empty()) return o;
    SparseSystem f = sample(e, s);
    RootList rl = enumerate_roots(f, e);
    if (rl.degenerate_flag) { o.degenerate = true; return o; }
    std::vector<TorusPoint> in_region;
    for (const auto& z : rl.roots)
      if (u.contains(z)) in_region.push_back(z);
    double dmin = min_distance_over(f, e, in_region);
    o.root_event = dmin < eps;
    o.sweep_event = o.root_event;
    if (!o.sweep_event) {
      for (const auto& z : grid) {
        if (fiber_distance_at(f, e, z) < eps) { o.sweep_event = true; break; }
      }
    }
    return o;
  };
  auto outcomes = run_trials<RootEventOutcome>(trials, seed, threads, per_trial);
  long k_root = 0, k_sweep = 0, valid = 0, discarded = 0;
  for (const auto& o : outcomes) {
    if (o.degenerate) { ++discarded; continue; }
    ++valid;
    if (o.root_event) ++k_root;
    if (o.sweep_event) ++k_sweep;
  }
  NuSparseReport rep;
  rep.root_based = probability_report(k_root, valid, discarded, seed);
  rep.with_sweep = probability_report(k_sweep, valid, discarded, seed);
  return rep;
}

std::vector<Thm1Row> check_thm1(const Support& s, const std::vector<double>& eps_grid,
                                long trials, std::uint64_t seed, int threads) {
  if (!s.full_dim)
    throw ValidationError("check_thm1: support hull must be full-dimensional");
  const int n = s.n();
  if (n > 2) throw ValidationError("check_thm1: n <= 2 only");
  Ensemble e = Ensemble::unmixed_from(s, DiagonalCovariance::identity(s.rows()), n,
                                      Field::Complex);
  struct Outcome { bool degenerate; double dmin; };
  auto per_trial = [&](long, std::uint64_t sd) -> Outcome {
    SparseSystem f = sample(e, sd);
    RootList rl = enumerate_roots(f, e);
    if (rl.degenerate_flag) return {true, 0.0};
    return {false, min_distance_over(f, e, rl.roots)};
  };
  auto outcomes = run_trials<Outcome>(trials, seed, threads, per_trial);

  double vol = boost::rational_cast<double>(normalized_volume(newton_polytope(s)));
  double m = s.rows();
  double coef = std::pow(n, 3) * (n + 1.0) * vol * (m - 1.0) * (m - 2.0);
  std::vector<Thm1Row> table;
  for (double eps : eps_grid) {
    long k = 0, valid = 0;
    for (const auto& o : outcomes) {
      if (o.degenerate) continue;
      ++valid;
      if (o.dmin < eps) ++k;
    }
    Thm1Row row;
    row.eps = eps;
    row.empirical = valid ? static_cast<double>(k) / valid : 0.0;
    row.upper99 = wilson_upper(k, valid, kZOneSided99);
    row.rhs = coef * std::pow(eps, 4);
    row.pass = row.upper99 <= row.rhs || row.rhs >= 1.0;
    table.push_back(row);
  }
  return table;
}

Thm5Report check_thm5(const Ensemble& e, const Region& u, double eps, long trials,
                      std::uint64_t seed, const NuSparseOptions& opts, int threads) {
  if (e.field != Field::Complex)
    throw ValidationError("check_thm5: complex ensemble required");
  Thm5Report rep;
  NuSparseReport nu_a = estimate_nu_A(e, u, eps, trials, seed, opts, threads);
  rep.lhs = nu_a.root_based;
  rep.lhs_sweep = nu_a.with_sweep;

  Ensemble lin = Ensemble::linear(e.n(), Field::Complex);
  IntegralResult top = expected_roots(e, u);
  IntegralResult bottom = expected_roots(lin, u);
  rep.volume_ratio = top.value / bottom.value;
  rep.kappa_upper = kappa_over_region(e, u).kappa_upper;
  rep.inflated_eps = std::sqrt(rep.kappa_upper) * eps;
  rep.nu_lin = estimate_nu_lin(e.n(), rep.inflated_eps, trials,
                               derive_seed(seed, 0x5EED), Field::Complex, threads);
  rep.rhs = rep.volume_ratio * rep.nu_lin.estimate;
  rep.slack = rep.rhs - rep.lhs.estimate;
  double lhs_lo = wilson_lower(
      static_cast<long>(std::lround(rep.lhs.estimate * rep.lhs.trials)),
      rep.lhs.trials, kZOneSided99);
  double rhs_hi = rep.volume_ratio *
                  wilson_upper(static_cast<long>(std::lround(rep.nu_lin.estimate *
                                                             rep.nu_lin.trials)),
                               rep.nu_lin.trials, kZOneSided99);
  rep.pass = lhs_lo <= rhs_hi;
  return rep;
}

TrialReport estimate_expected_real_roots(const Ensemble& e, const Region& u,
                                         long trials, std::uint64_t seed,
                                         bool both_signs, int threads) {
  if (e.field != Field::Real)
    throw ValidationError("estimate_expected_real_roots: real ensemble required");
  struct Outcome { bool degenerate; double count; };
  auto per_trial = [&](long, std::uint64_t s) -> Outcome {
    SparseSystem f = sample(e, s);
    RootList rl = both_signs ? real_roots_all_signs(f, e) : real_roots(f, e);
    if (rl.degenerate_flag) return {true, 0.0};
    return {false, static_cast<double>(u.empty() ? 0 : count_roots_in_region(rl, u))};
  };
  auto outcomes = run_trials<Outcome>(trials, seed, threads, per_trial);
  std::vector<double> counts;
  long discarded = 0;
  for (const auto& o : outcomes) {
    if (o.degenerate) { ++discarded; continue; }
    counts.push_back(o.count);
  }
  return mean_report(counts, discarded, seed);
}

Thm6Report check_thm6(const Support& s, const DiagonalCovariance& c, const Region& u,
                      double eps, long trials, std::uint64_t seed, int threads) {
  const int n = s.n();
  if (n > 2) throw ValidationError("check_thm6: n <= 2 only");
  Ensemble e = Ensemble::unmixed_from(s, c, n, Field::Real);
  struct Outcome { bool degenerate; bool event; };
  auto per_trial = [&](long, std::uint64_t sd) -> Outcome {
    SparseSystem f = sample(e, sd);
    RootList rl = real_roots(f, e);
    if (rl.degenerate_flag) return {true, false};
    std::vector<TorusPoint> in_region;
    for (const auto& z : rl.roots)
      if (u.contains(z)) in_region.push_back(z);
    double dmin = min_distance_over(f, e, in_region);
    return {false, dmin < eps};
  };
  auto outcomes = run_trials<Outcome>(trials, seed, threads, per_trial);
  long k = 0, valid = 0, discarded = 0;
  for (const auto& o : outcomes) {
    if (o.degenerate) { ++discarded; continue; }
    ++valid;
    if (o.event) ++k;
  }
  Thm6Report rep;
  rep.lhs = probability_report(k, valid, discarded, seed);
  rep.expected = estimate_expected_real_roots(e, u, trials, derive_seed(seed, 0xE0),
                                              false, threads);
  rep.nu_real = estimate_nu_lin(n, eps, trials, derive_seed(seed, 0xE1), Field::Real,
                                threads);
  rep.rhs = rep.expected.estimate * rep.nu_real.estimate;
  rep.slack = rep.rhs - rep.lhs.estimate;
  double lhs_lo = wilson_lower(k, valid, kZOneSided99);
  double rhs_hi =
      rep.expected.conf_hi *
      wilson_upper(static_cast<long>(std::lround(rep.nu_real.estimate *
                                                 rep.nu_real.trials)),
                   rep.nu_real.trials, kZOneSided99);
  rep.pass = lhs_lo <= rhs_hi;
  return rep;
}

std::pair<Support, DiagonalCovariance> kostlan_covariance(int d, int n) {
  if (d < 1 || n < 1) throw ValidationError("kostlan_covariance: need d, n >= 1");
  std::vector<std::vector<int>> rows;
  std::vector<int> cur(n, 0);
  // enumerate all exponents with total degree <= d in lexicographic order
  while (true) {
    int total = 0;
    for (int v : cur) total += v;
    if (total <= d) rows.push_back(cur);
    int a = n - 1;
    while (a >= 0) {
      if (++cur[a] <= d) break;
      cur[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
  IMat m(static_cast<int>(rows.size()), n);
  Vec w(static_cast<int>(rows.size()));
  auto factorial = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  for (size_t r = 0; r < rows.size(); ++r) {
    int total = 0;
    double denom = 1.0;
    for (int j = 0; j < n; ++j) {
      m(static_cast<int>(r), j) = rows[r][j];
      total += rows[r][j];
      denom *= factorial(rows[r][j]);
    }
    denom *= factorial(d - total);
    w[static_cast<int>(r)] = factorial(d) / denom;
  }
  return {Support::from_rows(m), DiagonalCovariance::from_weights(w)};
}

}  // namespace toric
