// Monte Carlo harnesses for the tail-bound audits at desk scale:
// condition-number tails, expected counts, and bound audits with confidence
// intervals. All estimates are deterministic in (inputs, seed, trials) and
// independent of the thread count.
#pragma once

#include "toric/conditioning.hpp"
#include "toric/rootfind.hpp"
#include "toric/volume.hpp"

namespace toric {

struct TrialReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double conf_lo = 0.0;  // Wilson 99% (two-sided) for probabilities,
  double conf_hi = 0.0;  // normal 99% for means
  long trials = 0;
  long discarded_degenerate = 0;
  std::uint64_t seed = 0;
};

// Wilson score interval helpers; z99 two-sided = 2.5758, one-sided = 2.3263.
double wilson_lower(long successes, long total, double z);
double wilson_upper(long successes, long total, double z);
TrialReport probability_report(long successes, long valid, long discarded,
                               std::uint64_t seed);

// Probability that a random linear system's condition number exceeds 1/eps,
// i.e. that the distance to the discriminant at its root is below eps.
TrialReport estimate_nu_lin(int n, double eps, long trials, std::uint64_t seed,
                            Field field, int threads = 1);

struct NuSparseOptions {
  int sweep_points = 0;  // per-axis fiber sweep grid; 0 = roots only
};

// Root-based estimate of Prob[mu(f, U) > 1/eps] plus, when enabled, a coarse
// non-root fiber sweep; the sweep statistic is reported separately since the
// root events dominate but do not exhaust the region minimum.
struct NuSparseReport {
  TrialReport root_based;
  TrialReport with_sweep;
};
NuSparseReport estimate_nu_A(const Ensemble& e, const Region& u, double eps,
                             long trials, std::uint64_t seed,
                             const NuSparseOptions& opts = {}, int threads = 1);

struct Thm1Row {
  double eps = 0.0;
  double empirical = 0.0;
  double upper99 = 0.0;  // one-sided Wilson upper bound
  double rhs = 0.0;
  bool pass = false;
};
// Audits Prob[min-root distance < eps] <= n^3 (n+1) Vol(A) (#A-1)(#A-2) eps^4
// for the unmixed ensemble with unit covariance.
std::vector<Thm1Row> check_thm1(const Support& s, const std::vector<double>& eps_grid,
                                long trials, std::uint64_t seed, int threads = 1);

struct Thm5Report {
  TrialReport lhs;          // nu_A(U, eps), root events
  TrialReport lhs_sweep;    // with the fiber sweep folded in
  TrialReport nu_lin;       // at the inflated epsilon
  double volume_ratio = 0.0;
  double kappa_upper = 0.0;
  double inflated_eps = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};
Thm5Report check_thm5(const Ensemble& e, const Region& u, double eps, long trials,
                      std::uint64_t seed, const NuSparseOptions& opts = {},
                      int threads = 1);

// Mean count of real roots with zeta in exp(U_p); both_signs extends the
// count to all real roots via the sign-flip orthant patterns.
TrialReport estimate_expected_real_roots(const Ensemble& e, const Region& u,
                                         long trials, std::uint64_t seed,
                                         bool both_signs, int threads = 1);

struct Thm6Report {
  TrialReport lhs;        // Prob[mu(f, U) > 1/eps], real roots
  TrialReport expected;   // E(U)
  TrialReport nu_real;    // real linear tail at eps
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};
Thm6Report check_thm6(const Support& s, const DiagonalCovariance& c, const Region& u,
                      double eps, long trials, std::uint64_t seed, int threads = 1);

// Dense degree-d ensemble: exponents of total degree <= d with multinomial
// variance weights d!/(a_1! .. a_n! (d - sum a)!).
std::pair<Support, DiagonalCovariance> kostlan_covariance(int d, int n);

// Deterministic chunked parallel map over trials; outcomes are collected in
// trial order so any reduction is independent of scheduling.
template <typename T, typename Fn>
std::vector<T> run_trials(long trials, std::uint64_t seed, int threads,
                          const Fn& per_trial);

}  // namespace toric

#include "toric/experiments_impl.hpp"
