#include "toric/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "toric/experiments.hpp"
#include "toric/optim.hpp"

namespace toric::cli {
namespace {

using nlohmann::json;

std::string fmt17_impl(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError(path + ": " + msg);
}

const json& expect(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) fail(path + "." + key, "missing required field");
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    fail(path, "expected a number or \"inf\"/\"-inf\"");
  }
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long as_long(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

Support parse_support(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const int m = static_cast<int>(j.size());
  int n = -1;
  for (int r = 0; r < m; ++r) {
    const json& row = j.at(r);
    if (!row.is_array() || row.empty())
      fail(path + "[" + std::to_string(r) + "]", "expected an integer array");
    if (n < 0) n = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != n)
      fail(path + "[" + std::to_string(r) + "]", "inconsistent row length");
  }
  IMat rows(m, n);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) {
      const json& v = j.at(r).at(c);
      if (!v.is_number_integer())
        fail(path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
             "expected an integer exponent");
      rows(r, c) = v.get<int>();
    }
  return Support::from_rows(rows);
}

DiagonalCovariance parse_covariance(const json& j, const Support& s,
                                    const std::string& path) {
  if (j.is_string()) {
    std::string spec = j.get<std::string>();
    if (spec.rfind("kostlan ", 0) == 0) {
      int d = std::atoi(spec.c_str() + 8);
      auto [ks, kc] = kostlan_covariance(d, s.n());
      if (ks.exponents != s.exponents)
        fail(path, "kostlan weights require the full degree-" + std::to_string(d) +
                       " support (all exponents with total degree <= d, "
                       "lexicographic order)");
      return kc;
    }
    fail(path, "unknown covariance spec \"" + spec + "\"");
  }
  if (!j.is_array()) fail(path, "expected an array of positive weights");
  if (static_cast<int>(j.size()) != s.rows())
    fail(path, "length " + std::to_string(j.size()) + " does not match support rows " +
                   std::to_string(s.rows()));
  Vec w(s.rows());
  for (int i = 0; i < s.rows(); ++i) {
    double v = as_number(j.at(i), path + "[" + std::to_string(i) + "]");
    if (!(v > 0.0)) fail(path + "[" + std::to_string(i) + "]", "weights must be > 0");
    w[i] = v;
  }
  return DiagonalCovariance::from_weights(w);
}

Ensemble parse_ensemble(const json& j, const std::string& path) {
  Field field = Field::Complex;
  if (j.contains("field")) {
    std::string f = j.at("field").get<std::string>();
    if (f == "complex") field = Field::Complex;
    else if (f == "real") field = Field::Real;
    else fail(path + ".field", "expected \"complex\" or \"real\"");
  }
  if (j.contains("kostlan")) {
    const json& k = j.at("kostlan");
    int d = static_cast<int>(as_long(expect(k, "d", path + ".kostlan"), path + ".kostlan.d"));
    int n = static_cast<int>(as_long(expect(k, "n", path + ".kostlan"), path + ".kostlan.n"));
    auto [s, c] = kostlan_covariance(d, n);
    return Ensemble::unmixed_from(s, c, n, field);
  }
  const json& sup = expect(j, "supports", path);
  if (!sup.is_array() || sup.empty()) fail(path + ".supports", "expected support list");
  std::vector<Support> supports;
  for (size_t i = 0; i < sup.size(); ++i)
    supports.push_back(parse_support(sup.at(i), path + ".supports[" + std::to_string(i) + "]"));
  std::vector<DiagonalCovariance> covs;
  if (j.contains("covariances")) {
    const json& cj = j.at("covariances");
    if (!cj.is_array() || cj.size() != sup.size())
      fail(path + ".covariances", "expected one covariance per support");
    for (size_t i = 0; i < cj.size(); ++i)
      covs.push_back(parse_covariance(cj.at(i), supports[i],
                                      path + ".covariances[" + std::to_string(i) + "]"));
  } else {
    for (const auto& s : supports) covs.push_back(DiagonalCovariance::identity(s.rows()));
  }
  return Ensemble::make(std::move(supports), std::move(covs), field);
}

Interval parse_interval(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
  Interval iv{as_number(j.at(0), path + "[0]"), as_number(j.at(1), path + "[1]")};
  if (!(iv.lo <= iv.hi)) fail(path, "interval must satisfy lo <= hi");
  return iv;
}

Region parse_region(const json& j, int n, const std::string& path) {
  const json& bj = expect(j, "boxes", path);
  if (!bj.is_array() || bj.empty()) fail(path + ".boxes", "expected at least one box");
  std::vector<Box> boxes;
  for (size_t b = 0; b < bj.size(); ++b) {
    std::string bp = path + ".boxes[" + std::to_string(b) + "]";
    Box box;
    const json& pj = expect(bj.at(b), "p", bp);
    if (!pj.is_array() || static_cast<int>(pj.size()) != n)
      fail(bp + ".p", "expected " + std::to_string(n) + " intervals");
    for (int a = 0; a < n; ++a)
      box.p.push_back(parse_interval(pj.at(a), bp + ".p[" + std::to_string(a) + "]"));
    if (bj.at(b).contains("q")) {
      const json& qj = bj.at(b).at("q");
      if (!qj.is_array() || static_cast<int>(qj.size()) != n)
        fail(bp + ".q", "expected " + std::to_string(n) + " intervals");
      for (int a = 0; a < n; ++a)
        box.q.push_back(parse_interval(qj.at(a), bp + ".q[" + std::to_string(a) + "]"));
    } else {
      box.q.assign(n, Interval{0.0, kTwoPi});
    }
    boxes.push_back(std::move(box));
  }
  return Region::from_boxes(std::move(boxes), n);
}

SparseSystem parse_system(const json& j, const Ensemble& e, const std::string& path) {
  if (j.contains("seed"))
    return sample(e, static_cast<std::uint64_t>(as_long(j.at("seed"), path + ".seed")));
  const json& cj = expect(j, "coeffs", path);
  if (!cj.is_array() || static_cast<int>(cj.size()) != e.n())
    fail(path + ".coeffs", "expected one coefficient vector per equation");
  SparseSystem f;
  for (int i = 0; i < e.n(); ++i) {
    const json& vi = cj.at(i);
    std::string pi = path + ".coeffs[" + std::to_string(i) + "]";
    if (!vi.is_array() || static_cast<int>(vi.size()) != e.supports[i].rows())
      fail(pi, "expected " + std::to_string(e.supports[i].rows()) + " entries");
    CVec v(e.supports[i].rows());
    for (int a = 0; a < v.size(); ++a) {
      const json& entry = vi.at(a);
      std::string pa = pi + "[" + std::to_string(a) + "]";
      if (entry.is_array()) {
        if (entry.size() != 2) fail(pa, "expected [re, im]");
        v[a] = Complex(as_number(entry.at(0), pa + "[0]"), as_number(entry.at(1), pa + "[1]"));
      } else {
        v[a] = Complex(as_number(entry, pa), 0.0);
      }
    }
    f.coeffs.push_back(std::move(v));
  }
  return f;
}

QuadratureOptions parse_quadrature(const json& cfg) {
  QuadratureOptions opts;
  if (cfg.contains("quadrature")) {
    const json& q = cfg.at("quadrature");
    if (q.contains("rel_tol")) opts.rel_tol = as_number(q.at("rel_tol"), "quadrature.rel_tol");
    if (q.contains("abs_tol")) opts.abs_tol = as_number(q.at("abs_tol"), "quadrature.abs_tol");
    if (q.contains("max_panels"))
      opts.max_panels = static_cast<int>(as_long(q.at("max_panels"), "quadrature.max_panels"));
  }
  return opts;
}

// ---- output plumbing ----

struct Outputs {
  std::filesystem::path dir;
  std::string command;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  json summary;

  void write(const json& resolved_cfg) {
    std::filesystem::create_directories(dir);
    std::filesystem::path csv_path = dir / (command + ".csv");
    std::ofstream csv(csv_path);
    csv << "schema_version";
    for (const auto& h : csv_header) csv << "," << h;
    csv << "\n";
    for (const auto& row : csv_rows) {
      csv << 1;
      for (const auto& cell : row) csv << "," << cell;
      csv << "\n";
    }
    summary["schema_version"] = 1;
    summary["command"] = command;
    summary["config"] = resolved_cfg;
    std::ofstream js(dir / (command + "_summary.json"));
    js << summary.dump(2) << "\n";
    std::cout << "wrote " << csv_path.string() << "\n";
  }
};

json report_json(const TrialReport& r) {
  return json{{"estimate", r.estimate},       {"stderr", r.std_error},
              {"conf_lo", r.conf_lo},         {"conf_hi", r.conf_hi},
              {"trials", r.trials},           {"discarded", r.discarded_degenerate},
              {"seed", r.seed}};
}

std::vector<std::string> report_cells(const TrialReport& r) {
  return {fmt17(r.estimate), fmt17(r.std_error), fmt17(r.conf_lo), fmt17(r.conf_hi),
          std::to_string(r.trials), std::to_string(r.discarded_degenerate)};
}

// ---- per-subcommand runners ----

void run_mixed_volume(const json& cfg, const Ensemble& e, long, std::uint64_t, int,
                      Outputs& out) {
  QuadratureOptions q = parse_quadrature(cfg);
  IntegralResult integral = mixed_volume_integral(e, q);
  std::vector<Polytope> polys;
  for (const auto& s : e.supports) polys.push_back(newton_polytope(s));
  double oracle = boost::rational_cast<double>(mixed_volume_oracle(polys));
  double rel_err = oracle != 0.0 ? std::abs(integral.value - oracle) / oracle : 0.0;
  out.csv_header = {"n", "integral", "quad_error", "oracle", "rel_err"};
  out.csv_rows.push_back({std::to_string(e.n()), fmt17(integral.value),
                          fmt17(integral.error), fmt17(oracle), fmt17(rel_err)});
  out.summary["results"] = {{"integral", integral.value},
                            {"quad_error", integral.error},
                            {"oracle", oracle},
                            {"rel_err", rel_err}};
}

void run_expect_roots(const json& cfg, const Ensemble& e, long trials,
                      std::uint64_t seed, int threads, Outputs& out) {
  QuadratureOptions q = parse_quadrature(cfg);
  Region u = parse_region(expect(cfg, "region", "config"), e.n(), "region");
  IntegralResult integral = expected_roots(e, u, q);
  long mc_trials = cfg.contains("mc_trials") ? as_long(cfg.at("mc_trials"), "mc_trials") : 0;
  if (cfg.contains("mc_trials") && mc_trials == 0) mc_trials = trials;
  double mc_mean = 0.0, mc_stderr = 0.0;
  long discarded = 0;
  if (mc_trials > 0) {
    struct Outcome { bool degenerate; double count; };
    auto per_trial = [&](long, std::uint64_t s) -> Outcome {
      SparseSystem f = sample(e, s);
      RootList rl = e.n() == 1 ? univariate_roots(f, e.supports[0], e.covariances[0])
                               : bivariate_roots(f, e);
      if (rl.degenerate_flag) return {true, 0.0};
      return {false, static_cast<double>(count_roots_in_region(rl, u))};
    };
    auto outcomes = run_trials<Outcome>(mc_trials, seed, threads, per_trial);
    std::vector<double> counts;
    for (const auto& o : outcomes) {
      if (o.degenerate) { ++discarded; continue; }
      counts.push_back(o.count);
    }
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= std::max<size_t>(1, counts.size());
    double var = 0.0;
    for (double c : counts) var += (c - mean) * (c - mean);
    if (counts.size() > 1) var /= counts.size() - 1;
    mc_mean = mean;
    mc_stderr = std::sqrt(var / std::max<size_t>(1, counts.size()));
  }
  out.csv_header = {"n", "quad_value", "quad_error", "mc_trials", "mc_mean",
                    "mc_stderr", "mc_discarded"};
  out.csv_rows.push_back({std::to_string(e.n()), fmt17(integral.value),
                          fmt17(integral.error), std::to_string(mc_trials),
                          fmt17(mc_mean), fmt17(mc_stderr), std::to_string(discarded)});
  out.summary["results"] = {{"quad_value", integral.value},
                            {"quad_error", integral.error},
                            {"mc_trials", mc_trials},
                            {"mc_mean", mc_mean},
                            {"mc_stderr", mc_stderr},
                            {"mc_discarded", discarded}};
}

void run_condition(const json& cfg, const Ensemble& e, long, std::uint64_t, int,
                   Outputs& out) {
  SparseSystem f = parse_system(expect(cfg, "system", "config"), e, "system");
  if (cfg.contains("point")) {
    const json& pj = cfg.at("point");
    const json& pp = expect(pj, "p", "point");
    const json& qq = expect(pj, "q", "point");
    Vec p(e.n()), q(e.n());
    for (int j = 0; j < e.n(); ++j) {
      p[j] = as_number(pp.at(j), "point.p");
      q[j] = as_number(qq.at(j), "point.q");
    }
    TorusPoint z(p, q);
    double d = distance_to_sigma(f, e, z);
    ConditionBounds b = condition_bounds(f, e, z);
    out.csv_header = {"distance", "inv_distance", "lower", "upper"};
    out.csv_rows.push_back({fmt17(d), fmt17(d > 0 ? 1.0 / d : INFINITY),
                            fmt17(b.lower), fmt17(b.upper)});
    out.summary["results"] = {{"distance", d},
                              {"lower", b.lower},
                              {"upper", b.upper}};
  } else if (cfg.contains("region")) {
    Region u = parse_region(cfg.at("region"), e.n(), "region");
    RestrictedOptions opts;
    if (cfg.contains("grid_points"))
      opts.grid_points = static_cast<int>(as_long(cfg.at("grid_points"), "grid_points"));
    RestrictedCondition rc = restricted_condition(f, e, u, opts);
    out.csv_header = {"mu", "min_distance", "final_spacing"};
    out.csv_rows.push_back({fmt17(rc.mu), fmt17(rc.min_distance), fmt17(rc.final_spacing)});
    out.summary["results"] = {{"mu", rc.mu},
                              {"min_distance", rc.min_distance},
                              {"final_spacing", rc.final_spacing}};
  } else {
    fail("config", "condition needs either \"point\" or \"region\"");
  }
}

std::vector<double> parse_epsilons(const json& cfg) {
  const json& ej = expect(cfg, "epsilons", "config");
  if (!ej.is_array() || ej.empty()) fail("epsilons", "expected a non-empty array");
  std::vector<double> eps;
  for (size_t i = 0; i < ej.size(); ++i) {
    double v = as_number(ej.at(i), "epsilons[" + std::to_string(i) + "]");
    if (!(v > 0)) fail("epsilons[" + std::to_string(i) + "]", "must be > 0");
    eps.push_back(v);
  }
  return eps;
}

void run_nu_lin(const json& cfg, long trials, std::uint64_t seed, int threads,
                Outputs& out) {
  int n = static_cast<int>(as_long(expect(cfg, "n", "config"), "n"));
  Field field = Field::Complex;
  if (cfg.contains("field") && cfg.at("field").get<std::string>() == "real")
    field = Field::Real;
  out.csv_header = {"n", "field", "epsilon", "estimate", "stderr", "wilson_lo",
                    "wilson_hi", "trials", "discarded"};
  json results = json::array();
  for (double eps : parse_epsilons(cfg)) {
    TrialReport r = estimate_nu_lin(n, eps, trials, seed, field, threads);
    std::vector<std::string> row = {std::to_string(n),
                                    field == Field::Real ? "real" : "complex",
                                    fmt17(eps)};
    auto cells = report_cells(r);
    row.insert(row.end(), cells.begin(), cells.end());
    out.csv_rows.push_back(row);
    json jr = report_json(r);
    jr["epsilon"] = eps;
    results.push_back(jr);
  }
  out.summary["results"] = results;
}

void run_nu_sparse(const json& cfg, const Ensemble& e, long trials, std::uint64_t seed,
                   int threads, Outputs& out) {
  Region u = parse_region(expect(cfg, "region", "config"), e.n(), "region");
  NuSparseOptions opts;
  if (cfg.contains("sweep_points"))
    opts.sweep_points = static_cast<int>(as_long(cfg.at("sweep_points"), "sweep_points"));
  out.csv_header = {"epsilon", "root_estimate", "root_stderr", "root_wilson_lo",
                    "root_wilson_hi", "sweep_estimate", "trials", "discarded"};
  json results = json::array();
  for (double eps : parse_epsilons(cfg)) {
    NuSparseReport r = estimate_nu_A(e, u, eps, trials, seed, opts, threads);
    out.csv_rows.push_back({fmt17(eps), fmt17(r.root_based.estimate),
                            fmt17(r.root_based.std_error), fmt17(r.root_based.conf_lo),
                            fmt17(r.root_based.conf_hi), fmt17(r.with_sweep.estimate),
                            std::to_string(r.root_based.trials),
                            std::to_string(r.root_based.discarded_degenerate)});
    results.push_back(json{{"epsilon", eps},
                           {"root_based", report_json(r.root_based)},
                           {"with_sweep", report_json(r.with_sweep)}});
  }
  out.summary["results"] = results;
}

void run_check_thm1(const json& cfg, long trials, std::uint64_t seed, int threads,
                    Outputs& out) {
  Support s = parse_support(expect(cfg, "support", "config"), "support");
  auto table = check_thm1(s, parse_epsilons(cfg), trials, seed, threads);
  out.csv_header = {"epsilon", "empirical", "upper99", "rhs", "pass"};
  json results = json::array();
  bool all_pass = true;
  for (const auto& row : table) {
    out.csv_rows.push_back({fmt17(row.eps), fmt17(row.empirical), fmt17(row.upper99),
                            fmt17(row.rhs), row.pass ? "1" : "0"});
    results.push_back(json{{"epsilon", row.eps},
                           {"empirical", row.empirical},
                           {"upper99", row.upper99},
                           {"rhs", row.rhs},
                           {"pass", row.pass}});
    all_pass = all_pass && row.pass;
  }
  out.summary["results"] = results;
  out.summary["pass"] = all_pass;
}

void run_check_thm3(const json& cfg, const Ensemble& e, long trials,
                    std::uint64_t seed, int threads, Outputs& out) {
  if (e.field != Field::Real) fail("ensemble.field", "check-thm3 needs a real ensemble");
  Region u = parse_region(expect(cfg, "region", "config"), e.n(), "region");
  QuadratureOptions q = parse_quadrature(cfg);
  double bound = real_roots_bound(e, u.boxes, q);
  TrialReport mc = estimate_expected_real_roots(e, u, trials, seed, false, threads);
  bool pass = mc.estimate <= bound + 2.0 * mc.std_error;
  out.csv_header = {"bound", "mc_mean", "mc_stderr", "trials", "discarded", "pass"};
  out.csv_rows.push_back({fmt17(bound), fmt17(mc.estimate), fmt17(mc.std_error),
                          std::to_string(mc.trials),
                          std::to_string(mc.discarded_degenerate), pass ? "1" : "0"});
  out.summary["results"] = {{"bound", bound}, {"mc", report_json(mc)}, {"pass", pass}};
}

void run_check_thm5(const json& cfg, const Ensemble& e, long trials,
                    std::uint64_t seed, int threads, Outputs& out) {
  Region u = parse_region(expect(cfg, "region", "config"), e.n(), "region");
  NuSparseOptions opts;
  if (cfg.contains("sweep_points"))
    opts.sweep_points = static_cast<int>(as_long(cfg.at("sweep_points"), "sweep_points"));
  out.csv_header = {"epsilon", "lhs", "lhs_sweep", "volume_ratio", "kappa_upper",
                    "inflated_eps", "nu_lin", "rhs", "slack", "pass"};
  json results = json::array();
  bool all_pass = true;
  for (double eps : parse_epsilons(cfg)) {
    Thm5Report r = check_thm5(e, u, eps, trials, seed, opts, threads);
    out.csv_rows.push_back({fmt17(eps), fmt17(r.lhs.estimate), fmt17(r.lhs_sweep.estimate),
                            fmt17(r.volume_ratio), fmt17(r.kappa_upper),
                            fmt17(r.inflated_eps), fmt17(r.nu_lin.estimate), fmt17(r.rhs),
                            fmt17(r.slack), r.pass ? "1" : "0"});
    results.push_back(json{{"epsilon", eps},
                           {"lhs", report_json(r.lhs)},
                           {"lhs_sweep", report_json(r.lhs_sweep)},
                           {"volume_ratio", r.volume_ratio},
                           {"kappa_upper", r.kappa_upper},
                           {"inflated_eps", r.inflated_eps},
                           {"nu_lin", report_json(r.nu_lin)},
                           {"rhs", r.rhs},
                           {"slack", r.slack},
                           {"pass", r.pass}});
    all_pass = all_pass && r.pass;
  }
  out.summary["results"] = results;
  out.summary["pass"] = all_pass;
}

void run_check_thm6(const json& cfg, long trials, std::uint64_t seed, int threads,
                    Outputs& out) {
  Support s = parse_support(expect(cfg, "support", "config"), "support");
  DiagonalCovariance c = cfg.contains("covariance")
                             ? parse_covariance(cfg.at("covariance"), s, "covariance")
                             : DiagonalCovariance::identity(s.rows());
  Region u = parse_region(expect(cfg, "region", "config"), s.n(), "region");
  out.csv_header = {"epsilon", "lhs", "expected_real_roots", "nu_real", "rhs",
                    "slack", "pass"};
  json results = json::array();
  bool all_pass = true;
  for (double eps : parse_epsilons(cfg)) {
    Thm6Report r = check_thm6(s, c, u, eps, trials, seed, threads);
    out.csv_rows.push_back({fmt17(eps), fmt17(r.lhs.estimate), fmt17(r.expected.estimate),
                            fmt17(r.nu_real.estimate), fmt17(r.rhs), fmt17(r.slack),
                            r.pass ? "1" : "0"});
    results.push_back(json{{"epsilon", eps},
                           {"lhs", report_json(r.lhs)},
                           {"expected", report_json(r.expected)},
                           {"nu_real", report_json(r.nu_real)},
                           {"rhs", r.rhs},
                           {"slack", r.slack},
                           {"pass", r.pass}});
    all_pass = all_pass && r.pass;
  }
  out.summary["results"] = results;
  out.summary["pass"] = all_pass;
}

void run_momentum_check(const json& cfg, long trials, std::uint64_t seed, int,
                        Outputs& out) {
  Support s = parse_support(expect(cfg, "support", "config"), "support");
  DiagonalCovariance c = cfg.contains("covariance")
                             ? parse_covariance(cfg.at("covariance"), s, "covariance")
                             : DiagonalCovariance::identity(s.rows());
  const int n = s.n();
  auto hull = facet_halfspaces(newton_polytope(s));
  long samples = trials > 0 ? trials : 1000;
  double min_dist = std::numeric_limits<double>::infinity();
  for (long t = 0; t < samples; ++t) {
    // |p| <= 3 keeps the interior gap far above rounding noise
    Vec p = (0.5 + 2.5 * (t % 7) / 6.0) * optim::unit_direction(n, derive_seed(seed, t));
    min_dist = std::min(min_dist, interior_distance(hull, momentum(s, c, p)));
  }
  bool interior_ok = min_dist > 0.0;

  double push = 0.0, target = 0.0, rel = 0.0;
  if (cfg.contains("v_boxes")) {
    const json& vb = cfg.at("v_boxes");
    std::vector<std::vector<Interval>> v_boxes;
    double lambda = 0.0;
    for (size_t b = 0; b < vb.size(); ++b) {
      std::vector<Interval> box;
      double vol = 1.0;
      for (int j = 0; j < n; ++j) {
        Interval iv = parse_interval(vb.at(b).at(j),
                                     "v_boxes[" + std::to_string(b) + "][" +
                                         std::to_string(j) + "]");
        vol *= iv.length();
        box.push_back(iv);
      }
      lambda += vol;
      v_boxes.push_back(std::move(box));
    }
    push = momentum_pushforward_volume(s, c, v_boxes, parse_quadrature(cfg));
    target = std::pow(M_PI, n) * lambda;
    rel = target != 0 ? std::abs(push - target) / target : 0.0;
  }
  out.csv_header = {"interior_samples", "min_interior_distance", "interior_ok",
                    "pushforward", "target", "rel_err"};
  out.csv_rows.push_back({std::to_string(samples), fmt17(min_dist),
                          interior_ok ? "1" : "0", fmt17(push), fmt17(target),
                          fmt17(rel)});
  out.summary["results"] = {{"interior_samples", samples},
                            {"min_interior_distance", min_dist},
                            {"interior_ok", interior_ok},
                            {"pushforward", push},
                            {"target", target},
                            {"rel_err", rel}};
}

}  // namespace

std::string fmt17(double x) { return fmt17_impl(x); }

int run(const std::string& subcommand, const RunOptions& opts) {
  try {
    std::ifstream in(opts.config_path);
    if (!in) {
      std::cerr << "error: cannot open config " << opts.config_path << "\n";
      return kExitValidation;
    }
    json cfg;
    try {
      in >> cfg;
    } catch (const std::exception& ex) {
      std::cerr << "error: config parse failure: " << ex.what() << "\n";
      return kExitValidation;
    }
    if (cfg.contains("command") &&
        cfg.at("command").get<std::string>() != subcommand)
      fail("command", "config command \"" + cfg.at("command").get<std::string>() +
                          "\" does not match subcommand \"" + subcommand + "\"");

    long trials = opts.trials.value_or(
        cfg.contains("trials") ? as_long(cfg.at("trials"), "trials") : 1000);
    std::uint64_t seed = opts.seed.value_or(
        cfg.contains("seed") ? static_cast<std::uint64_t>(as_long(cfg.at("seed"), "seed"))
                             : 42u);
    int threads = opts.threads.value_or(
        cfg.contains("threads") ? static_cast<int>(as_long(cfg.at("threads"), "threads"))
                                : 1);
    std::string out_dir = cfg.contains("out") ? cfg.at("out").get<std::string>() : ".";
    if (opts.out_dir) out_dir = *opts.out_dir;
    if (const char* env = std::getenv("TORIC_OUT_DIR")) out_dir = env;

    json resolved = cfg;
    resolved["command"] = subcommand;
    resolved["trials"] = trials;
    resolved["seed"] = seed;
    resolved["threads"] = threads;
    resolved["out"] = out_dir;

    Outputs out;
    out.dir = out_dir;
    out.command = subcommand;

    auto ensemble_of = [&] {
      return parse_ensemble(expect(cfg, "ensemble", "config"), "ensemble");
    };

    if (subcommand == "mixed-volume")
      run_mixed_volume(cfg, ensemble_of(), trials, seed, threads, out);
    else if (subcommand == "expect-roots")
      run_expect_roots(cfg, ensemble_of(), trials, seed, threads, out);
    else if (subcommand == "condition")
      run_condition(cfg, ensemble_of(), trials, seed, threads, out);
    else if (subcommand == "nu-lin")
      run_nu_lin(cfg, trials, seed, threads, out);
    else if (subcommand == "nu-sparse")
      run_nu_sparse(cfg, ensemble_of(), trials, seed, threads, out);
    else if (subcommand == "check-thm1")
      run_check_thm1(cfg, trials, seed, threads, out);
    else if (subcommand == "check-thm3")
      run_check_thm3(cfg, ensemble_of(), trials, seed, threads, out);
    else if (subcommand == "check-thm5")
      run_check_thm5(cfg, ensemble_of(), trials, seed, threads, out);
    else if (subcommand == "check-thm6")
      run_check_thm6(cfg, trials, seed, threads, out);
    else if (subcommand == "momentum-check")
      run_momentum_check(cfg, trials, seed, threads, out);
    else {
      std::cerr << "error: unknown subcommand \"" << subcommand << "\"\n";
      return kExitValidation;
    }
    out.write(resolved);
    return kExitOk;
  } catch (const ValidationError& ex) {
    std::cerr << "validation error: " << ex.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& ex) {
    std::cerr << "numerical error: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace toric::cli
