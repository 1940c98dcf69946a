#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "toric/volume.hpp"

using namespace toric;

namespace {

Support powers(int d) {
  IMat rows(d + 1, 1);
  for (int k = 0; k <= d; ++k) rows(k, 0) = k;
  return Support::from_rows(rows);
}

Support simplex_support() {
  IMat r(3, 2);
  r << 0, 0, 1, 0, 0, 1;
  return Support::from_rows(r);
}

Support square_support() {
  IMat r(4, 2);
  r << 0, 0, 1, 0, 0, 1, 1, 1;
  return Support::from_rows(r);
}

Mat random_pd(int n, std::uint64_t seed) {
  std::uint64_t st = seed;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      st = splitmix64(st);
      a(i, j) = 2.0 * (st >> 11) / 9007199254740992.0 - 1.0;
    }
  return a * a.transpose() + 0.3 * Mat::Identity(n, n);
}

DiagonalCovariance random_cov(int m, std::uint64_t seed) {
  Vec w(m);
  std::uint64_t st = seed;
  for (int i = 0; i < m; ++i) {
    st = splitmix64(st);
    w[i] = 0.2 + 4.0 * (st >> 11) / 9007199254740992.0;
  }
  return DiagonalCovariance::from_weights(w);
}

}  // namespace

TEST_SUITE("volume") {

TEST_CASE("mixed density closed forms") {
  CHECK(mixed_density({Mat::Identity(2, 2), Mat::Identity(2, 2)}) ==
        doctest::Approx(0.5).epsilon(1e-14));
  Mat h(1, 1);
  h << 3.7;
  CHECK(mixed_density({h}) == doctest::Approx(1.85).epsilon(1e-14));
  Mat h1 = Mat::Zero(2, 2), h2 = Mat::Zero(2, 2);
  h1.diagonal() << 2, 1;
  h2.diagonal() << 1, 2;
  // frozen from the wedge-expansion oracle
  CHECK(oracles::wedge_density({h1, h2}) == doctest::Approx(1.25).epsilon(1e-13));
  CHECK(mixed_density({h1, h2}) == doctest::Approx(1.25).epsilon(1e-13));
}

TEST_CASE("mixed density equals the wedge oracle on random inputs") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    int n = 1 + static_cast<int>(seed % 3);
    std::vector<Mat> hs;
    for (int i = 0; i < n; ++i) hs.push_back(random_pd(n, 10 * seed + i));
    double lib = mixed_density(hs);
    double oracle = oracles::wedge_density(hs);
    CHECK(lib == doctest::Approx(oracle).epsilon(1e-11));
    CHECK(lib > 0.0);
    // symmetry under argument permutation
    if (n >= 2) {
      std::swap(hs[0], hs[n - 1]);
      CHECK(mixed_density(hs) == doctest::Approx(lib).epsilon(1e-12));
    }
  }
}

TEST_CASE("expected roots univariate") {
  for (int d : {1, 2, 4}) {
    Ensemble e = Ensemble::unmixed_from(powers(d), DiagonalCovariance::identity(d + 1),
                                        1, Field::Complex);
    IntegralResult full = mixed_volume_integral(e);
    CHECK(full.value == doctest::Approx(double(d)).epsilon(2e-3));
    // negative half-line gets exactly half by the a <-> d-a symmetry
    Box half;
    half.p = {Interval{-std::numeric_limits<double>::infinity(), 0.0}};
    half.q = {Interval{0.0, kTwoPi}};
    IntegralResult neg = expected_roots(e, Region::from_boxes({half}, 1));
    CHECK(neg.value == doctest::Approx(d / 2.0).epsilon(2e-3));
  }
}

TEST_CASE("expected roots additivity over disjoint regions") {
  Ensemble e = Ensemble::unmixed_from(powers(3), DiagonalCovariance::identity(4), 1,
                                      Field::Complex);
  Box left, right;
  left.p = {Interval{-2.0, 0.3}};
  left.q = {Interval{0.0, kTwoPi}};
  right.p = {Interval{0.3, 2.5}};
  right.q = {Interval{0.0, kTwoPi}};
  IntegralResult a = expected_roots(e, Region::from_boxes({left}, 1));
  IntegralResult b = expected_roots(e, Region::from_boxes({right}, 1));
  IntegralResult ab = expected_roots(e, Region::from_boxes({left, right}, 1));
  CHECK(std::abs(ab.value - a.value - b.value) <= a.error + b.error + ab.error + 1e-12);
}

TEST_CASE("quadrature self-consistency") {
  Ensemble e = Ensemble::unmixed_from(simplex_support(),
                                      DiagonalCovariance::identity(3), 2,
                                      Field::Complex);
  QuadratureOptions loose;
  loose.rel_tol = 1e-3;
  QuadratureOptions tight;
  tight.rel_tol = 1e-6;
  IntegralResult rl = mixed_volume_integral(e, loose);
  IntegralResult rt = mixed_volume_integral(e, tight);
  CHECK(std::abs(rl.value - rt.value) <= rl.error + rt.error);
}

TEST_CASE("mixed volume integral matches the oracle") {
  // unit simplices, n = 2 -> 1
  Ensemble simplices = Ensemble::unmixed_from(simplex_support(),
                                              DiagonalCovariance::identity(3), 2,
                                              Field::Complex);
  CHECK(mixed_volume_integral(simplices).value == doctest::Approx(1.0).epsilon(5e-3));

  // square x triangle -> 2
  Ensemble st = Ensemble::make(
      {square_support(), simplex_support()},
      {DiagonalCovariance::identity(4), DiagonalCovariance::identity(3)},
      Field::Complex);
  double oracle = boost::rational_cast<double>(mixed_volume_oracle(
      {newton_polytope(square_support()), newton_polytope(simplex_support())}));
  CHECK(oracle == 2.0);
  CHECK(mixed_volume_integral(st).value == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("covariance independence of the integral") {
  Support s = powers(3);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Ensemble e = Ensemble::unmixed_from(s, random_cov(4, 50 + seed), 1, Field::Complex);
    CHECK(mixed_volume_integral(e).value == doctest::Approx(3.0).epsilon(5e-3));
  }
  // n = 2 spot checks
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Ensemble e = Ensemble::make(
        {square_support(), simplex_support()},
        {random_cov(4, 80 + seed), random_cov(3, 90 + seed)}, Field::Complex);
    CHECK(mixed_volume_integral(e).value == doctest::Approx(2.0).epsilon(5e-3));
  }
}

TEST_CASE("real roots bound") {
  Ensemble e = Ensemble::unmixed_from(powers(1), DiagonalCovariance::identity(2), 1,
                                      Field::Real);
  auto box = [](double t) {
    Box b;
    b.p = {Interval{-t, t}};
    b.q = {Interval{0.0, kTwoPi}};
    return b;
  };
  double b1 = real_roots_bound(e, {box(0.5)});
  double b2 = real_roots_bound(e, {box(1.5)});
  double b3 = real_roots_bound(e, {box(3.0)});
  CHECK(b1 > 0.0);
  CHECK(b1 <= b2);
  CHECK(b2 <= b3);
  double tiny = real_roots_bound(e, {box(1e-6)});
  CHECK(tiny < 1e-3);
  Box unbounded;
  unbounded.p = {Interval{0.0, std::numeric_limits<double>::infinity()}};
  unbounded.q = {Interval{0.0, kTwoPi}};
  CHECK_THROWS_AS(real_roots_bound(e, {unbounded}), ValidationError);
}

TEST_CASE("momentum pushforward volume") {
  // A = {0,1}, V = (1/4, 3/4): exact value pi/2
  Support s = powers(1);
  auto c2 = DiagonalCovariance::identity(2);
  double v = momentum_pushforward_volume(s, c2, {{Interval{0.25, 0.75}}});
  CHECK(v == doctest::Approx(M_PI / 2).epsilon(1e-4));

  // nearly the whole hull: pi * Lebesgue(hull) = pi * 1
  double whole = momentum_pushforward_volume(s, c2, {{Interval{1e-4, 1.0 - 1e-4}}});
  CHECK(whole == doctest::Approx(M_PI).epsilon(1e-3));

  // n = 2 corner box of the simplex
  Support tri = simplex_support();
  auto c3 = DiagonalCovariance::identity(3);
  std::vector<Interval> vbox = {Interval{0.1, 0.35}, Interval{0.1, 0.35}};
  QuadratureOptions q2;
  q2.rel_tol = 3e-4;
  double push = momentum_pushforward_volume(tri, c3, {vbox}, q2);
  double target = M_PI * M_PI * 0.25 * 0.25;
  CHECK(push == doctest::Approx(target).epsilon(1e-3));

  CHECK_THROWS_AS(
      momentum_pushforward_volume(s, c2, {{Interval{0.5, 2.0}}}),
      ValidationError);
}

}  // TEST_SUITE
