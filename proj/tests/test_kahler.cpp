#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "toric/kahler.hpp"

using namespace toric;

namespace {

Support seg01() {
  IMat rows(2, 1);
  rows << 0, 1;
  return Support::from_rows(rows);
}

Support simplex2() {
  IMat rows(3, 2);
  rows << 0, 0, 1, 0, 0, 1;
  return Support::from_rows(rows);
}

// Deterministic random full-dimensional support with small entries.
Support random_support(int n, std::uint64_t seed) {
  std::uint64_t st = seed;
  while (true) {
    int m = n + 1 + static_cast<int>(splitmix64(st) % 3);
    IMat rows(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        st = splitmix64(st);
        rows(i, j) = static_cast<int>(st % 4);
      }
    bool distinct = true;
    for (int i = 0; i < m && distinct; ++i)
      for (int k = i + 1; k < m; ++k)
        if (rows.row(i) == rows.row(k)) distinct = false;
    if (!distinct) { ++st; continue; }
    Support s = Support::from_rows(rows);
    if (s.full_dim) return s;
    ++st;
  }
}

Vec random_vec(int n, std::uint64_t seed, double scale) {
  Vec v(n);
  std::uint64_t st = seed;
  for (int j = 0; j < n; ++j) {
    st = splitmix64(st);
    v[j] = scale * (2.0 * (st >> 11) / 9007199254740992.0 - 1.0);
  }
  return v;
}

DiagonalCovariance random_cov(int m, std::uint64_t seed) {
  Vec w(m);
  std::uint64_t st = seed;
  for (int i = 0; i < m; ++i) {
    st = splitmix64(st);
    w[i] = 0.25 + 3.75 * (st >> 11) / 9007199254740992.0;
  }
  return DiagonalCovariance::from_weights(w);
}

}  // namespace

TEST_SUITE("kahler") {

TEST_CASE("veronese_hat basics") {
  Support s = seg01();
  auto c = DiagonalCovariance::identity(2);
  CVec v = veronese_hat(s, c, TorusPoint::origin(1));
  CHECK(std::abs(v[0] - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(v[1] - Complex(1, 0)) < 1e-15);

  Vec w(2);
  w << 1, 4;
  CVec v2 = veronese_hat(s, DiagonalCovariance::from_weights(w), TorusPoint::origin(1));
  CHECK(std::abs(v2[1] - Complex(2, 0)) < 1e-15);

  Vec p(1), q(1);
  p << std::log(2.0);
  q << M_PI;
  CVec v3 = veronese_hat(s, c, TorusPoint(p, q));
  CHECK(std::abs(v3[0] - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(v3[1] - Complex(-2, 0)) < 1e-13);
}

TEST_CASE("potential values") {
  Support s = seg01();
  CHECK(potential(s, DiagonalCovariance::identity(2), Vec::Zero(1)) ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  Vec w(2);
  w << 1, 3;
  CHECK(potential(s, DiagonalCovariance::from_weights(w), Vec::Zero(1)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  IMat rows(3, 1);
  rows << 0, 1, 2;
  CHECK(potential(Support::from_rows(rows), DiagonalCovariance::identity(3),
                  Vec::Zero(1)) ==
        doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
  // equals log |vhat| for any q
  Vec p = random_vec(1, 7, 2.0), q = random_vec(1, 8, 3.0);
  q[0] = std::abs(q[0]);
  double g = potential(s, DiagonalCovariance::identity(2), p);
  CVec v = veronese_hat(s, DiagonalCovariance::identity(2), TorusPoint(p, q));
  CHECK(g == doctest::Approx(std::log(v.norm())).epsilon(1e-13));
}

TEST_CASE("momentum values") {
  CHECK(momentum(seg01(), DiagonalCovariance::identity(2), Vec::Zero(1))[0] ==
        doctest::Approx(0.5).epsilon(1e-14));
  IMat rows(5, 1);
  rows << 0, 1, 2, 3, 4;
  CHECK(momentum(Support::from_rows(rows), DiagonalCovariance::identity(5),
                 Vec::Zero(1))[0] == doctest::Approx(2.0).epsilon(1e-14));
  Vec m = momentum(simplex2(), DiagonalCovariance::identity(3), Vec::Zero(2));
  CHECK(m[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(m[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  IMat flat(2, 2);
  flat << 0, 0, 1, 1;
  CHECK_THROWS_AS(momentum(Support::from_rows(flat),
                           DiagonalCovariance::identity(2), Vec::Zero(2)),
                  ValidationError);
}

TEST_CASE("hessian values") {
  CHECK(hessian(seg01(), DiagonalCovariance::identity(2), Vec::Zero(1))(0, 0) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // frozen from the finite-difference oracle (step 1e-5)
  IMat rows(2, 1);
  rows << 0, 2;
  Support s02 = Support::from_rows(rows);
  Mat fd = oracles::fd_hessian(s02, DiagonalCovariance::identity(2), Vec::Zero(1));
  CHECK(fd(0, 0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(hessian(s02, DiagonalCovariance::identity(2), Vec::Zero(1))(0, 0) ==
        doctest::Approx(2.0).epsilon(1e-13));

  Mat h = hessian(simplex2(), DiagonalCovariance::identity(3), Vec::Zero(2));
  CHECK(h(0, 0) == doctest::Approx(4.0 / 9).epsilon(1e-13));
  CHECK(h(0, 1) == doctest::Approx(-2.0 / 9).epsilon(1e-13));
  CHECK(h(1, 1) == doctest::Approx(4.0 / 9).epsilon(1e-13));
  Mat fd2 = oracles::fd_hessian(simplex2(), DiagonalCovariance::identity(3),
                                Vec::Zero(2));
  CHECK((h - fd2).norm() < 1e-8);
}

TEST_CASE("dveronese structure") {
  Support s = seg01();
  auto c = DiagonalCovariance::identity(2);
  KahlerFrame f = make_frame(s, c, TorusPoint::origin(1));
  double inv = 1.0 / (2.0 * std::sqrt(2.0));
  CHECK(std::abs(f.dv(0, 0) - Complex(-inv, 0)) < 1e-14);
  CHECK(std::abs(f.dv(1, 0) - Complex(inv, 0)) < 1e-14);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    int n = 1 + static_cast<int>(seed % 3);
    Support rs = random_support(n, 40 + seed);
    auto rc = random_cov(rs.rows(), 90 + seed);
    TorusPoint z(random_vec(n, seed, 2.0), random_vec(n, seed + 1, 3.0).cwiseAbs());
    KahlerFrame fr = make_frame(rs, rc, z);
    // columns orthogonal to vhat
    CVec proj = fr.unit.adjoint() * fr.dv;
    CHECK(proj.norm() < 1e-12);
    // Gram identity: 2 Re(Dv^H Dv) = Hessian
    Mat gram = 2.0 * (fr.dv.adjoint() * fr.dv).real();
    CHECK((gram - fr.hess).norm() < 1e-12 * (1.0 + fr.hess.norm()));
    // full rank for full-dim supports
    Eigen::JacobiSVD<CMat> svd(fr.dv);
    CHECK(svd.singularValues()[n - 1] > 1e-10);
  }
}

TEST_CASE("norm_A") {
  Support s = seg01();
  auto c = DiagonalCovariance::identity(2);
  KahlerFrame f = make_frame(s, c, TorusPoint::origin(1));
  CHECK(norm_A(CVec::Zero(1), f) == 0.0);
  CHECK(norm_A(CVec::Ones(1), f) == doctest::Approx(0.5).epsilon(1e-14));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Support rs = random_support(2, 800 + seed);
    auto rc = random_cov(rs.rows(), 900 + seed);
    KahlerFrame fr = make_frame(rs, rc, TorusPoint(random_vec(2, seed, 1.5),
                                                   random_vec(2, seed + 3, 3.0).cwiseAbs()));
    CVec u(2);
    Vec re = random_vec(2, 2 * seed, 1.0), im = random_vec(2, 2 * seed + 1, 1.0);
    u << Complex(re[0], im[0]), Complex(re[1], im[1]);
    CHECK(norm_A(u, fr) == doctest::Approx((fr.dv * u).norm()).epsilon(1e-10));
  }
}

TEST_CASE("gradient matches finite differences on random configurations") {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 100; ++seed) {
    int n = 1 + static_cast<int>(seed % 3);
    Support s = random_support(n, 1000 + seed);
    auto c = random_cov(s.rows(), 2000 + seed);
    Vec p = random_vec(n, 3000 + seed, 3.0);
    Vec grad = momentum(s, c, p);
    Vec fd = oracles::fd_gradient(s, c, p);
    CHECK((grad - fd).norm() <= 1e-6 * std::max(1.0, grad.norm()));
    ++checked;
  }
}

TEST_CASE("hessian matches momentum finite differences") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    int n = 1 + static_cast<int>(seed % 3);
    Support s = random_support(n, 5000 + seed);
    auto c = random_cov(s.rows(), 6000 + seed);
    Vec p = random_vec(n, 7000 + seed, 3.0);
    Mat h = hessian(s, c, p);
    Mat fd = oracles::fd_hessian(s, c, p);
    CHECK((h - fd).norm() <= 1e-5 * std::max(1.0, h.norm()));
  }
}

TEST_CASE("momentum image is strictly interior") {
  // |p| <= 2 keeps the true boundary gap far above machine epsilon, so the
  // strict inequality is verifiable in doubles.
  Support s = random_support(2, 77);
  auto c = random_cov(s.rows(), 78);
  auto hs = facet_halfspaces(newton_polytope(s));
  for (int t = 0; t < 1000; ++t) {
    Vec p = random_vec(2, 10000 + t, 2.0);
    CHECK(interior_distance(hs, momentum(s, c, p)) > 0.0);
  }
}

TEST_CASE("momentum inversion round trip and positive definiteness") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    int n = 1 + static_cast<int>(seed % 2);
    Support s = random_support(n, 400 + seed);
    auto c = random_cov(s.rows(), 500 + seed);
    Vec p1 = random_vec(n, 600 + seed, 2.0);
    Vec p2 = random_vec(n, 700 + seed, 2.0);
    Vec y1 = momentum(s, c, p1), y2 = momentum(s, c, p2);
    if ((p1 - p2).norm() > 1e-9)
      CHECK((y1 - y2).norm() > 0.0);  // injectivity on q = 0
    // round trip through the inversion
    Vec back = invert_momentum(s, c, y1);
    CHECK((momentum(s, c, back) - y1).norm() < 1e-8);
    // Legendre-type property: the midpoint is again a momentum value
    Vec mid = 0.5 * (y1 + y2);
    Vec pm = invert_momentum(s, c, mid);
    CHECK((momentum(s, c, pm) - mid).norm() < 1e-8);
    // strict convexity
    Eigen::SelfAdjointEigenSolver<Mat> es(hessian(s, c, p1));
    CHECK(es.eigenvalues()[0] > 0.0);
  }
}

}  // TEST_SUITE
