#include <doctest.h>

#include "oracles.hpp"
#include "toric/supports.hpp"

using namespace toric;

namespace {

Polytope unit_simplex(int n) {
  std::vector<std::vector<long long>> pts(1, std::vector<long long>(n, 0));
  for (int j = 0; j < n; ++j) {
    std::vector<long long> e(n, 0);
    e[j] = 1;
    pts.push_back(e);
  }
  return lattice_polytope(pts);
}

Polytope unit_square() {
  return lattice_polytope({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
}

double to_d(const Rat& r) { return boost::rational_cast<double>(r); }

// Small random lattice polytope in dimension n, deterministic in `seed`.
Polytope random_lattice_polytope(int n, std::uint64_t seed) {
  std::uint64_t state = seed;
  const int count = 3 + static_cast<int>(splitmix64(state) % 4);
  std::vector<std::vector<long long>> pts;
  for (int i = 0; i < count + n; ++i) {
    std::vector<long long> p(n);
    for (int j = 0; j < n; ++j) {
      state = splitmix64(state);
      p[j] = static_cast<long long>(state % 5);
    }
    pts.push_back(p);
  }
  // force affine full dimension
  pts.push_back(std::vector<long long>(n, 0));
  for (int j = 0; j < n; ++j) {
    std::vector<long long> e(n, 0);
    e[j] = 1 + static_cast<int>(splitmix64(seed + j) % 3);
    pts.push_back(e);
  }
  return lattice_polytope(pts);
}

}  // namespace

TEST_SUITE("supports") {

TEST_CASE("hull drops collinear interior point") {
  Polytope p = lattice_polytope({{0}, {1}, {2}});
  CHECK(p.dim == 1);
  REQUIRE(p.vertices.size() == 2);
  CHECK(p.vertices[0][0] == Rat(0));
  CHECK(p.vertices[1][0] == Rat(2));
}

TEST_CASE("simplex is its own hull") {
  Polytope p = unit_simplex(2);
  CHECK(p.dim == 2);
  CHECK(p.vertices.size() == 3);
}

TEST_CASE("duplicate points are removed") {
  Polytope p = lattice_polytope({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {1, 1}});
  CHECK(p.dim == 2);
  CHECK(p.vertices.size() == 4);
}

TEST_CASE("degenerate hulls keep their affine dimension") {
  Polytope p = lattice_polytope({{0, 0}, {1, 1}, {2, 2}});
  CHECK(p.dim == 1);
  CHECK(p.vertices.size() == 2);
  CHECK(normalized_volume(p) == Rat(0));
}

TEST_CASE("3d hull of the cube") {
  std::vector<std::vector<long long>> cube;
  for (int m = 0; m < 8; ++m)
    cube.push_back({m & 1, (m >> 1) & 1, (m >> 2) & 1});
  Polytope p = lattice_polytope(cube);
  CHECK(p.dim == 3);
  CHECK(p.vertices.size() == 8);
  CHECK(normalized_volume(p) == Rat(6));
  // peak over one corner swallows (1,1,1) into an edge interior
  cube.push_back({1, 1, 2});
  CHECK(lattice_polytope(cube).vertices.size() == 8);
  // face centers and interior points are dropped too
  cube.push_back({1, 1, 1});
  CHECK(lattice_polytope(cube).vertices.size() == 8);
}

TEST_CASE("normalized volumes") {
  CHECK(normalized_volume(unit_simplex(1)) == Rat(1));
  CHECK(normalized_volume(unit_simplex(2)) == Rat(1));
  CHECK(normalized_volume(unit_simplex(3)) == Rat(1));
  CHECK(normalized_volume(lattice_polytope({{0}, {4}})) == Rat(4));
  CHECK(normalized_volume(unit_square()) == Rat(2));
}

TEST_CASE("mixed volume normalization") {
  for (int n = 1; n <= 3; ++n) {
    std::vector<Polytope> ps(n, unit_simplex(n));
    CHECK(mixed_volume_oracle(ps) == Rat(1));
  }
  CHECK(mixed_volume_oracle({lattice_polytope({{0}, {3}})}) == Rat(3));
}

TEST_CASE("square and triangle give 2") {
  // cross-check by double-precision polygon arithmetic first
  Polytope sq = unit_square(), tr = unit_simplex(2);
  Polytope sum = minkowski_sum(sq, tr);
  std::vector<std::pair<double, double>> pts;
  for (const auto& v : sum.vertices) pts.push_back({to_d(v[0]), to_d(v[1])});
  double mv_float = oracles::polygon_area(pts) - 1.0 - 0.5;
  CHECK(mv_float == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mixed_volume_oracle({sq, tr}) == Rat(2));
}

TEST_CASE("permutation invariance") {
  Polytope a = unit_simplex(3);
  Polytope b = lattice_polytope({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 0, 1}});
  Polytope c = lattice_polytope({{0, 0, 0}, {2, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  Rat ref = mixed_volume_oracle({a, b, c});
  CHECK(mixed_volume_oracle({a, c, b}) == ref);
  CHECK(mixed_volume_oracle({b, a, c}) == ref);
  CHECK(mixed_volume_oracle({c, b, a}) == ref);
}

TEST_CASE("diagonal equals normalized volume on random polytopes") {
  for (int n = 1; n <= 3; ++n)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Polytope p = random_lattice_polytope(n, 100 * n + seed);
      std::vector<Polytope> ps(n, p);
      CHECK(mixed_volume_oracle(ps) == normalized_volume(p));
    }
}

TEST_CASE("translation invariance") {
  Polytope sq = unit_square(), tr = unit_simplex(2);
  std::vector<RatPoint> shifted;
  for (auto v : tr.vertices) {
    v[0] += Rat(3);
    v[1] -= Rat(2);
    shifted.push_back(v);
  }
  CHECK(mixed_volume_oracle({sq, convex_hull(shifted)}) ==
        mixed_volume_oracle({sq, tr}));
}

TEST_CASE("monotone under enlargement") {
  Polytope tr = unit_simplex(2);
  Polytope big = lattice_polytope({{0, 0}, {1, 0}, {0, 1}, {2, 2}});
  CHECK(mixed_volume_oracle({unit_square(), big}) >=
        mixed_volume_oracle({unit_square(), tr}));
}

TEST_CASE("support validation") {
  IMat rows(2, 1);
  rows << 0, 1;
  Support s = Support::from_rows(rows);
  CHECK(s.full_dim);
  IMat flat(2, 2);
  flat << 0, 0, 1, 1;
  CHECK_FALSE(Support::from_rows(flat).full_dim);
  IMat dup(2, 1);
  dup << 3, 3;
  CHECK_THROWS_AS(Support::from_rows(dup), ValidationError);
}

TEST_CASE("facet halfspaces and interior distance") {
  auto hs = facet_halfspaces(unit_simplex(2));
  CHECK(hs.size() == 3);
  Vec inside(2);
  inside << 0.25, 0.25;
  CHECK(interior_distance(hs, inside) > 0.0);
  Vec outside(2);
  outside << 2.0, 2.0;
  CHECK(interior_distance(hs, outside) < 0.0);
  auto hs3 = facet_halfspaces(unit_simplex(3));
  CHECK(hs3.size() == 4);
}

}  // TEST_SUITE
