#include <doctest.h>

#include "selfint/errors.hpp"
#include "selfint/landscape.hpp"
#include "support.hpp"

using namespace selfint;
using testing::mat;
using testing::vec;

namespace {

Landscape path(const Vector& u) { return Landscape(MarkovMatrix(testing::path_exploration(u.size())), u); }

// Random irreducible exploration graph with random potential.
Landscape random_landscape(std::mt19937_64& rng, Index n) {
  const auto chain = testing::random_reversible(rng, n, testing::uniform(rng, 0.1, 0.7));
  Vector u(n);
  for (Index i = 0; i < n; ++i) u[i] = std::round(testing::uniform(rng, 0.0, 5.0) * 2.0) / 2.0;
  return Landscape(MarkovMatrix(chain.m, 1e-10), u);
}

}  // namespace

TEST_CASE("elevation on path fixtures") {
  const Landscape l3 = path(vec({0, 1, 0}));
  CHECK(elevation(l3, 0, 2) == 1.0);
  CHECK(elevation(l3, 1, 1) == 1.0);

  const Landscape l5 = path(vec({0, 3, 1, 2, 0}));
  CHECK(elevation(l5, 0, 4) == 3.0);
  CHECK(elevation(l5, 2, 4) == 2.0);
  for (Index x = 0; x < 5; ++x) CHECK(elevation(l5, x, x) == l5.potential()[x]);
}

TEST_CASE("energy barrier on path fixtures") {
  CHECK(energy_barrier(path(vec({2, 2, 2}))) == 0.0);
  CHECK(energy_barrier(path(vec({0, 1, 0}))) == 1.0);
  CHECK(energy_barrier(path(vec({0, 3, 1, 2, 0}))) == 3.0);
}

TEST_CASE("elevation matches exhaustive path enumeration") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 150; ++trial) {
    const Index n = testing::uniform_int(rng, 1, 7);
    const Landscape l = random_landscape(rng, n);
    const Matrix& m0 = l.exploration().matrix();
    const Vector& u = l.potential();
    for (Index x = 0; x < n; ++x) {
      const Vector from_x = elevations_from(l, x);
      for (Index y = 0; y < n; ++y) {
        const double e = elevation(l, x, y);
        CHECK(e == testing::brute_elevation(m0, u, x, y));
        CHECK(from_x[y] == e);
        CHECK(e >= std::max(u[x], u[y]));
        for (Index z = 0; z < n; ++z) CHECK(elevation(l, x, z) <= std::max(e, elevation(l, y, z)));
      }
    }
    const double barrier = energy_barrier(l);
    CHECK(barrier == doctest::Approx(testing::brute_barrier(m0, u)));
    CHECK(barrier >= 0.0);
  }
}

TEST_CASE("zero barrier iff every state descends weakly to every global minimum") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 150; ++trial) {
    const Index n = testing::uniform_int(rng, 1, 6);
    const Landscape l = random_landscape(rng, n);
    const Matrix& m0 = l.exploration().matrix();
    const Vector& u = l.potential();
    const double umin = u.minCoeff();
    // Zero barrier means Elev(x, m) = U(x) for every x and every minimum m.
    bool descends = true;
    for (Index x = 0; x < n; ++x)
      for (Index m = 0; m < n; ++m)
        if (u[m] == umin && testing::brute_elevation(m0, u, x, m) > u[x]) descends = false;
    CHECK((energy_barrier(l) == 0.0) == descends);
  }
}

TEST_CASE("argmin and argmax with tie tolerance") {
  CHECK(argmin_set(vec({0, 3, 1, 2, 0})) == std::vector<Index>{0, 4});
  CHECK(argmin_set(vec({1, 1, 1})) == std::vector<Index>{0, 1, 2});
  CHECK(argmin_set(vec({0, 1e-13, 5}), 1e-9) == std::vector<Index>{0, 1});
  CHECK(argmin_set(vec({0, 1e-13, 5}), 0.0) == std::vector<Index>{0});
  CHECK(argmax_set(vec({0, 3, 1, 3})) == std::vector<Index>{1, 3});
}

TEST_CASE("game barrier") {
  const MarkovMatrix complete(mat({{0.5, 0.5}, {0.5, 0.5}}));
  CHECK(game_barrier(Matrix::Zero(2, 2), complete) == 0.0);

  // One column reduces to the barrier of max U - U.
  const Vector col = vec({0, -3, -1, -2, 0});
  const Landscape l5 = path(-col);
  CHECK(game_barrier(Matrix(col), l5.exploration()) == energy_barrier(l5));

  // Each column of the matching game is a two-state landscape on a complete
  // graph; two states never leave anything to climb over.
  CHECK(game_barrier(mat({{0, -1}, {-1, 0}}), complete) == 0.0);
}

TEST_CASE("landscape validation") {
  CHECK_THROWS_AS(Landscape(MarkovMatrix::identity(2), vec({0, 1})), ValidationError);
  CHECK_THROWS_AS(Landscape(MarkovMatrix(testing::path_exploration(3)), vec({0, 1})), DimensionError);
}
