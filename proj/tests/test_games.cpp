#include <doctest.h>

#include <cmath>

#include "selfint/errors.hpp"
#include "selfint/games.hpp"
#include "support.hpp"

using namespace selfint;
using testing::mat;
using testing::vec;

namespace {

TwoPlayerGame matching() { return TwoPlayerGame::zero_sum(mat({{0, -1}, {-1, 0}})); }

// max over a 1/200 grid of the row player's guaranteed payoff.
double grid_maximin(const Matrix& u1) {
  const int steps = 200;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; a + b <= steps; ++b) {
      const Vector v = vec({a / double(steps), b / double(steps), (steps - a - b) / double(steps)});
      best = std::max(best, (u1.transpose() * v).minCoeff());
    }
  return best;
}

Matrix random_payoff(std::mt19937_64& rng, Index r, Index c) {
  Matrix u(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) u(i, j) = testing::uniform(rng, -2.0, 2.0);
  return u;
}

}  // namespace

TEST_CASE("game construction flags") {
  CHECK(matching().is_zero_sum());
  CHECK_FALSE(matching().is_potential());
  const TwoPlayerGame p = TwoPlayerGame::potential(mat({{1, 0}, {0, 1}}));
  CHECK(p.is_potential());
  CHECK(TwoPlayerGame(mat({{1, 2}}), mat({{-1, -2}})).is_zero_sum());
  CHECK_THROWS_AS(TwoPlayerGame(mat({{1, 2}}), mat({{1}, {2}})), DimensionError);
  CHECK_THROWS_AS(matching().payoff(3), ValidationError);
}

TEST_CASE("mixed payoff") {
  const TwoPlayerGame g = matching();
  CHECK(mixed_payoff(g, vec({1, 0}), vec({0, 1}), 1) == -1.0);
  CHECK(mixed_payoff(g, vec({0.5, 0.5}), vec({0.5, 0.5}), 1) == doctest::Approx(-0.5));
  CHECK(mixed_payoff(g, vec({0.5, 0.5}), vec({0.5, 0.5}), 2) == doctest::Approx(0.5));
  const TwoPlayerGame flat(Matrix::Constant(2, 3, 4.0), Matrix::Zero(2, 3));
  CHECK(mixed_payoff(flat, vec({0.3, 0.7}), vec({0.2, 0.2, 0.6}), 1) == doctest::Approx(4.0));
  CHECK_THROWS_AS(mixed_payoff(g, vec({1, 0, 0}), vec({1, 0}), 1), DimensionError);
}

TEST_CASE("best response support") {
  const TwoPlayerGame g = matching();
  CHECK(best_response_support(g, 1, vec({0.5, 0.5})) == std::vector<Index>{0, 1});
  CHECK(best_response_support(g, 1, vec({1, 0})) == std::vector<Index>{0});
  // Player 2 receives -U1 and prefers the other column.
  CHECK(best_response_support(g, 2, vec({1, 0})) == std::vector<Index>{1});
  const TwoPlayerGame flat(Matrix::Constant(3, 2, 1.0), Matrix::Constant(3, 2, 1.0));
  CHECK(best_response_support(flat, 1, vec({0.1, 0.9})).size() == 3);

  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix u = random_payoff(rng, 3, 3);
    const Vector v2 = vec({0.2, 0.5, 0.3});
    const double c = testing::uniform(rng, -5, 5);
    const TwoPlayerGame a(u, u), b((u.array() + c).matrix(), u);
    CHECK(best_response_support(a, 1, v2) == best_response_support(b, 1, v2));
  }
}

TEST_CASE("nash gap") {
  const TwoPlayerGame g = matching();
  CHECK(std::abs(nash_gap(g, vec({0.5, 0.5}), vec({0.5, 0.5}))) < 1e-15);
  CHECK(nash_gap(g, vec({1, 0}), vec({1, 0})) == doctest::Approx(1.0));
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    const TwoPlayerGame r(random_payoff(rng, 3, 2), random_payoff(rng, 3, 2));
    const double a = testing::uniform(rng), b = testing::uniform(rng);
    CHECK(nash_gap(r, vec({a, (1 - a) / 2, (1 - a) / 2}), vec({b, 1 - b})) >= 0.0);
  }
}

TEST_CASE("zero-sum value on fixtures") {
  const ZeroSumSolution s = zero_sum_value(matching());
  CHECK(s.value == doctest::Approx(-0.5));
  CHECK(s.v1[0] == doctest::Approx(0.5));
  CHECK(s.v2[0] == doctest::Approx(0.5));

  // Saddle at (0, 1): row minimum 2 is the column maximum.
  const TwoPlayerGame saddle = TwoPlayerGame::zero_sum(mat({{3, 2, 4}, {1, 0, 5}}));
  const ZeroSumSolution p = zero_sum_value(saddle);
  CHECK(p.value == doctest::Approx(2.0));
  CHECK(p.v1[0] == doctest::Approx(1.0));
  CHECK(p.v2[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(zero_sum_value(TwoPlayerGame(mat({{1}}), mat({{1}}))), ValidationError);
}

TEST_CASE("zero-sum value agrees with grid minimax and is shift/scale equivariant") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix u = random_payoff(rng, 3, 3);
    const ZeroSumSolution s = zero_sum_value(TwoPlayerGame::zero_sum(u));
    CHECK(std::abs(s.value - grid_maximin(u)) <= 0.01);
    CHECK(nash_gap(TwoPlayerGame::zero_sum(u), s.v1, s.v2) <= 1e-9);

    const double c = testing::uniform(rng, -3, 3);
    const double k = testing::uniform(rng, 0.2, 4.0);
    const ZeroSumSolution shifted = zero_sum_value(TwoPlayerGame::zero_sum((u.array() + c).matrix()));
    const ZeroSumSolution scaled = zero_sum_value(TwoPlayerGame::zero_sum(k * u));
    CHECK(std::abs(shifted.value - (s.value + c)) <= 1e-9);
    CHECK(std::abs(scaled.value - k * s.value) <= 1e-9);
    CHECK(nash_gap(TwoPlayerGame::zero_sum(k * u), s.v1, s.v2) <= 1e-9);
  }
}

TEST_CASE("every enumerated equilibrium has zero gap") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 40; ++trial) {
    const TwoPlayerGame g(random_payoff(rng, 3, 3), random_payoff(rng, 3, 3));
    const auto eq = nash_equilibria(g);
    CHECK_FALSE(eq.empty());
    for (const auto& p : eq) CHECK(nash_gap(g, p.v1, p.v2) <= 1e-9);
  }
}

TEST_CASE("nash set distance") {
  const TwoPlayerGame g = matching();
  CHECK(nash_set_distance(g, vec({0.5, 0.5}), vec({0.5, 0.5})) < 1e-12);
  CHECK(nash_set_distance(g, vec({1, 0}), vec({1, 0})) == doctest::Approx(1.0));
  const TwoPlayerGame coord = TwoPlayerGame::potential(mat({{1, 0}, {0, 1}}));
  CHECK(nash_set_distance(coord, vec({1, 0}), vec({1, 0})) < 1e-12);
  CHECK(nash_set_distance(coord, vec({0, 1}), vec({0, 1})) < 1e-12);

  // A continuum: with all-zero payoffs every profile is an equilibrium.
  const TwoPlayerGame null(Matrix::Zero(2, 2), Matrix::Zero(2, 2));
  CHECK(nash_set_distance(null, vec({0.3, 0.7}), vec({0.9, 0.1})) < 0.5);
}
