#include <doctest.h>

#include <cmath>

#include "selfint/errors.hpp"
#include "selfint/landscape.hpp"
#include "selfint/spectral.hpp"
#include "support.hpp"

using namespace selfint;
using testing::mat;
using testing::vec;

namespace {

// Second-smallest eigenvalue of the symmetric matrix D^{1/2}(I - M)D^{-1/2},
// valid for reversible chains only.
double reversible_gap(const Matrix& m, const Vector& pi) {
  const Index n = m.rows();
  Matrix s(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      s(x, y) = (x == y ? 1.0 : 0.0) - std::sqrt(pi[x] / pi[y]) * m(x, y);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  return eig.eigenvalues()[1];
}

}  // namespace

TEST_CASE("variance, entropy and energy on hand examples") {
  const ProbVector flat = ProbVector::uniform(2);
  const MarkovMatrix flip(mat({{0, 1}, {1, 0}}));
  const Vector c = vec({2, 2});
  CHECK(variance(c, flat) == doctest::Approx(0.0));
  CHECK(std::abs(entropy(c, flat)) < 1e-15);
  CHECK(energy(c, flip, flat) == doctest::Approx(0.0));

  const Vector f = vec({1, -1});
  CHECK(variance(f, flat) == doctest::Approx(1.0));
  CHECK(energy(f, flip, flat) == doctest::Approx(2.0));
  CHECK(entropy(vec({1, 0}), flat) == doctest::Approx(0.5 * std::log(2.0)));

  CHECK_THROWS_AS(energy(f, flip, ProbVector(vec({0.7, 0.3}))), ValidationError);
}

TEST_CASE("entropy is nonnegative and vanishes on constant |f|") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = testing::uniform_int(rng, 2, 6);
    Vector p(n);
    for (Index i = 0; i < n; ++i) p[i] = testing::uniform(rng, 0.05, 1.0);
    const ProbVector pi(p / p.sum());
    Vector f(n);
    for (Index i = 0; i < n; ++i) f[i] = testing::uniform(rng, -2.0, 2.0);
    CHECK(entropy(f, pi) >= -1e-12);
    Vector signs(n);
    for (Index i = 0; i < n; ++i) signs[i] = (i % 2 ? -1.5 : 1.5);
    CHECK(std::abs(entropy(signs, pi)) < 1e-12);
  }
}

TEST_CASE("spectral gap on closed forms") {
  const ProbVector pi(vec({0.2, 0.3, 0.5}));
  const MarkovMatrix iid = MarkovMatrix::rank_one(pi);
  CHECK(spectral_gap(iid, pi) == doctest::Approx(1.0).epsilon(1e-10));

  const MarkovMatrix two(mat({{0.8, 0.2}, {0.3, 0.7}}));
  CHECK(spectral_gap(two, invariant_measure(two)) == doctest::Approx(0.5).epsilon(1e-10));

  CHECK_THROWS_AS(spectral_gap(MarkovMatrix(mat({{1, 0}, {0.5, 0.5}})), ProbVector(vec({1, 0}))),
                  DecomposableError);
}

TEST_CASE("spectral gap matches the reversible eigen oracle and halves under laziness") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = testing::uniform_int(rng, 2, 6);
    const auto chain = testing::random_reversible(rng, n, 0.6);
    const MarkovMatrix m(chain.m, 1e-10);
    const ProbVector pi(chain.pi, 1e-10);
    const double lambda = spectral_gap(m, pi);
    CHECK(lambda == doctest::Approx(reversible_gap(chain.m, chain.pi)).epsilon(1e-9));

    const MarkovMatrix lazy(0.5 * (Matrix::Identity(n, n) + chain.m), 1e-10);
    CHECK(std::abs(spectral_gap(lazy, pi) - 0.5 * lambda) <= 1e-10);
  }
}

TEST_CASE("no random function beats the spectral gap in the variational ratio") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = testing::uniform_int(rng, 2, 6);
    const auto chain = testing::random_reversible(rng, n);
    const MarkovMatrix m(chain.m, 1e-10);
    const ProbVector pi(chain.pi, 1e-10);
    const double lambda = spectral_gap(m, pi);

    // The eigenvector itself attains the minimum.
    Matrix s(n, n);
    for (Index x = 0; x < n; ++x)
      for (Index y = 0; y < n; ++y)
        s(x, y) = (x == y ? 1.0 : 0.0) - std::sqrt(chain.pi[x] / chain.pi[y]) * chain.m(x, y);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
    const Vector g = eig.eigenvectors().col(1).cwiseQuotient(chain.pi.cwiseSqrt());

    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10000; ++k) {
      Vector f(n);
      for (Index i = 0; i < n; ++i) f[i] = testing::uniform(rng, -1.0, 1.0);
      if (k % 2) f = g + 0.01 * f;
      const double var = variance(f, pi);
      if (var < 1e-12) continue;
      const double ratio = energy(f, m, pi) / var;
      CHECK(ratio >= lambda * (1.0 - 1e-6));
      best = std::min(best, ratio);
    }
    CHECK(best <= lambda + 1e-3);
  }
}

TEST_CASE("log-Sobolev bracket and search") {
  const LogSobolevBracket half = log_sobolev_bracket(1.0, 0.5);
  CHECK(half.lower == doctest::Approx(0.5));
  CHECK(half.upper == doctest::Approx(0.5));

  const MarkovMatrix coin(mat({{0.5, 0.5}, {0.5, 0.5}}));
  const auto sc = log_sobolev_search(coin, ProbVector::uniform(2), 4, 200);
  REQUIRE(sc.alpha_numeric);
  CHECK(*sc.alpha_numeric == doctest::Approx(0.5).epsilon(1e-6));

  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = testing::uniform_int(rng, 2, 5);
    const MarkovMatrix m(testing::random_positive(rng, n));
    const ProbVector pi = invariant_measure(m);
    const auto s = log_sobolev_search(m, pi, 4, 200, static_cast<std::uint64_t>(trial));
    REQUIRE(s.alpha_numeric);
    CHECK(s.alpha_lower <= s.alpha_upper);
    CHECK(*s.alpha_numeric <= s.lambda / 2.0 + 1e-6);
    const double p = pi.values().minCoeff();
    if (p < 0.5) {
      const double lower = (1.0 - 2.0 * p) / std::log((1.0 - p) / p) * s.lambda;
      CHECK(*s.alpha_numeric >= lower - 1e-6);
    }
  }
}

TEST_CASE("spectral bound on |Q| holds entrywise against the exact pseudo-inverse") {
  const MarkovMatrix flat(mat({{0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}, {0.5, 0.3, 0.2}}));
  const double lambda = spectral_gap(flat, ProbVector::uniform(3));
  const Matrix b_flat = q_bound_spectral(flat);
  CHECK((b_flat.array() - 1.0 / lambda).abs().maxCoeff() < 1e-9);

  const MarkovMatrix two(mat({{0.8, 0.2}, {0.3, 0.7}}));
  CHECK(sup_norm(pseudo_inverse(two).matrix()) <= q_bound_uniform(two));

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = testing::uniform_int(rng, 2, 6);
    MarkovMatrix m(testing::random_sparse(rng, n, 0.6));
    if (!is_irreducible(m)) m = MarkovMatrix(testing::random_positive(rng, n));
    const Matrix q = pseudo_inverse(m).matrix().cwiseAbs();
    const Matrix b = q_bound_spectral(m);
    CHECK((q - b).maxCoeff() <= 1e-9);
    CHECK(q.maxCoeff() <= q_bound_uniform(m) + 1e-9);
  }
}

TEST_CASE("uniform bound uses the limit factor at pi_* = 1/2") {
  // log_+(log 2) = 0, so only e / lambda remains.
  CHECK(q_bound_uniform(0.5, 0.5) == doctest::Approx(std::exp(1.0) / 0.5));
  CHECK(std::isfinite(q_bound_uniform(0.5, 0.5 - 1e-12)));
}

TEST_CASE("annealing spectrum agrees with double precision where both resolve") {
  const Matrix m0 = testing::path_exploration(3);
  const Vector u = vec({0, 1, 0});
  for (double beta : {0.0, 1.0, 3.0}) {
    const auto spec = annealing_spectrum(MarkovMatrix(m0), u, beta);
    REQUIRE(spec);
    // Metropolis chain built by hand, reversible w.r.t. exp(-beta U).
    Matrix m = Matrix::Zero(3, 3);
    for (Index x = 0; x < 3; ++x) {
      for (Index y = 0; y < 3; ++y)
        if (x != y && m0(x, y) > 0.0) m(x, y) = m0(x, y) * std::min(1.0, std::exp(-beta * (u[y] - u[x])));
      m(x, x) = 1.0 - m.row(x).sum();
    }
    Vector pi = (-beta * u).array().exp();
    pi /= pi.sum();
    CHECK(std::exp(spec->log_lambda) == doctest::Approx(reversible_gap(m, pi)).epsilon(1e-9));
    CHECK(std::exp(spec->log_pi_star) == doctest::Approx(pi.minCoeff()).epsilon(1e-9));
  }
}

TEST_CASE("Holley-Stroock slope tracks the energy barrier") {
  std::vector<double> grid;
  for (double b = 10.0; b <= 40.0 + 1e-9; b += 2.5) grid.push_back(b);

  const Vector flat = vec({1, 1, 1});
  const auto f0 = holley_stroock_slope(MarkovMatrix(testing::path_exploration(3)), flat, grid);
  CHECK(std::abs(f0.slope) < 1e-9);

  const Vector u3 = vec({0, 1, 0});
  const Landscape l3(MarkovMatrix(testing::path_exploration(3)), u3);
  const auto f3 = holley_stroock_slope(l3.exploration(), u3, grid);
  CHECK(f3.slope == doctest::Approx(-energy_barrier(l3)).epsilon(0.15));

  const Vector u5 = vec({0, 3, 1, 2, 0});
  const Landscape l5(MarkovMatrix(testing::path_exploration(5)), u5);
  const auto f5 = holley_stroock_slope(l5.exploration(), u5, grid);
  CHECK(energy_barrier(l5) == 3.0);
  CHECK(f5.slope == doctest::Approx(-3.0).epsilon(0.15));
  CHECK(f5.fitted >= 2);
}
