#include <doctest.h>

#include <cmath>
#include <sstream>

#include "selfint/errors.hpp"
#include "selfint/process.hpp"
#include "support.hpp"

using namespace selfint;
using testing::mat;
using testing::vec;

namespace {

MarkovMatrix four_state() {
  return MarkovMatrix(mat({{.1, .6, .2, .1}, {.3, .1, .5, .1}, {.2, .2, .2, .4}, {.5, .1, .1, .3}}));
}

ProcessSpec constant_spec(long horizon, std::uint64_t seed) {
  ProcessSpec s{ConstantStrategy{four_state()}, std::nullopt, ObservationMap::kOccupation, {}, 0,
                horizon, seed, dyadic_checkpoints(horizon), true};
  return s;
}

TwoPlayerGame matching() { return TwoPlayerGame::zero_sum(mat({{0, -1}, {-1, 0}})); }

ProcessSpec mirror_spec(double eps, long horizon) {
  const MarkovMatrix lazy(mat({{eps, 1 - eps}, {1 - eps, eps}}));
  return ProcessSpec{ConstantStrategy{lazy},
                     GameSetup{matching(), scripted_opponent(ScriptedKind::kMirror), 0},
                     ObservationMap::kGameFull,
                     {},
                     0,
                     horizon,
                     7,
                     dyadic_checkpoints(horizon),
                     true};
}

std::string csv(const ProcessTrace& t) {
  std::ostringstream out;
  write_trace_csv(out, t);
  return out.str();
}

}  // namespace

TEST_CASE("inverse-CDF sampling conventions") {
  CHECK(sample_row(vec({0.1, 0.9}), 0.95) == 1);
  CHECK(sample_row(vec({0.1, 0.9}), 0.05) == 0);
  CHECK(sample_row(vec({0.5, 0.5}), 0.5) == 1);
  CHECK(sample_row(vec({0.5, 0.5}), 0.4999999) == 0);
  for (double d : {0.0, 0.3, 0.999999}) CHECK(sample_row(vec({0, 1, 0}), d) == 1);
  // Zero-mass trailing entries are never chosen, whatever the rounding.
  CHECK(sample_row(vec({0.3, 0.7 - 1e-12, 0}), 1.0 - 1e-16) == 1);
  CHECK_THROWS_AS(sample_row(vec({0.5, 0.4}), 0.1), ValidationError);
  CHECK_THROWS_AS(sample_row(vec({0.5, 0.5}), 1.0), ValidationError);
  CHECK(step(four_state(), 2, 0.95) == 3);
  CHECK_THROWS_AS(step(four_state(), 4, 0.5), DimensionError);
}

TEST_CASE("random stream") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(x == b.uniform());
    if (x != c.uniform()) differs = true;
  }
  CHECK(differs);
  CHECK(replica_seed(1, 0) != replica_seed(1, 1));
  CHECK(replica_seed(1, 0) != replica_seed(2, 0));
}

TEST_CASE("running averages") {
  Vector v = vec({1, 0});
  v = update_average(v, vec({0, 1}), 2);
  v = update_average(v, vec({0, 1}), 3);
  CHECK(v[0] == doctest::Approx(1.0 / 3.0));
  CHECK(v[1] == doctest::Approx(2.0 / 3.0));
  CHECK((update_average(vec({9, 9}), vec({0.25, 0.75}), 1) - vec({0.25, 0.75})).norm() == 0.0);

  // Unit weights reproduce the plain average exactly.
  std::mt19937_64 rng(91);
  Vector plain = vec({0, 0, 1});
  WeightedAverage w{plain, 1.0};
  for (long n = 2; n < 500; ++n) {
    Vector hit = Vector::Zero(3);
    hit[testing::uniform_int(rng, 0, 2)] = 1.0;
    plain = update_average(plain, hit, n);
    w = update_weighted(w.w, hit, 1.0, w.r);
    CHECK((w.w - plain).cwiseAbs().maxCoeff() <= 1e-14);
  }
  CHECK(w.r == 499.0);
  CHECK_THROWS_AS(update_weighted(plain, plain, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(update_average(plain, plain, 0), ValidationError);
}

TEST_CASE("weight sequences") {
  const WeightSequence unit{0.0}, growing{1.0}, shrinking{-0.5};
  CHECK(unit(7) == 1.0);
  CHECK(growing(3) == doctest::Approx(std::log(4.0)));
  CHECK(shrinking(3) == doctest::Approx(1.0 / std::sqrt(std::log(4.0))));
  for (long i = 1; i < 100; ++i) {
    CHECK(growing(i + 1) >= growing(i));
    CHECK(shrinking(i + 1) <= shrinking(i));
    CHECK(shrinking(i) > 0.0);
  }
}

TEST_CASE("dyadic checkpoints") {
  CHECK(dyadic_checkpoints(10) == std::vector<long>{2, 4, 8, 10});
  CHECK(dyadic_checkpoints(16) == std::vector<long>{2, 4, 8, 16});
  CHECK(dyadic_checkpoints(1).empty());
}

TEST_CASE("simulation is reproducible and replicas are independent") {
  const ProcessSpec spec = constant_spec(5000, 3);
  const ProcessTrace a = simulate(spec), b = simulate(spec);
  CHECK(a.states == b.states);
  CHECK(csv(a) == csv(b));
  const auto reps = simulate_replicas(spec, 3);
  REQUIRE(reps.size() == 3);
  CHECK(reps[0].seed == replica_seed(3, 0));
  CHECK(reps[0].states != reps[1].states);
  ProcessSpec again = spec;
  again.seed = replica_seed(3, 1);
  CHECK(simulate(again).states == reps[1].states);
}

TEST_CASE("checkpoint averages agree with the recorded path") {
  const ProcessTrace t = simulate(constant_spec(4096, 5));
  REQUIRE(t.states.size() == 4096);
  for (const auto& cp : t.checkpoints) {
    Vector count = Vector::Zero(4);
    for (long i = 0; i < cp.n; ++i) count[t.states[static_cast<std::size_t>(i)]] += 1.0;
    CHECK((cp.v - count / double(cp.n)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(cp.v.minCoeff() >= 0.0);
    CHECK(std::abs(cp.v.sum() - 1.0) <= 1e-10);
    CHECK(cp.state == t.states[static_cast<std::size_t>(cp.n - 1)]);
    // Unit weights: w = v and the bound is zero.
    CHECK(cp.weighted_gap <= 1e-12);
    CHECK(cp.weighted_bound == 0.0);
  }
}

TEST_CASE("one-step drift identity holds at every checkpoint") {
  const ProcessSpec spec = mirror_spec(0.2, 2048);
  const Simulator sim(spec);
  const ProcessTrace t = sim.run();
  for (const auto& cp : t.checkpoints) {
    if (cp.n >= spec.horizon) continue;
    const std::size_t i = static_cast<std::size_t>(cp.n);
    const Index x = t.states[i], y = t.opponent_states[i];
    Vector obs = Vector::Zero(6);
    obs[x] = 1.0;
    obs[2 + y] = 1.0;
    obs[4] = spec.game->game.payoff(1)(x, y);
    obs[5] = spec.game->game.payoff(2)(x, y);
    // Replay to n + 1 through the simulator's own update.
    ProcessState s = sim.initial_state();
    for (std::size_t k = 1; k <= i; ++k) sim.advance(s, t.states[k], t.opponent_states[k]);
    const Vector next = sim.observation_average(s);
    const Vector expected = cp.v + (obs - cp.v) / double(cp.n + 1);
    CHECK((next - expected).cwiseAbs().maxCoeff() <= 1e-14);
    // Payoff coordinates stay inside the payoff range.
    CHECK(cp.v[4] >= -1.0);
    CHECK(cp.v[4] <= 0.0);
  }
}

TEST_CASE("empirical one-step law matches the kernel row within 4 standard errors") {
  const MarkovMatrix m = four_state();
  Rng rng(12345);
  const int draws = 100000;
  for (Index x = 0; x < 4; ++x) {
    Vector counts = Vector::Zero(4);
    for (int k = 0; k < draws; ++k) counts[step(m, x, rng.uniform())] += 1.0;
    for (Index y = 0; y < 4; ++y) {
      const double p = m(x, y);
      const double se = std::sqrt(p * (1 - p) / draws);
      CHECK(std::abs(counts[y] / draws - p) <= 4 * se);
    }
  }
}

TEST_CASE("scripted opponents") {
  ProcessSpec spec = mirror_spec(0.3, 200);
  const ProcessTrace t = simulate(spec);
  for (std::size_t i = 1; i < t.states.size(); ++i) CHECK(t.opponent_states[i] == t.states[i - 1]);

  spec.game->opponent = scripted_opponent(ScriptedKind::kFixedMixed, vec({1, 0}));
  const ProcessTrace fixed = simulate(spec);
  for (std::size_t i = 1; i < fixed.opponent_states.size(); ++i) CHECK(fixed.opponent_states[i] == 0);

  spec.horizon = 20000;
  spec.checkpoints = {20000};
  spec.game->opponent = scripted_opponent(ScriptedKind::kFixedMixed, vec({0.5, 0.5}));
  const ProcessTrace mixed = simulate(spec);
  const Vector& v = mixed.checkpoints.back().v;
  CHECK(std::abs(v[2] - 0.5) < 4 * std::sqrt(0.25 / 20000));
}

TEST_CASE("constant-strategy diagnostics") {
  const ProcessTrace t = simulate(constant_spec(1 << 14, 9));
  for (const auto& cp : t.checkpoints) {
    const auto& d = cp.diagnostics;
    CHECK(d.resolved);
    CHECK(d.q_step == 0.0);
    CHECK(d.pi_step == 0.0);
    CHECK(d.hyp2 <= 1e-12);
    CHECK(d.hyp1_i == doctest::Approx(d.q_norm * d.q_norm * std::log(double(cp.n)) / cp.n));
  }
  const auto report = hypothesis_report(t);
  for (const auto& v : report.verdicts) CHECK_MESSAGE(v.consistent, v.quantity);
  CHECK(report.flagged_rows == 0);
}

TEST_CASE("mirror counterexample keeps Vhat drift away from zero") {
  const ProcessTrace t = simulate(mirror_spec(0.2, 1 << 14));
  for (const auto& cp : t.checkpoints) CHECK(cp.diagnostics.hyp2 > 0.01);
  const auto report = hypothesis_report(t);
  bool hyp2_violated = false;
  for (const auto& v : report.verdicts)
    if (v.quantity == "hyp2" && !v.consistent) hyp2_violated = true;
  CHECK(hyp2_violated);

  // theta_n = pi_n Vhat_n carries the payoff -1/2 of the uniform profile.
  const auto& last = t.checkpoints.back();
  CHECK(last.theta[4] == doctest::Approx(-0.5));
}

TEST_CASE("decomposable strategies are flagged, not fatal") {
  // A frozen annealing chain on a landscape with a plateau becomes reducible
  // in double precision; diagnostics must survive it.
  const Landscape l(MarkovMatrix(testing::path_exploration(3)), vec({0, 40, 0}));
  ProcessSpec spec{AnnealingStrategy{l, AcceptanceShape::kMetropolis, CoolingSchedule{30.0, 0.0}},
                   std::nullopt, ObservationMap::kOccupation, {}, 0, 64, 1, dyadic_checkpoints(64), true};
  const ProcessTrace t = simulate(spec);
  CHECK(t.checkpoints.size() == 6);
  const auto report = hypothesis_report(t);
  CHECK(report.flagged_rows == t.checkpoints.size());
  CHECK_FALSE(t.checkpoints.front().diagnostics.resolved);
  CHECK(std::isnan(t.checkpoints.front().diagnostics.q_norm));
}

TEST_CASE("weighted gap never exceeds its bound") {
  for (double alpha : {1.0, -0.5, 2.0}) {
    ProcessSpec spec = constant_spec(1 << 15, 13);
    spec.weights = WeightSequence{alpha};
    const ProcessTrace t = simulate(spec);
    for (const auto& row : weighted_gap_bound(t)) CHECK(row.gap <= row.bound + 1e-12);
    // Oracle: recompute w and the bound from the raw path.
    double r = 0.0, sum = 0.0;
    Vector w = Vector::Zero(4), v = Vector::Zero(4);
    const auto& last = t.checkpoints.back();
    for (long i = 1; i <= last.n; ++i) {
      const double a = spec.weights(i);
      r += a;
      w[t.states[static_cast<std::size_t>(i - 1)]] += a;
      v[t.states[static_cast<std::size_t>(i - 1)]] += 1.0;
      sum += std::abs(r / double(i) - spec.weights(i + 1));
    }
    CHECK((last.w - w / r).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(last.weighted_gap == doctest::Approx((w / r - v / double(last.n)).lpNorm<1>()).epsilon(1e-6));
    CHECK(last.weighted_bound == doctest::Approx(2.0 / r * sum).epsilon(1e-9));
  }
}

TEST_CASE("kernel failures carry the step index") {
  // Zero interaction: the linear reinforcement row has no mass once eps = 1/r
  // is multiplied by zero.
  ProcessSpec spec{LinearVrrwStrategy{Matrix::Zero(2, 2)}, std::nullopt, ObservationMap::kOccupation,
                   {}, 0, 10, 1, {}, true};
  try {
    simulate(spec);
    FAIL("expected a kernel error");
  } catch (const KernelError& e) {
    CHECK(e.step() == 1);
  }
}

TEST_CASE("spec validation") {
  ProcessSpec spec = constant_spec(10, 1);
  spec.checkpoints = {1};
  CHECK_THROWS_AS(Simulator{spec}, ValidationError);
  spec.checkpoints = {4, 4};
  CHECK_THROWS_AS(Simulator{spec}, ValidationError);
  spec.checkpoints = {};
  spec.initial_state = 9;
  CHECK_THROWS_AS(Simulator{spec}, ValidationError);
  spec.initial_state = 0;
  spec.observation = ObservationMap::kGamePair;
  CHECK_THROWS_AS(Simulator{spec}, ValidationError);
  CHECK(parse_observation("game_full") == ObservationMap::kGameFull);
  CHECK_THROWS_AS(parse_observation("pairs"), ValidationError);
}

TEST_CASE("trace CSV layout") {
  const ProcessTrace t = simulate(mirror_spec(0.2, 16));
  std::istringstream in(csv(t));
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "n,state,v0,v1,v2,v3,v4,v5,w0,w1,q_norm,q_step,pi_step,hyp1_i,prop34_ii,prop34_iii,hyp2,payoff_mean");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 4);
}
