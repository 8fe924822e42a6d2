#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "selfint/games.hpp"
#include "selfint/kernels.hpp"
#include "selfint/landscape.hpp"
#include "selfint/markov.hpp"

namespace selfint {

// 64-bit Mersenne Twister with a hand-rolled [0, 1) conversion, so traces are
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Independent stream seed for replica `replica` of a run seeded with `seed`.
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica);

// Inverse-CDF draw in canonical order: the first y with draw < sum_{z<=y} row(z).
// Throws ValidationError if the row sum deviates from 1 by more than 1e-9.
Index sample_row(const Vector& row, double draw);
Index step(const MarkovMatrix& m, Index current_state, double draw);

// v_n = v_{n-1} + (V_n - v_{n-1}) / n.
Vector update_average(const Vector& v_prev, const Vector& v_new, long n);

struct WeightedAverage {
  Vector w;
  double r;
};
// r_n = r_{n-1} + a_n and w_n = w_{n-1} + (V_n - w_{n-1}) a_n / r_n.
WeightedAverage update_weighted(const Vector& w_prev, const Vector& v_new, double a_n,
                                double r_prev);

// a_i = (log(i + 1))^alpha. alpha >= 0 gives nondecreasing weights, alpha < 0
// decreasing ones.
struct WeightSequence {
  double alpha = 0.0;
  double operator()(long i) const;
};

enum class ObservationMap {
  kOccupation,  // V_n = delta_{X_n}
  kGamePair,    // V_n = (delta_{X_n}, delta_{Y_n})
  kGameFull,    // V_n = (delta_{X_n}, delta_{Y_n}, U1(X_n, Y_n), U2(X_n, Y_n))
};

ObservationMap parse_observation(const std::string& name);

// Strategy families for the process X (player 1 in games).
struct ConstantStrategy {
  MarkovMatrix chain;
};
struct AnnealingStrategy {
  Landscape landscape;
  AcceptanceShape shape = AcceptanceShape::kMetropolis;
  CoolingSchedule schedule;
};
// eps_n = 1 / r_n and the weighted occupation w_n drive the kernel.
struct LinearVrrwStrategy {
  Matrix interaction;
};
struct ExponentialVrrwStrategy {
  MarkovMatrix exploration;
  Matrix interaction;
  AcceptanceShape shape = AcceptanceShape::kMetropolis;
  CoolingSchedule schedule;
};
// Climbs U1(., v2_n); needs a game.
struct FictitiousStrategy {
  MarkovMatrix exploration;
  AcceptanceShape shape = AcceptanceShape::kMetropolis;
  CoolingSchedule schedule;
};

using KernelSpec = std::variant<ConstantStrategy, AnnealingStrategy, LinearVrrwStrategy,
                                ExponentialVrrwStrategy, FictitiousStrategy>;

// Y_{n+1} = X_n.
struct MirrorOpponent {};
// Y_{n+1} i.i.d. with law q.
struct FixedMixedOpponent {
  Vector q;
};
// Player 2 also plays Markovian fictitious play on U2(v1_n, .).
struct FictitiousOpponent {
  MarkovMatrix exploration;
  AcceptanceShape shape = AcceptanceShape::kMetropolis;
  CoolingSchedule schedule;
};
using Opponent = std::variant<MirrorOpponent, FixedMixedOpponent, FictitiousOpponent>;

enum class ScriptedKind { kMirror, kFixedMixed };
// Opponent rule for the scripted kinds; `q` is used by kFixedMixed only.
Opponent scripted_opponent(ScriptedKind kind, const Vector& q = Vector());

struct GameSetup {
  TwoPlayerGame game;
  Opponent opponent = MirrorOpponent{};
  Index initial_action = 0;
};

struct ProcessSpec {
  KernelSpec kernel;
  std::optional<GameSetup> game;
  ObservationMap observation = ObservationMap::kOccupation;
  WeightSequence weights;
  Index initial_state = 0;
  long horizon = 1;
  std::uint64_t seed = 1;
  std::vector<long> checkpoints;  // sorted, each in [2, horizon]
  bool record_states = true;
};

// 2, 4, 8, ... up to the horizon, plus the horizon itself.
std::vector<long> dyadic_checkpoints(long horizon);

// Everything the next kernel depends on; copyable so that diagnostics can
// enumerate one-step futures.
struct ProcessState {
  long n = 1;
  Index x = 0;
  Index y = -1;  // -1 without a game
  Vector occ1;   // v^1_n (the occupation measure of X)
  Vector occ2;   // v^2_n
  Vector payoff; // running means of (U1, U2)(X_i, Y_i)
  Vector w;      // weighted occupation of X
  double r = 0.0;
  double bound_sum = 0.0;  // sum_{i<=n} |r_i / i - a_{i+1}|
};

// One row per checkpoint. Step quantities are the worst case over every
// positive-probability next outcome (X_{n+1}, Y_{n+1}) given the state at n.
struct DiagnosticsRow {
  long n = 0;
  // false: M_n or some M_{n+1} is decomposable or numerically singular; the
  // affected quantities are NaN.
  bool resolved = true;
  double q_norm = 0.0;
  double q_step = 0.0;
  double pi_step = 0.0;
  double m_step = 0.0;  // |M_{n+1} - M_n|
  double hyp1_i = 0.0;
  double prop34_ii = 0.0;
  double prop34_iii = 0.0;
  double hyp2 = 0.0;
};

struct Checkpoint {
  long n = 0;
  Index state = 0;
  Index opponent_state = -1;
  Vector v;      // observation average
  Vector w;      // weighted occupation
  Vector theta;  // pi_n Vhat_n
  double payoff_mean = 0.0;  // running mean of U1(X_i, Y_i); NaN without a game
  double weighted_gap = 0.0;    // |w_n - v_n|_1 on the occupation coordinates
  double weighted_bound = 0.0;  // (2 / r_n) sum |r_i / i - a_{i+1}|
  DiagnosticsRow diagnostics;
};

struct ProcessTrace {
  std::uint64_t seed = 0;
  std::vector<std::int32_t> states;           // X_1..X_N when recorded
  std::vector<std::int32_t> opponent_states;  // Y_1..Y_N when recorded
  std::vector<Checkpoint> checkpoints;
  ProcessState final_state;
};

// Builds kernels and observations for a spec and runs the adapted loop.
class Simulator {
 public:
  explicit Simulator(ProcessSpec spec);

  const ProcessSpec& spec() const { return spec_; }
  ProcessState initial_state() const;

  // Row X_n of the player-1 strategy M_n.
  void player_row(const ProcessState& s, Index x, Vector& row) const;
  MarkovMatrix player_kernel(const ProcessState& s) const;
  // Law of Y_{n+1} given the state at n.
  Vector opponent_law(const ProcessState& s) const;
  // The chain analysed by the diagnostics: M_n, or M1_n x M2_n when both
  // players run Markovian fictitious play.
  MarkovMatrix strategy(const ProcessState& s) const;
  // Vhat_n: one row per strategy state, one column per observation coordinate.
  Matrix observation_map(const ProcessState& s) const;
  Vector observation_average(const ProcessState& s) const;
  Index observation_dimension() const;

  void advance(ProcessState& s, Index x_next, Index y_next) const;
  DiagnosticsRow diagnose(const ProcessState& s, Vector* theta = nullptr) const;
  Checkpoint checkpoint(const ProcessState& s) const;

  ProcessTrace run() const;

 private:
  double beta(const CoolingSchedule& schedule, long n) const;
  void opponent_fictitious_row(const FictitiousOpponent& opp, const ProcessState& s, Index y,
                               Vector& row) const;

  ProcessSpec spec_;
  Index n1_ = 0, n2_ = 0;
  Matrix annealing_w_;  // cached pair potential for the annealing family
};

ProcessTrace simulate(const ProcessSpec& spec);

// Runs `replicas` copies concurrently; replica i uses replica_seed(spec.seed, i).
std::vector<ProcessTrace> simulate_replicas(const ProcessSpec& spec, int replicas);

struct Verdict {
  std::string quantity;
  bool consistent = true;
  std::optional<long> offending_n;
};

struct HypothesisReport {
  std::vector<DiagnosticsRow> rows;
  std::vector<Verdict> verdicts;
  std::size_t flagged_rows = 0;
};

// Trend verdicts over the last half of the checkpoints: hyp1_i, q_step,
// pi_step and hyp2 must decrease (or vanish); prop34_ii and prop34_iii must
// stay below their first-half maximum.
HypothesisReport hypothesis_report(const ProcessTrace& trace);

struct GapBoundRow {
  long n;
  double gap;
  double bound;
};
std::vector<GapBoundRow> weighted_gap_bound(const ProcessTrace& trace);

// Checkpoint CSV: n, state, v.., w.., q_norm, q_step, pi_step, hyp1_i,
// prop34_ii, prop34_iii, hyp2, payoff_mean.
void write_trace_csv(std::ostream& out, const ProcessTrace& trace);

}  // namespace selfint
