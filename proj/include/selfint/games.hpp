#pragma once

#include <vector>

#include "selfint/landscape.hpp"
#include "selfint/markov.hpp"

namespace selfint {

// Two-player finite game. payoff(1) and payoff(2) are both |E1| x |E2|:
// entry (x, y) is what the player receives when 1 plays x and 2 plays y.
class TwoPlayerGame {
 public:
  TwoPlayerGame(Matrix u1, Matrix u2);
  static TwoPlayerGame zero_sum(Matrix u1);
  static TwoPlayerGame potential(Matrix u);

  const Matrix& payoff(int player) const;
  Index actions(int player) const;
  bool is_zero_sum() const { return zero_sum_; }
  bool is_potential() const { return potential_; }

 private:
  Matrix u1_, u2_;
  bool zero_sum_, potential_;
};

struct MixedProfile {
  Vector v1;
  Vector v2;
};

// U^i(v1, v2), extended bilinearly.
double mixed_payoff(const TwoPlayerGame& game, const Vector& v1, const Vector& v2, int player);

// Expected payoff of each of `player`'s actions against the opponent's mixture.
Vector expected_payoffs(const TwoPlayerGame& game, int player, const Vector& opponent_v);

std::vector<Index> best_response_support(const TwoPlayerGame& game, int player,
                                         const Vector& opponent_v,
                                         double tau_tie = kTieTolerance);

// max_i [max_x U^i(x, v^-i) - U^i(v^i, v^-i)]; zero exactly at equilibria.
double nash_gap(const TwoPlayerGame& game, const Vector& v1, const Vector& v2);

struct ZeroSumSolution {
  double value;
  Vector v1;
  Vector v2;
};

// Value and one pair of optimal strategies by support enumeration.
// Requires a zero-sum game with at most 12 actions per player.
ZeroSumSolution zero_sum_value(const TwoPlayerGame& game);

// Every equilibrium found by equal-size support enumeration, deduplicated.
std::vector<MixedProfile> nash_equilibria(const TwoPlayerGame& game);

// Product-Euclidean distance from (v1, v2) to the sampled Nash set: the
// support-enumeration equilibria plus every segment between two of them whose
// midpoint is itself an equilibrium.
double nash_set_distance(const TwoPlayerGame& game, const Vector& v1, const Vector& v2);

}  // namespace selfint
