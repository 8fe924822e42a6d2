#pragma once

#include <vector>

#include "selfint/markov.hpp"

namespace selfint {

// Ties in argmin/argmax sets are resolved with this absolute tolerance unless
// a caller passes its own.
inline constexpr double kTieTolerance = 1e-9;

// A potential U on E together with an exploration matrix M0 whose positive
// entries define the admissible moves. M0 must be irreducible.
class Landscape {
 public:
  Landscape(MarkovMatrix exploration, Vector potential);

  const MarkovMatrix& exploration() const { return exploration_; }
  const Vector& potential() const { return potential_; }
  Index size() const { return potential_.size(); }

 private:
  MarkovMatrix exploration_;
  Vector potential_;
};

// min over paths x = x0, ..., xn = y (M0(xi, xi+1) > 0) of the highest U on
// the path, endpoints included. Elev(x, x) = U(x).
double elevation(const Landscape& l, Index x, Index y);
// Elevation from x to every state (bottleneck Dijkstra).
Vector elevations_from(const Landscape& l, Index x);

// U# = max_{x,y} [Elev(x, y) - U(x) - U(y) + min U].
double energy_barrier(const Landscape& l);

std::vector<Index> argmin_set(const Vector& u, double tau_tie = kTieTolerance);
std::vector<Index> argmax_set(const Vector& u, double tau_tie = kTieTolerance);

// max over opponent actions y of the barrier of x -> max_z U(z, y) - U(x, y),
// the potential descended by a player climbing its payoff column.
// `payoff` is |E1| x |E2| for the player whose actions index the rows.
double game_barrier(const Matrix& payoff, const MarkovMatrix& m0);

}  // namespace selfint
