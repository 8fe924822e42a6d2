#include "selfint/games.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <optional>

#include "selfint/errors.hpp"

namespace selfint {
namespace {

constexpr double kEquilibriumTol = 1e-9;
constexpr Index kMaxEnumeratedActions = 12;

void require_player(int player) {
  if (player != 1 && player != 2) throw ValidationError("player must be 1 or 2");
}

std::vector<Index> members(unsigned mask) {
  std::vector<Index> out;
  for (Index i = 0; mask != 0; ++i, mask >>= 1)
    if (mask & 1u) out.push_back(i);
  return out;
}

// Mixture q over `own` support (size k) of the columns of `payoff` that makes
// every row in `rows` indifferent: payoff(rows, own) q = c 1, sum q = 1.
// payoff is indexed (row player action, mixing player action).
std::optional<Vector> indifference(const Matrix& payoff, const std::vector<Index>& rows,
                                   const std::vector<Index>& own, Index own_size) {
  const Index k = static_cast<Index>(own.size());
  Matrix a = Matrix::Zero(k + 1, k + 1);
  Vector rhs = Vector::Zero(k + 1);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) a(i, j) = payoff(rows[i], own[j]);
    a(i, k) = -1.0;
  }
  a.row(k).head(k).setOnes();
  rhs[k] = 1.0;
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) return std::nullopt;
  const Vector sol = lu.solve(rhs);
  Vector q = Vector::Zero(own_size);
  for (Index j = 0; j < k; ++j) {
    if (sol[j] < -1e-12) return std::nullopt;
    q[own[j]] = std::max(0.0, sol[j]);
  }
  q /= q.sum();
  return q;
}

template <class Visitor>
void enumerate_equilibria(const TwoPlayerGame& game, Visitor&& visit) {
  const Index n1 = game.actions(1), n2 = game.actions(2);
  if (n1 > kMaxEnumeratedActions || n2 > kMaxEnumeratedActions)
    throw ValidationError("support enumeration is limited to 12 actions per player");
  const Matrix& u1 = game.payoff(1);
  const Matrix u2t = game.payoff(2).transpose();  // (player-2 action, player-1 action)
  const Index kmax = std::min(n1, n2);
  for (Index k = 1; k <= kmax; ++k) {
    for (unsigned m1 = 1; m1 < (1u << n1); ++m1) {
      if (std::popcount(m1) != k) continue;
      const auto s1 = members(m1);
      for (unsigned m2 = 1; m2 < (1u << n2); ++m2) {
        if (std::popcount(m2) != k) continue;
        const auto s2 = members(m2);
        // Player 2 mixes on s2 to make player 1 indifferent on s1, and vice versa.
        auto q = indifference(u1, s1, s2, n2);
        if (!q) continue;
        auto p = indifference(u2t, s2, s1, n1);
        if (!p) continue;
        if (nash_gap(game, *p, *q) > kEquilibriumTol) continue;
        if (!visit(MixedProfile{*p, *q})) return;
      }
    }
  }
}

double profile_distance(const MixedProfile& a, const Vector& v1, const Vector& v2) {
  return std::sqrt((a.v1 - v1).squaredNorm() + (a.v2 - v2).squaredNorm());
}

double segment_distance(const MixedProfile& a, const MixedProfile& b, const Vector& v1,
                        const Vector& v2) {
  const Index n1 = v1.size();
  Vector pa(n1 + v2.size()), pb(pa.size()), p(pa.size());
  pa << a.v1, a.v2;
  pb << b.v1, b.v2;
  p << v1, v2;
  const Vector d = pb - pa;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - pa).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (pa + t * d - p).norm();
}

}  // namespace

TwoPlayerGame::TwoPlayerGame(Matrix u1, Matrix u2) : u1_(std::move(u1)), u2_(std::move(u2)) {
  if (u1_.size() == 0 || u1_.rows() != u2_.rows() || u1_.cols() != u2_.cols())
    throw DimensionError("payoff matrices must be nonempty and of equal shape");
  if (!u1_.allFinite() || !u2_.allFinite()) throw ValidationError("payoffs must be finite");
  zero_sum_ = ((u1_ + u2_).cwiseAbs().array() <= 1e-12).all();
  potential_ = ((u1_ - u2_).cwiseAbs().array() <= 1e-12).all();
}

TwoPlayerGame TwoPlayerGame::zero_sum(Matrix u1) {
  Matrix u2 = -u1;
  return TwoPlayerGame(std::move(u1), std::move(u2));
}

TwoPlayerGame TwoPlayerGame::potential(Matrix u) {
  Matrix copy = u;
  return TwoPlayerGame(std::move(u), std::move(copy));
}

const Matrix& TwoPlayerGame::payoff(int player) const {
  require_player(player);
  return player == 1 ? u1_ : u2_;
}

Index TwoPlayerGame::actions(int player) const {
  require_player(player);
  return player == 1 ? u1_.rows() : u1_.cols();
}

double mixed_payoff(const TwoPlayerGame& game, const Vector& v1, const Vector& v2, int player) {
  if (v1.size() != game.actions(1) || v2.size() != game.actions(2))
    throw DimensionError("mixed strategy sizes do not match the game");
  return v1.dot(game.payoff(player) * v2);
}

Vector expected_payoffs(const TwoPlayerGame& game, int player, const Vector& opponent_v) {
  require_player(player);
  if (opponent_v.size() != game.actions(3 - player))
    throw DimensionError("opponent mixture size does not match the game");
  return player == 1 ? Vector(game.payoff(1) * opponent_v)
                     : Vector(game.payoff(2).transpose() * opponent_v);
}

std::vector<Index> best_response_support(const TwoPlayerGame& game, int player,
                                         const Vector& opponent_v, double tau_tie) {
  return argmax_set(expected_payoffs(game, player, opponent_v), tau_tie);
}

double nash_gap(const TwoPlayerGame& game, const Vector& v1, const Vector& v2) {
  const Vector e1 = expected_payoffs(game, 1, v2);
  const Vector e2 = expected_payoffs(game, 2, v1);
  return std::max(e1.maxCoeff() - v1.dot(e1), e2.maxCoeff() - v2.dot(e2));
}

ZeroSumSolution zero_sum_value(const TwoPlayerGame& game) {
  if (!game.is_zero_sum()) throw ValidationError("zero_sum_value needs U2 = -U1");
  std::optional<ZeroSumSolution> found;
  enumerate_equilibria(game, [&](const MixedProfile& p) {
    found = ZeroSumSolution{mixed_payoff(game, p.v1, p.v2, 1), p.v1, p.v2};
    return false;
  });
  if (!found) throw NumericalError("support enumeration found no equilibrium");
  return *found;
}

std::vector<MixedProfile> nash_equilibria(const TwoPlayerGame& game) {
  std::vector<MixedProfile> out;
  enumerate_equilibria(game, [&](const MixedProfile& p) {
    for (const auto& q : out)
      if (profile_distance(q, p.v1, p.v2) <= 1e-9) return true;
    out.push_back(p);
    return true;
  });
  return out;
}

double nash_set_distance(const TwoPlayerGame& game, const Vector& v1, const Vector& v2) {
  const auto eqs = nash_equilibria(game);
  if (eqs.empty()) throw NumericalError("support enumeration found no equilibrium");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : eqs) best = std::min(best, profile_distance(e, v1, v2));
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    for (std::size_t j = i + 1; j < eqs.size(); ++j) {
      const Vector m1 = 0.5 * (eqs[i].v1 + eqs[j].v1);
      const Vector m2 = 0.5 * (eqs[i].v2 + eqs[j].v2);
      if (nash_gap(game, m1, m2) > kEquilibriumTol) continue;
      best = std::min(best, segment_distance(eqs[i], eqs[j], v1, v2));
    }
  }
  return best;
}

}  // namespace selfint
