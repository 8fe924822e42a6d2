#pragma once

#include <limits>
#include <string>

#include "selfint/markov.hpp"

namespace selfint {

// Acceptance function applied to exp(-beta * W).
enum class AcceptanceShape {
  kMetropolis,  // psi(u) = min(1, u)
  kLogistic,    // psi(u) = u / (1 + u)
};

AcceptanceShape parse_acceptance(const std::string& name);
std::string to_string(AcceptanceShape shape);

// psi(exp(-beta * w)), evaluated without overflow for large |beta * w|.
double accept_probability(AcceptanceShape shape, double beta, double w);

// beta(t) = beta0 + A log(max(t, 1)). Nondecreasing with 0 <= beta'(t) <= A / t.
struct CoolingSchedule {
  double beta0 = 0.0;
  double rate = 0.0;  // the constant A

  double operator()(double t) const;
};

double schedule_eval(const CoolingSchedule& s, double t);

// Margin kept below the strict bound A < 1 / (2 barrier).
inline constexpr double kScheduleSafety = 0.95;

// 0.95 / (2 barrier); +infinity when the barrier is zero.
double admissible_A(double barrier);

// Off-diagonal M(x, y) = M0(x, y) psi(exp(-beta W(x, y))); the diagonal takes
// the remaining mass. The diagonal of M0 is ignored.
MarkovMatrix metropolis_kernel(const MarkovMatrix& m0, const Matrix& w, double beta,
                               AcceptanceShape shape);

// One row of metropolis_kernel, written into `row`. Used on the hot path of the
// simulator, where only the row of the current state is needed.
void metropolis_row(const MarkovMatrix& m0, Index x, const Vector& w_from_x, double beta,
                    AcceptanceShape shape, Vector& row);

// Annealing pair potential W(x, y) = U(y) - U(x).
Matrix potential_differences(const Vector& u);

// pi_beta(x) proportional to exp(-beta U(x)) pi0(x).
ProbVector gibbs_measure(const ProbVector& pi0, const Vector& u, double beta);

// K(x, y) proportional to Umat(x, y) (eps + v(y)).
MarkovMatrix vrrw_linear_kernel(const Matrix& interaction, double eps, const Vector& v);
void vrrw_linear_row(const Matrix& interaction, double eps, const Vector& v, Index x,
                     Vector& row);

// Metropolis form with W(x, y, v) = U(y, v) - U(x, v), U(x, v) = (Umat v)(x).
MarkovMatrix vrrw_exponential_kernel(const MarkovMatrix& m0, const Matrix& interaction,
                                     double beta, const Vector& v, AcceptanceShape shape);

// Metropolis form with W(x, y) = U1(x, v2) - U1(y, v2): moves toward higher
// expected payoff are accepted with psi(exp(beta * gain)).
MarkovMatrix fictitious_kernel(const MarkovMatrix& m0, const Matrix& payoff, double beta,
                               const Vector& opponent_v, AcceptanceShape shape);

// (M1 x M2)((x, y), (x', y')) = M1(x, x') M2(y, y'); pair (x, y) has index
// x * |E2| + y.
MarkovMatrix product_kernel(const MarkovMatrix& m1, const MarkovMatrix& m2);

}  // namespace selfint
