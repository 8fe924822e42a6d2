#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selfint/kernels.hpp"
#include "selfint/markov.hpp"

namespace selfint {

// An irreducible chain with its invariant measure and smallest stationary mass.
struct DirichletData {
  MarkovMatrix chain;
  ProbVector pi;
  double pi_star;
};

// Throws DecomposableError unless m is irreducible.
DirichletData dirichlet_data(const MarkovMatrix& m);

// var(f) = pi(f^2) - (pi f)^2.
double variance(const Vector& f, const ProbVector& pi);
// sum_x f(x)^2 log(f(x)^2 / pi(f^2)) pi(x), with 0 log 0 = 0.
double entropy(const Vector& f, const ProbVector& pi);
// (1/2) sum_{x,y} (f(y) - f(x))^2 M(x, y) pi(x). Rejects pi that is not
// M-invariant to 1e-8.
double energy(const Vector& f, const MarkovMatrix& m, const ProbVector& pi);

// Smallest nonzero eigenvalue of I - (M + M*)/2 in l2(pi), where
// M*(x, y) = pi(y) M(y, x) / pi(x). Requires irreducible m.
double spectral_gap(const MarkovMatrix& m, const ProbVector& pi);

struct LogSobolevBracket {
  double lower;
  double upper;
};

// (1 - 2 p) / log((1 - p) / p) * lambda <= alpha <= lambda / 2 with p = pi_*.
// At p = 1/2 the factor takes its limit 1/2.
LogSobolevBracket log_sobolev_bracket(double lambda, double pi_star);

struct SpectralConstants {
  double lambda = 0.0;
  double alpha_lower = 0.0;
  double alpha_upper = 0.0;
  std::optional<double> alpha_numeric;
  // The best restart stopped on its tolerance rather than the iteration cap.
  bool converged = false;
  // The raw search value fell outside the bracket and was clamped into it.
  bool clamped = false;
};

// Multistart descent on E(f) / L(f) over positive f. The result is the best
// ratio found, kept inside the bracket (widened by 1e-6 relative).
SpectralConstants log_sobolev_search(const MarkovMatrix& m, const ProbVector& pi, int restarts,
                                     int iters, std::uint64_t seed = 1);

// B(x, y) = sqrt(pi(y) / pi(x)) / lambda, an entrywise bound on |Q(x, y)|.
Matrix q_bound_spectral(const MarkovMatrix& m);
// (1/lambda) [log_+(log(1/p)) log((1-p)/p) / (1-2p) + e], p = pi_*.
double q_bound_uniform(const MarkovMatrix& m);
double q_bound_uniform(double lambda, double pi_star);

// Spectral gap and pi_* of the annealing chain with W(x, y) = U(y) - U(x)
// at a fixed beta. Evaluated in 100-digit arithmetic so that gaps far below
// double epsilon are resolved; m0 must be reversible.
struct AnnealingSpectrum {
  double beta;
  double log_lambda;
  double log_pi_star;
};
// Returns std::nullopt when the gap is below the resolvable floor (1e-80).
std::optional<AnnealingSpectrum> annealing_spectrum(const MarkovMatrix& m0, const Vector& u,
                                                    double beta,
                                                    AcceptanceShape shape = AcceptanceShape::kMetropolis);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<AnnealingSpectrum> points;  // every resolved grid point
  std::vector<double> dropped_betas;      // grid points whose gap underflowed
  std::size_t fitted = 0;                 // points used in the fit (top half)
};

// Least-squares slope of log lambda(beta) against beta over the top half of
// the (increasing) grid.
SlopeFit holley_stroock_slope(const MarkovMatrix& m0, const Vector& u,
                              const std::vector<double>& beta_grid,
                              AcceptanceShape shape = AcceptanceShape::kMetropolis);

}  // namespace selfint
