#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace selfint {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Entries of probability vectors and rows of Markov matrices must sum to one
// within this tolerance.
inline constexpr double kStochasticTol = 1e-12;

// Ordered, distinct state labels. Index order is canonical for every matrix
// and vector built over the space.
class StateSpace {
 public:
  explicit StateSpace(std::vector<std::string> labels);
  static StateSpace numbered(Index size);

  Index size() const { return static_cast<Index>(labels_.size()); }
  const std::string& label(Index i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  Index index_of(const std::string& label) const;

  bool operator==(const StateSpace&) const = default;

 private:
  std::vector<std::string> labels_;
};

// Nonnegative weights summing to one.
class ProbVector {
 public:
  explicit ProbVector(Vector weights, double tol = kStochasticTol);
  static ProbVector point_mass(Index size, Index at);
  static ProbVector uniform(Index size);

  Index size() const { return weights_.size(); }
  double operator[](Index i) const { return weights_[i]; }
  const Vector& values() const { return weights_; }

 private:
  Vector weights_;
};

// Square, nonnegative, row-stochastic matrix.
class MarkovMatrix {
 public:
  explicit MarkovMatrix(Matrix entries, double tol = kStochasticTol);
  static MarkovMatrix identity(Index size);
  // Pi(x, y) = pi(y): every row equals pi.
  static MarkovMatrix rank_one(const ProbVector& pi);

  Index size() const { return entries_.rows(); }
  double operator()(Index x, Index y) const { return entries_(x, y); }
  const Matrix& matrix() const { return entries_; }

 private:
  Matrix entries_;
};

// Communicating classes of the digraph {(x, y) : M(x, y) > 0}. Classes are
// listed in order of their smallest member; members are sorted.
struct ClassDecomposition {
  std::vector<std::vector<Index>> classes;
  std::vector<bool> recurrent;  // closed: no positive-probability exit

  Index recurrent_count() const;
};

// The matrix Q with Q 1 = 0 and Q (I - M) = (I - M) Q = I - Pi.
class PseudoInverse {
 public:
  PseudoInverse(Matrix q, ProbVector pi) : q_(std::move(q)), pi_(std::move(pi)) {}

  const Matrix& matrix() const { return q_; }
  double operator()(Index x, Index y) const { return q_(x, y); }
  // Invariant measure of the chain this inverts.
  const ProbVector& invariant() const { return pi_; }

 private:
  Matrix q_;
  ProbVector pi_;
};

// (Mf)(x) = sum_y M(x, y) f(y).
Vector apply_to_function(const MarkovMatrix& m, const Vector& f);
// (mu M)(y) = sum_x mu(x) M(x, y).
ProbVector apply_to_measure(const ProbVector& mu, const MarkovMatrix& m);

ClassDecomposition class_decomposition(const MarkovMatrix& m);
bool is_indecomposable(const MarkovMatrix& m);
bool is_irreducible(const MarkovMatrix& m);

// Unique pi with pi M = pi. Throws DecomposableError when M has more than one
// closed class.
ProbVector invariant_measure(const MarkovMatrix& m);

// Computed as (I - M + Pi)^{-1} - Pi.
PseudoInverse pseudo_inverse(const MarkovMatrix& m);
// Same, when the invariant measure is already known.
PseudoInverse pseudo_inverse(const MarkovMatrix& m, const ProbVector& pi);

// Max absolute entry. Throws ValidationError on empty input.
double sup_norm(const Vector& f);
double sup_norm(const Matrix& n);

}  // namespace selfint
