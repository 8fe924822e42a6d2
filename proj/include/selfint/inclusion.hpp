#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "selfint/games.hpp"
#include "selfint/landscape.hpp"
#include "selfint/markov.hpp"

namespace selfint {

enum class FaceMode {
  kArgminInteraction,  // C(v) = Delta(Argmin_x (Umat v)(x))
  kBestResponse,       // C(v1, v2) = Delta(Argmax U1(., v2)) x Delta(Argmax U2(v1, .))
  kConstantSet,        // C(v) = {target}
};

// Set-valued map v -> C(v) whose values are faces of a simplex (or of a
// product of two simplices for kBestResponse). Selections are single-valued:
// the base measure conditioned on the support set.
class FaceValuedMap {
 public:
  static FaceValuedMap argmin_interaction(Matrix interaction, ProbVector base,
                                          double tau_tie = kTieTolerance);
  static FaceValuedMap best_response(TwoPlayerGame game, ProbVector base1, ProbVector base2,
                                     double tau_tie = kTieTolerance);
  static FaceValuedMap constant_set(ProbVector target);

  FaceMode mode() const { return mode_; }
  Index dimension() const;
  // Blocks of the point v: one simplex, or (Delta(E1), Delta(E2)).
  std::vector<Index> block_sizes() const;
  // Support set per block; for kConstantSet, the support of the target.
  std::vector<std::vector<Index>> supports(const Vector& v) const;
  const Matrix& interaction() const;

 private:
  friend Vector canonical_selection(const FaceValuedMap&, const Vector&);
  friend double fixed_point_residual(const FaceValuedMap&, const Vector&);

  FaceMode mode_ = FaceMode::kConstantSet;
  Matrix interaction_;
  std::optional<TwoPlayerGame> game_;
  std::vector<ProbVector> bases_;
  double tau_ = kTieTolerance;
};

// pi0 conditioned on S(v) (blockwise); the target itself for kConstantSet.
Vector canonical_selection(const FaceValuedMap& c, const Vector& v);

struct InclusionSolution {
  double h = 0.0;
  std::vector<double> times;
  std::vector<Vector> points;      // v(t_k)
  std::vector<Vector> selections;  // c_k in C(v(t_k)); one fewer than points
};

// Explicit Euler for dv/dt in -v + C(v): v_{k+1} = (1 - h) v_k + h c_k.
// Requires 0 < h <= 0.1 and T > 0; takes ceil(T / h) steps.
InclusionSolution integrate(const FaceValuedMap& c, const Vector& v0, double h, double horizon);

// Euclidean distance from v to C(v) (exact projection onto the face).
double fixed_point_residual(const FaceValuedMap& c, const Vector& v);

// Euclidean projection onto the probability simplex.
Vector project_to_simplex(const Vector& v);

// H(v) = (1/2) sum_{x,y} U(x, y) v(x) v(y). Rejects non-symmetric U.
double lyapunov_H(const Matrix& interaction, const Vector& v);

struct LyapunovVerdict {
  bool nonincreasing = true;
  double tolerance = 0.0;      // 10 h^2 max|U|
  double worst_increase = 0.0; // max_k H(v_{k+1}) - H(v_k)
  std::optional<std::size_t> offending_step;
};

LyapunovVerdict lyapunov_check(const InclusionSolution& solution, const Matrix& interaction);

struct CriticalSet {
  std::vector<Vector> points;
  std::vector<double> values;  // H at each point
  bool degenerate_constant = false;
  std::size_t skipped_faces = 0;  // singular face systems
};

// Points with (U v)(x) constant on their support and v in the relative
// interior of that face, one face at a time. |E| <= 8.
CriticalSet critical_set_quadratic(const Matrix& interaction);

// Invariant measure of the linear-reinforcement kernel at eps = 0.
Vector linear_vrrw_target(const Matrix& interaction, const Vector& v);
// || -v + pi(v) || for the linear-reinforcement mean field.
double linear_vrrw_residual(const Matrix& interaction, const Vector& v);

// max over the tail points of the distance to the target set. Needs at least
// 10 tail points.
double limit_set_distance(const std::vector<Vector>& tail,
                          const std::function<double(const Vector&)>& distance_to_target);

// Distance helpers for targets given by samples.
double distance_to_points(const std::vector<Vector>& points, const Vector& v);
double distance_to_hull(const std::vector<Vector>& points, const Vector& v);

// CSV columns: t, v0.., H, residual. H is written only for a symmetric
// interaction (argmin mode); otherwise the column holds "nan".
void write_solution_csv(std::ostream& out, const FaceValuedMap& c, const InclusionSolution& s);

}  // namespace selfint
