#include "selfint/inclusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "selfint/errors.hpp"
#include "selfint/kernels.hpp"

namespace selfint {
namespace {

bool is_symmetric(const Matrix& u) {
  return u.rows() == u.cols() && ((u - u.transpose()).cwiseAbs().array() <= 1e-12).all();
}

Vector conditioned(const ProbVector& base, const std::vector<Index>& support) {
  Vector out = Vector::Zero(base.size());
  for (Index x : support) out[x] = base[x];
  const double total = out.sum();
  if (!(total > 0.0)) throw ValidationError("base measure puts no mass on the support set");
  return out / total;
}

// Squared distance from v to the face Delta(support) of its simplex.
double face_distance2(const Vector& v, const std::vector<Index>& support) {
  Vector inside(static_cast<Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) inside[i] = v[support[i]];
  const Vector proj = project_to_simplex(inside);
  Vector nearest = Vector::Zero(v.size());
  for (std::size_t i = 0; i < support.size(); ++i) nearest[support[i]] = proj[i];
  return (v - nearest).squaredNorm();
}

}  // namespace

FaceValuedMap FaceValuedMap::argmin_interaction(Matrix interaction, ProbVector base,
                                                double tau_tie) {
  if (interaction.rows() != interaction.cols() || interaction.rows() != base.size())
    throw DimensionError("interaction and base measure sizes differ");
  FaceValuedMap c;
  c.mode_ = FaceMode::kArgminInteraction;
  c.interaction_ = std::move(interaction);
  c.bases_.push_back(std::move(base));
  c.tau_ = tau_tie;
  return c;
}

FaceValuedMap FaceValuedMap::best_response(TwoPlayerGame game, ProbVector base1,
                                           ProbVector base2, double tau_tie) {
  if (base1.size() != game.actions(1) || base2.size() != game.actions(2))
    throw DimensionError("base measures do not match the game");
  FaceValuedMap c;
  c.mode_ = FaceMode::kBestResponse;
  c.game_ = std::move(game);
  c.bases_.push_back(std::move(base1));
  c.bases_.push_back(std::move(base2));
  c.tau_ = tau_tie;
  return c;
}

FaceValuedMap FaceValuedMap::constant_set(ProbVector target) {
  FaceValuedMap c;
  c.mode_ = FaceMode::kConstantSet;
  c.bases_.push_back(std::move(target));
  return c;
}

Index FaceValuedMap::dimension() const {
  Index d = 0;
  for (Index b : block_sizes()) d += b;
  return d;
}

std::vector<Index> FaceValuedMap::block_sizes() const {
  std::vector<Index> out;
  for (const auto& b : bases_) out.push_back(b.size());
  return out;
}

const Matrix& FaceValuedMap::interaction() const { return interaction_; }

std::vector<std::vector<Index>> FaceValuedMap::supports(const Vector& v) const {
  if (v.size() != dimension()) throw DimensionError("point has the wrong dimension");
  switch (mode_) {
    case FaceMode::kArgminInteraction:
      return {argmin_set(interaction_ * v, tau_)};
    case FaceMode::kBestResponse: {
      const Index n1 = bases_[0].size(), n2 = bases_[1].size();
      const Vector v1 = v.head(n1), v2 = v.tail(n2);
      return {best_response_support(*game_, 1, v2, tau_),
              best_response_support(*game_, 2, v1, tau_)};
    }
    case FaceMode::kConstantSet: {
      std::vector<Index> s;
      for (Index x = 0; x < bases_[0].size(); ++x)
        if (bases_[0][x] > 0.0) s.push_back(x);
      return {s};
    }
  }
  return {};
}

Vector canonical_selection(const FaceValuedMap& c, const Vector& v) {
  if (c.mode_ == FaceMode::kConstantSet) {
    if (v.size() != c.dimension()) throw DimensionError("point has the wrong dimension");
    return c.bases_[0].values();
  }
  const auto s = c.supports(v);
  Vector out(c.dimension());
  Index offset = 0;
  for (std::size_t b = 0; b < s.size(); ++b) {
    const Vector part = conditioned(c.bases_[b], s[b]);
    out.segment(offset, part.size()) = part;
    offset += part.size();
  }
  return out;
}

InclusionSolution integrate(const FaceValuedMap& c, const Vector& v0, double h, double horizon) {
  if (!(h > 0.0 && h <= 0.1)) throw ValidationError("step must lie in (0, 0.1]");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
  if (v0.size() != c.dimension()) throw DimensionError("initial point has the wrong dimension");
  const long steps = static_cast<long>(std::ceil(horizon / h - 1e-9));
  InclusionSolution sol;
  sol.h = h;
  sol.times.reserve(steps + 1);
  sol.points.reserve(steps + 1);
  sol.selections.reserve(steps);
  Vector v = v0;
  sol.times.push_back(0.0);
  sol.points.push_back(v);
  for (long k = 0; k < steps; ++k) {
    Vector sel = canonical_selection(c, v);
    v = (1.0 - h) * v + h * sel;
    sol.selections.push_back(std::move(sel));
    sol.times.push_back(static_cast<double>(k + 1) * h);
    sol.points.push_back(v);
  }
  return sol;
}

double fixed_point_residual(const FaceValuedMap& c, const Vector& v) {
  if (c.mode_ == FaceMode::kConstantSet) return (v - c.bases_[0].values()).norm();
  const auto s = c.supports(v);
  double d2 = 0.0;
  Index offset = 0;
  for (std::size_t b = 0; b < s.size(); ++b) {
    const Index n = c.bases_[b].size();
    d2 += face_distance2(v.segment(offset, n), s[b]);
    offset += n;
  }
  return std::sqrt(d2);
}

Vector project_to_simplex(const Vector& v) {
  const Index n = v.size();
  if (n == 0) throw ValidationError("cannot project an empty vector");
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (Index i = 0; i < n; ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

double lyapunov_H(const Matrix& interaction, const Vector& v) {
  if (!is_symmetric(interaction)) throw ValidationError("Lyapunov function needs a symmetric interaction");
  if (v.size() != interaction.rows()) throw DimensionError("point and interaction sizes differ");
  return 0.5 * v.dot(interaction * v);
}

LyapunovVerdict lyapunov_check(const InclusionSolution& solution, const Matrix& interaction) {
  LyapunovVerdict out;
  out.tolerance = 10.0 * solution.h * solution.h * interaction.cwiseAbs().maxCoeff();
  out.worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < solution.points.size(); ++k) {
    const double inc = lyapunov_H(interaction, solution.points[k + 1]) -
                       lyapunov_H(interaction, solution.points[k]);
    if (inc > out.worst_increase) out.worst_increase = inc;
    if (inc > out.tolerance && !out.offending_step) {
      out.nonincreasing = false;
      out.offending_step = k;
    }
  }
  return out;
}

CriticalSet critical_set_quadratic(const Matrix& interaction) {
  if (!is_symmetric(interaction)) throw ValidationError("critical set needs a symmetric interaction");
  const Index n = interaction.rows();
  if (n < 1 || n > 8) throw ValidationError("critical set enumeration supports 1..8 states");
  CriticalSet out;
  out.degenerate_constant = (interaction.array() == interaction(0, 0)).all();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<Index> s;
    for (Index x = 0; x < n; ++x)
      if (mask & (1u << x)) s.push_back(x);
    const Index k = static_cast<Index>(s.size());
    Matrix a = Matrix::Zero(k + 1, k + 1);
    for (Index i = 0; i < k; ++i) {
      for (Index j = 0; j < k; ++j) a(i, j) = interaction(s[i], s[j]);
      a(i, k) = -1.0;
    }
    a.row(k).head(k).setOnes();
    Vector rhs = Vector::Zero(k + 1);
    rhs[k] = 1.0;
    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible()) {
      ++out.skipped_faces;
      continue;
    }
    const Vector sol = lu.solve(rhs);
    if ((sol.head(k).array() <= 1e-12).any()) continue;
    Vector v = Vector::Zero(n);
    for (Index i = 0; i < k; ++i) v[s[i]] = sol[i];
    out.values.push_back(lyapunov_H(interaction, v));
    out.points.push_back(std::move(v));
  }
  return out;
}

Vector linear_vrrw_target(const Matrix& interaction, const Vector& v) {
  return invariant_measure(vrrw_linear_kernel(interaction, 0.0, v)).values();
}

double linear_vrrw_residual(const Matrix& interaction, const Vector& v) {
  return (linear_vrrw_target(interaction, v) - v).norm();
}

double limit_set_distance(const std::vector<Vector>& tail,
                          const std::function<double(const Vector&)>& distance_to_target) {
  if (tail.size() < 10) throw ValidationError("limit-set distance needs at least 10 tail points");
  double out = 0.0;
  for (const auto& v : tail) out = std::max(out, distance_to_target(v));
  return out;
}

double distance_to_points(const std::vector<Vector>& points, const Vector& v) {
  if (points.empty()) throw ValidationError("empty target set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points) best = std::min(best, (p - v).norm());
  return best;
}

double distance_to_hull(const std::vector<Vector>& points, const Vector& v) {
  if (points.empty()) throw ValidationError("empty target set");
  const Index k = static_cast<Index>(points.size());
  Matrix p(v.size(), k);
  for (Index i = 0; i < k; ++i) p.col(i) = points[i];
  // Projected gradient on the weights of the convex combination.
  const double lip = std::max(1e-12, (p.transpose() * p).eigenvalues().real().maxCoeff());
  Vector w = Vector::Constant(k, 1.0 / static_cast<double>(k));
  for (int it = 0; it < 20000; ++it) {
    const Vector grad = p.transpose() * (p * w - v);
    const Vector next = project_to_simplex(w - grad / lip);
    const double change = (next - w).norm();
    w = next;
    if (change < 1e-15) break;
  }
  return (p * w - v).norm();
}

void write_solution_csv(std::ostream& out, const FaceValuedMap& c, const InclusionSolution& s) {
  const bool has_h = c.mode() == FaceMode::kArgminInteraction && is_symmetric(c.interaction());
  out << "t";
  for (Index i = 0; i < c.dimension(); ++i) out << ",v" << i;
  out << ",H,residual\n";
  out.precision(17);
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    out << s.times[k];
    for (Index i = 0; i < s.points[k].size(); ++i) out << ',' << s.points[k][i];
    out << ',';
    if (has_h)
      out << lyapunov_H(c.interaction(), s.points[k]);
    else
      out << "nan";
    out << ',' << fixed_point_residual(c, s.points[k]) << '\n';
  }
}

}  // namespace selfint
