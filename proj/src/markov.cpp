#include "selfint/markov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "selfint/errors.hpp"

namespace selfint {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("state space must have at least one state");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw ValidationError("state labels must be distinct");
}

StateSpace StateSpace::numbered(Index size) {
  std::vector<std::string> labels;
  for (Index i = 0; i < size; ++i) labels.push_back(std::to_string(i));
  return StateSpace(std::move(labels));
}

Index StateSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw ValidationError("unknown state label '" + label + "'");
  return it - labels_.begin();
}

ProbVector::ProbVector(Vector weights, double tol) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ValidationError("probability vector is empty");
  for (Index i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      std::ostringstream os;
      os << "probability vector entry " << i << " is " << weights_[i];
      throw ValidationError(os.str());
    }
  }
  if (std::abs(weights_.sum() - 1.0) > tol) {
    std::ostringstream os;
    os << "probability vector sums to " << weights_.sum();
    throw ValidationError(os.str());
  }
}

ProbVector ProbVector::point_mass(Index size, Index at) {
  if (at < 0 || at >= size) throw DimensionError("point mass outside the state space");
  Vector v = Vector::Zero(size);
  v[at] = 1.0;
  return ProbVector(std::move(v));
}

ProbVector ProbVector::uniform(Index size) {
  return ProbVector(Vector::Constant(size, 1.0 / static_cast<double>(size)));
}

MarkovMatrix::MarkovMatrix(Matrix entries, double tol) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
    throw DimensionError("Markov matrix must be square and nonempty");
  for (Index x = 0; x < entries_.rows(); ++x) {
    for (Index y = 0; y < entries_.cols(); ++y) {
      if (!std::isfinite(entries_(x, y)) || entries_(x, y) < 0.0) {
        std::ostringstream os;
        os << "Markov matrix entry (" << x << "," << y << ") is " << entries_(x, y);
        throw ValidationError(os.str());
      }
    }
    const double s = entries_.row(x).sum();
    if (std::abs(s - 1.0) > tol) {
      std::ostringstream os;
      os << "Markov matrix row " << x << " sums to " << s;
      throw ValidationError(os.str());
    }
  }
}

MarkovMatrix MarkovMatrix::identity(Index size) {
  return MarkovMatrix(Matrix::Identity(size, size));
}

MarkovMatrix MarkovMatrix::rank_one(const ProbVector& pi) {
  return MarkovMatrix(Vector::Ones(pi.size()) * pi.values().transpose());
}

Index ClassDecomposition::recurrent_count() const {
  return std::count(recurrent.begin(), recurrent.end(), true);
}

Vector apply_to_function(const MarkovMatrix& m, const Vector& f) {
  if (f.size() != m.size()) throw DimensionError("function and matrix sizes differ");
  return m.matrix() * f;
}

ProbVector apply_to_measure(const ProbVector& mu, const MarkovMatrix& m) {
  if (mu.size() != m.size()) throw DimensionError("measure and matrix sizes differ");
  Vector out = m.matrix().transpose() * mu.values();
  return ProbVector(std::move(out), 1e-10);
}

ClassDecomposition class_decomposition(const MarkovMatrix& m) {
  // Tarjan's strongly connected components on the positive-entry digraph.
  const Index n = m.size();
  std::vector<Index> order(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<Index> stack;
  Index counter = 0, ncomp = 0;

  std::function<void(Index)> visit = [&](Index v) {
    order[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (Index w = 0; w < n; ++w) {
      if (!(m(v, w) > 0.0)) continue;
      if (order[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], order[w]);
      }
    }
    if (low[v] == order[v]) {
      Index w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  };
  for (Index v = 0; v < n; ++v)
    if (order[v] < 0) visit(v);

  std::vector<std::vector<Index>> raw(ncomp);
  for (Index v = 0; v < n; ++v) raw[comp[v]].push_back(v);
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  ClassDecomposition out;
  out.classes = std::move(raw);
  for (const auto& cls : out.classes) {
    bool closed = true;
    for (Index x : cls) {
      for (Index y = 0; y < n && closed; ++y) {
        if (m(x, y) > 0.0 && comp[y] != comp[x]) closed = false;
      }
    }
    out.recurrent.push_back(closed);
  }
  return out;
}

bool is_indecomposable(const MarkovMatrix& m) {
  return class_decomposition(m).recurrent_count() == 1;
}

bool is_irreducible(const MarkovMatrix& m) {
  return class_decomposition(m).classes.size() == 1;
}

ProbVector invariant_measure(const MarkovMatrix& m) {
  if (!is_indecomposable(m))
    throw DecomposableError("invariant measure is not unique: more than one recurrent class");
  const Index n = m.size();
  // (I - M^T) pi = 0 with the last equation replaced by sum(pi) = 1.
  Matrix a = Matrix::Identity(n, n) - m.matrix().transpose();
  a.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw NumericalError("invariant measure system is singular");
  Vector pi = lu.solve(rhs);
  // Transient states carry exactly zero mass; remove solver round-off.
  for (Index i = 0; i < n; ++i) {
    if (pi[i] < 0.0) {
      if (pi[i] < -1e-10) throw NumericalError("invariant measure has a negative entry");
      pi[i] = 0.0;
    }
  }
  pi /= pi.sum();
  const double residual = sup_norm(Vector(m.matrix().transpose() * pi - pi));
  if (residual > 1e-10) throw NumericalError("invariant measure residual too large");
  return ProbVector(std::move(pi));
}

PseudoInverse pseudo_inverse(const MarkovMatrix& m) {
  return pseudo_inverse(m, invariant_measure(m));
}

PseudoInverse pseudo_inverse(const MarkovMatrix& m, const ProbVector& pi) {
  if (pi.size() != m.size()) throw DimensionError("invariant measure and matrix sizes differ");
  const Index n = m.size();
  const Matrix projector = Vector::Ones(n) * pi.values().transpose();
  Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) - m.matrix() + projector);
  if (!lu.isInvertible()) throw NumericalError("I - M + Pi is singular");
  Matrix q = lu.inverse() - projector;
  if (!q.allFinite()) throw NumericalError("pseudo-inverse is not finite");
  return PseudoInverse(std::move(q), pi);
}

double sup_norm(const Vector& f) {
  if (f.size() == 0) throw ValidationError("sup norm of an empty vector");
  return f.cwiseAbs().maxCoeff();
}

double sup_norm(const Matrix& n) {
  if (n.size() == 0) throw ValidationError("sup norm of an empty matrix");
  return n.cwiseAbs().maxCoeff();
}

}  // namespace selfint
