#pragma once

// Shared generators and brute-force oracles for the unit tests. Nothing here
// calls into the library's algorithms; the oracles are deliberately naive.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "selfint/markov.hpp"

namespace testing {

using selfint::Index;
using selfint::Matrix;
using selfint::Vector;

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Matrix normalize_rows(Matrix m) {
  for (Index r = 0; r < m.rows(); ++r) m.row(r) /= m.row(r).sum();
  return m;
}

// Every entry positive.
inline Matrix random_positive(std::mt19937_64& rng, Index n) {
  Matrix m(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = uniform(rng, 0.05, 1.0);
  return normalize_rows(m);
}

// Random sparse pattern; each row keeps at least one entry.
inline Matrix random_sparse(std::mt19937_64& rng, Index n, double density) {
  Matrix m = Matrix::Zero(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c)
      if (uniform(rng) < density) m(r, c) = uniform(rng, 0.05, 1.0);
    if (m.row(r).sum() == 0.0) m(r, uniform_int(rng, 0, static_cast<int>(n) - 1)) = 1.0;
  }
  return normalize_rows(m);
}

// Reversible w.r.t. the returned measure: symmetric conductances c(x, y),
// M(x, y) = c(x, y) / sum_z c(x, z), pi proportional to the row sums.
struct ReversibleChain {
  Matrix m;
  Vector pi;
};

inline ReversibleChain random_reversible(std::mt19937_64& rng, Index n, double density = 1.0) {
  Matrix c = Matrix::Zero(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = x; y < n; ++y)
      if (x == y || uniform(rng) < density) c(x, y) = c(y, x) = uniform(rng, 0.1, 1.0);
  // Path edges keep the graph connected.
  for (Index x = 0; x + 1 < n; ++x)
    if (c(x, x + 1) == 0.0) c(x, x + 1) = c(x + 1, x) = uniform(rng, 0.1, 1.0);
  const Vector deg = c.rowwise().sum();
  Matrix m = c;
  for (Index x = 0; x < n; ++x) m.row(x) /= deg[x];
  return {m, deg / deg.sum()};
}

// reach(x, y): y is reachable from x in some number of steps >= 0, computed
// from positivity of (I + A)^n.
inline std::vector<std::vector<bool>> reachability(const Matrix& m) {
  const Index n = m.rows();
  Matrix a = Matrix::Identity(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      if (m(r, c) > 0.0) a(r, c) = 1.0;
  Matrix p = Matrix::Identity(n, n);
  for (Index k = 0; k < n; ++k) {
    p = p * a;
    p = (p.array() > 0.0).cast<double>();
  }
  std::vector<std::vector<bool>> out(n, std::vector<bool>(n));
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) out[r][c] = p(r, c) > 0.0;
  return out;
}

// Highest potential along the best simple path, by exhaustive DFS.
inline double brute_elevation(const Matrix& m0, const Vector& u, Index x, Index y) {
  const Index n = u.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> seen(n, false);
  std::function<void(Index, double)> dfs = [&](Index at, double top) {
    if (at == y) {
      best = std::min(best, top);
      return;
    }
    seen[at] = true;
    for (Index z = 0; z < n; ++z)
      if (z != at && !seen[z] && m0(at, z) > 0.0) dfs(z, std::max(top, u[z]));
    seen[at] = false;
  };
  dfs(x, u[x]);
  return best;
}

inline double brute_barrier(const Matrix& m0, const Vector& u) {
  double out = -std::numeric_limits<double>::infinity();
  const double umin = u.minCoeff();
  for (Index x = 0; x < u.size(); ++x)
    for (Index y = 0; y < u.size(); ++y)
      out = std::max(out, brute_elevation(m0, u, x, y) - u[x] - u[y] + umin);
  return out;
}

// Nearest-neighbour path on n states with lazy ends: M(x, x +- 1) = 1/2.
inline Matrix path_exploration(Index n) {
  Matrix m = Matrix::Zero(n, n);
  for (Index x = 0; x < n; ++x) {
    if (x > 0) m(x, x - 1) = 0.5;
    if (x + 1 < n) m(x, x + 1) = 0.5;
    m(x, x) = 1.0 - m.row(x).sum();
  }
  return m;
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.begin()->size());
  Matrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

}  // namespace testing
