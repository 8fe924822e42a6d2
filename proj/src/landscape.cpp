#include "selfint/landscape.hpp"

#include <functional>
#include <limits>
#include <queue>

#include "selfint/errors.hpp"

namespace selfint {

Landscape::Landscape(MarkovMatrix exploration, Vector potential)
    : exploration_(std::move(exploration)), potential_(std::move(potential)) {
  if (potential_.size() != exploration_.size())
    throw DimensionError("potential and exploration matrix sizes differ");
  if (!potential_.allFinite()) throw ValidationError("potential must be finite");
  if (!is_irreducible(exploration_)) throw ValidationError("exploration matrix must be irreducible");
}

Vector elevations_from(const Landscape& l, Index x) {
  const Index n = l.size();
  const Vector& u = l.potential();
  Vector best = Vector::Constant(n, std::numeric_limits<double>::infinity());
  std::vector<bool> done(n, false);
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  best[x] = u[x];
  queue.emplace(u[x], x);
  while (!queue.empty()) {
    auto [height, v] = queue.top();
    queue.pop();
    if (done[v]) continue;
    done[v] = true;
    for (Index w = 0; w < n; ++w) {
      if (w == v || !(l.exploration()(v, w) > 0.0)) continue;
      const double cand = std::max(height, u[w]);
      if (cand < best[w]) {
        best[w] = cand;
        queue.emplace(cand, w);
      }
    }
  }
  return best;
}

double elevation(const Landscape& l, Index x, Index y) {
  if (x < 0 || x >= l.size() || y < 0 || y >= l.size()) throw DimensionError("state out of range");
  return elevations_from(l, x)[y];
}

double energy_barrier(const Landscape& l) {
  const Vector& u = l.potential();
  const double umin = u.minCoeff();
  double out = -std::numeric_limits<double>::infinity();
  for (Index x = 0; x < l.size(); ++x) {
    const Vector elev = elevations_from(l, x);
    for (Index y = 0; y < l.size(); ++y) out = std::max(out, elev[y] - u[x] - u[y] + umin);
  }
  return out;
}

std::vector<Index> argmin_set(const Vector& u, double tau_tie) {
  if (u.size() == 0) return {};
  const double m = u.minCoeff();
  std::vector<Index> out;
  for (Index x = 0; x < u.size(); ++x)
    if (u[x] <= m + tau_tie) out.push_back(x);
  return out;
}

std::vector<Index> argmax_set(const Vector& u, double tau_tie) {
  return argmin_set(-u, tau_tie);
}

double game_barrier(const Matrix& payoff, const MarkovMatrix& m0) {
  if (payoff.rows() != m0.size()) throw DimensionError("payoff rows and exploration size differ");
  double out = 0.0;
  for (Index y = 0; y < payoff.cols(); ++y) {
    const Vector column = payoff.col(y);
    const Vector descended = (column.maxCoeff() - column.array()).matrix();
    out = std::max(out, energy_barrier(Landscape(m0, descended)));
  }
  return out;
}

}  // namespace selfint
