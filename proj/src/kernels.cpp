#include "selfint/kernels.hpp"

#include <cmath>
#include <sstream>

#include "selfint/errors.hpp"

namespace selfint {

AcceptanceShape parse_acceptance(const std::string& name) {
  if (name == "metropolis") return AcceptanceShape::kMetropolis;
  if (name == "logistic") return AcceptanceShape::kLogistic;
  throw ValidationError("unknown acceptance shape '" + name + "'");
}

std::string to_string(AcceptanceShape shape) {
  return shape == AcceptanceShape::kMetropolis ? "metropolis" : "logistic";
}

double accept_probability(AcceptanceShape shape, double beta, double w) {
  const double x = beta * w;  // psi(exp(-x))
  switch (shape) {
    case AcceptanceShape::kMetropolis:
      return x <= 0.0 ? 1.0 : std::exp(-x);
    case AcceptanceShape::kLogistic:
      // exp(-x) / (1 + exp(-x)) = 1 / (1 + exp(x))
      if (x >= 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
      }
      return 1.0 / (1.0 + std::exp(x));
  }
  return 0.0;
}

double CoolingSchedule::operator()(double t) const {
  return beta0 + rate * std::log(std::max(t, 1.0));
}

double schedule_eval(const CoolingSchedule& s, double t) { return s(t); }

double admissible_A(double barrier) {
  if (barrier < 0.0) throw ValidationError("energy barrier must be nonnegative");
  if (barrier == 0.0) return std::numeric_limits<double>::infinity();
  return kScheduleSafety / (2.0 * barrier);
}

void metropolis_row(const MarkovMatrix& m0, Index x, const Vector& w_from_x, double beta,
                    AcceptanceShape shape, Vector& row) {
  const Index n = m0.size();
  row.resize(n);
  double off = 0.0;
  for (Index y = 0; y < n; ++y) {
    if (y == x) continue;
    const double p = m0(x, y) == 0.0 ? 0.0 : m0(x, y) * accept_probability(shape, beta, w_from_x[y]);
    row[y] = p;
    off += p;
  }
  if (off > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "off-diagonal mass " << off << " exceeds one in row " << x;
    throw ValidationError(os.str());
  }
  row[x] = std::max(0.0, 1.0 - off);
}

MarkovMatrix metropolis_kernel(const MarkovMatrix& m0, const Matrix& w, double beta,
                               AcceptanceShape shape) {
  const Index n = m0.size();
  if (w.rows() != n || w.cols() != n) throw DimensionError("pair potential has the wrong shape");
  if (beta < 0.0) throw ValidationError("inverse temperature must be nonnegative");
  Matrix out(n, n);
  Vector row;
  for (Index x = 0; x < n; ++x) {
    metropolis_row(m0, x, w.row(x).transpose(), beta, shape, row);
    out.row(x) = row.transpose();
  }
  return MarkovMatrix(std::move(out));
}

Matrix potential_differences(const Vector& u) {
  const Index n = u.size();
  Matrix w(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) w(x, y) = u[y] - u[x];
  return w;
}

ProbVector gibbs_measure(const ProbVector& pi0, const Vector& u, double beta) {
  if (pi0.size() != u.size()) throw DimensionError("reference measure and potential sizes differ");
  const Index n = u.size();
  Vector logw(n);
  for (Index x = 0; x < n; ++x) {
    if (!(pi0[x] > 0.0)) throw ValidationError("reference measure must be strictly positive");
    logw[x] = std::log(pi0[x]) - beta * u[x];
  }
  const double shift = logw.maxCoeff();
  Vector w = (logw.array() - shift).exp().matrix();
  w /= w.sum();
  return ProbVector(std::move(w));
}

void vrrw_linear_row(const Matrix& interaction, double eps, const Vector& v, Index x,
                     Vector& row) {
  const Index n = interaction.rows();
  row.resize(n);
  double total = 0.0;
  for (Index y = 0; y < n; ++y) {
    row[y] = interaction(x, y) * (eps + v[y]);
    total += row[y];
  }
  if (!(total > 0.0)) {
    std::ostringstream os;
    os << "zero normalizer in row " << x << " of the linear reinforcement kernel";
    throw ValidationError(os.str());
  }
  row /= total;
}

MarkovMatrix vrrw_linear_kernel(const Matrix& interaction, double eps, const Vector& v) {
  const Index n = interaction.rows();
  if (interaction.cols() != n || v.size() != n) throw DimensionError("interaction/measure sizes differ");
  if (eps < 0.0) throw ValidationError("eps must be nonnegative");
  if ((interaction.array() < 0.0).any()) throw ValidationError("interaction must be nonnegative");
  Matrix out(n, n);
  Vector row;
  for (Index x = 0; x < n; ++x) {
    vrrw_linear_row(interaction, eps, v, x, row);
    out.row(x) = row.transpose();
  }
  return MarkovMatrix(std::move(out));
}

MarkovMatrix vrrw_exponential_kernel(const MarkovMatrix& m0, const Matrix& interaction,
                                     double beta, const Vector& v, AcceptanceShape shape) {
  const Index n = m0.size();
  if (interaction.rows() != n || interaction.cols() != n || v.size() != n)
    throw DimensionError("interaction/measure sizes differ");
  const Vector uv = interaction * v;
  return metropolis_kernel(m0, potential_differences(uv), beta, shape);
}

MarkovMatrix fictitious_kernel(const MarkovMatrix& m0, const Matrix& payoff, double beta,
                               const Vector& opponent_v, AcceptanceShape shape) {
  if (payoff.rows() != m0.size() || payoff.cols() != opponent_v.size())
    throw DimensionError("payoff/measure sizes differ");
  const Vector expected = payoff * opponent_v;
  // W(x, y) = U(x, v) - U(y, v) = -(difference toward y).
  return metropolis_kernel(m0, -potential_differences(expected), beta, shape);
}

MarkovMatrix product_kernel(const MarkovMatrix& m1, const MarkovMatrix& m2) {
  const Index n1 = m1.size(), n2 = m2.size();
  Matrix out(n1 * n2, n1 * n2);
  for (Index x = 0; x < n1; ++x)
    for (Index xp = 0; xp < n1; ++xp)
      out.block(x * n2, xp * n2, n2, n2) = m1(x, xp) * m2.matrix();
  return MarkovMatrix(std::move(out), 1e-10);
}

}  // namespace selfint
