#include "selfint/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "selfint/errors.hpp"

namespace selfint {
namespace {

constexpr double kInvarianceTol = 1e-8;

void require_invariant(const MarkovMatrix& m, const ProbVector& pi) {
  if (pi.size() != m.size()) throw DimensionError("measure and matrix sizes differ");
  const Vector drift = m.matrix().transpose() * pi.values() - pi.values();
  if (sup_norm(drift) > kInvarianceTol) throw ValidationError("pi is not invariant for M");
}

// pi-weighted symmetric part: A(x, y) = (pi(x) M(x, y) + pi(y) M(y, x)) / 2.
Matrix symmetric_flow(const MarkovMatrix& m, const ProbVector& pi) {
  const Matrix k = pi.values().asDiagonal() * m.matrix();
  return 0.5 * (k + k.transpose());
}

// D^{-1/2} (D - A) D^{-1/2}, the l2(pi) form of I - (M + M*)/2.
Matrix symmetrized_generator(const MarkovMatrix& m, const ProbVector& pi) {
  const Vector inv_sqrt = pi.values().cwiseSqrt().cwiseInverse();
  const Matrix a = symmetric_flow(m, pi);
  Matrix s = Matrix::Identity(m.size(), m.size()) -
             inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
  return 0.5 * (s + s.transpose());
}

// Cyclic Jacobi for a small dense symmetric matrix stored row-major.
template <class Real>
std::vector<Real> jacobi_eigenvalues(std::vector<Real> a, std::size_t n) {
  using std::abs;
  using std::sqrt;
  const Real eps = std::numeric_limits<Real>::epsilon();
  auto at = [&](std::size_t i, std::size_t j) -> Real& { return a[i * n + j]; };
  Real frob = 0;
  for (const Real& v : a) frob += v * v;
  for (int sweep = 0; sweep < 200; ++sweep) {
    Real off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    if (off <= eps * eps * frob) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (at(p, q) == 0) continue;
        const Real theta = (at(q, q) - at(p, p)) / (2 * at(p, q));
        const Real t = (theta >= 0 ? Real(1) : Real(-1)) / (abs(theta) + sqrt(theta * theta + 1));
        const Real c = 1 / sqrt(t * t + 1);
        const Real s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const Real kp = at(k, p), kq = at(k, q);
          at(k, p) = c * kp - s * kq;
          at(k, q) = s * kp + c * kq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Real pk = at(p, k), qk = at(q, k);
          at(p, k) = c * pk - s * qk;
          at(q, k) = s * pk + c * qk;
        }
      }
    }
  }
  std::vector<Real> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double log_sobolev_factor(double pi_star) {
  // (1 - 2p) / log((1 - p) / p), with its limit 1/2 at p = 1/2.
  if (std::abs(1.0 - 2.0 * pi_star) < 1e-8) return 0.5;
  return (1.0 - 2.0 * pi_star) / std::log((1.0 - pi_star) / pi_star);
}

double log_plus(double t) { return t > 1.0 ? std::log(t) : 0.0; }

struct RatioEval {
  double ratio;
  Vector grad;  // gradient with respect to g, f = exp(g)
};

// E(f) / L(f) with f = exp(g); std::nullopt when L(f) is numerically zero.
std::optional<RatioEval> ls_ratio(const Vector& g, const Matrix& d_minus_a, const ProbVector& pi) {
  const Vector f = (g.array() - g.maxCoeff()).exp().matrix();
  const Vector ef = d_minus_a * f;
  const double e = f.dot(ef);
  const double l = entropy(f, pi);
  const double pf2 = pi.values().dot(f.cwiseProduct(f));
  if (!(l > 1e-13 * pf2)) return std::nullopt;
  Vector grad_l(f.size());
  for (Index x = 0; x < f.size(); ++x)
    grad_l[x] = f[x] > 0.0 ? 2.0 * pi[x] * f[x] * std::log(f[x] * f[x] / pf2) : 0.0;
  const Vector grad_e = 2.0 * ef;
  Vector grad_f = (grad_e * l - e * grad_l) / (l * l);
  return RatioEval{e / l, grad_f.cwiseProduct(f)};
}

struct DescentResult {
  double ratio;
  bool converged;
};

DescentResult descend(Vector g, int iters, const Matrix& d_minus_a, const ProbVector& pi) {
  auto cur = ls_ratio(g, d_minus_a, pi);
  if (!cur) return {std::numeric_limits<double>::infinity(), false};
  double step = 1.0;
  for (int it = 0; it < iters; ++it) {
    const double gnorm2 = cur->grad.squaredNorm();
    if (std::sqrt(gnorm2) <= 1e-10 * std::max(1.0, cur->ratio)) return {cur->ratio, true};
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vector trial = g - step * cur->grad;
      auto next = ls_ratio(trial, d_minus_a, pi);
      if (next && next->ratio <= cur->ratio - 1e-4 * step * gnorm2) {
        const double gain = cur->ratio - next->ratio;
        g = std::move(trial);
        cur = std::move(next);
        step *= 2.0;
        accepted = true;
        if (gain <= 1e-15 * std::max(1.0, cur->ratio)) return {cur->ratio, true};
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {cur->ratio, true};  // no descent direction left at this resolution
  }
  return {cur->ratio, false};
}

using Precise = boost::multiprecision::cpp_bin_float_100;

}  // namespace

DirichletData dirichlet_data(const MarkovMatrix& m) {
  if (!is_irreducible(m)) throw DecomposableError("Dirichlet data need an irreducible chain");
  ProbVector pi = invariant_measure(m);
  const double pi_star = pi.values().minCoeff();
  return DirichletData{m, std::move(pi), pi_star};
}

double variance(const Vector& f, const ProbVector& pi) {
  if (f.size() != pi.size()) throw DimensionError("function and measure sizes differ");
  const double mean = pi.values().dot(f);
  return pi.values().dot(f.cwiseProduct(f)) - mean * mean;
}

double entropy(const Vector& f, const ProbVector& pi) {
  if (f.size() != pi.size()) throw DimensionError("function and measure sizes differ");
  const double pf2 = pi.values().dot(f.cwiseProduct(f));
  if (pf2 == 0.0) return 0.0;
  double out = 0.0;
  for (Index x = 0; x < f.size(); ++x) {
    const double f2 = f[x] * f[x];
    if (f2 > 0.0) out += f2 * std::log(f2 / pf2) * pi[x];
  }
  return out;
}

double energy(const Vector& f, const MarkovMatrix& m, const ProbVector& pi) {
  require_invariant(m, pi);
  if (f.size() != m.size()) throw DimensionError("function and matrix sizes differ");
  double out = 0.0;
  for (Index x = 0; x < m.size(); ++x)
    for (Index y = 0; y < m.size(); ++y) {
      const double d = f[y] - f[x];
      out += d * d * m(x, y) * pi[x];
    }
  return 0.5 * out;
}

double spectral_gap(const MarkovMatrix& m, const ProbVector& pi) {
  if (m.size() < 2) throw ValidationError("spectral gap needs at least two states");
  if (!is_irreducible(m)) throw DecomposableError("spectral gap needs an irreducible chain");
  require_invariant(m, pi);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized_generator(m, pi), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
  return es.eigenvalues()[1];
}

LogSobolevBracket log_sobolev_bracket(double lambda, double pi_star) {
  return {log_sobolev_factor(pi_star) * lambda, 0.5 * lambda};
}

SpectralConstants log_sobolev_search(const MarkovMatrix& m, const ProbVector& pi, int restarts,
                                     int iters, std::uint64_t seed) {
  SpectralConstants out;
  out.lambda = spectral_gap(m, pi);
  const double pi_star = pi.values().minCoeff();
  const auto bracket = log_sobolev_bracket(out.lambda, pi_star);
  out.alpha_lower = bracket.lower;
  out.alpha_upper = bracket.upper;

  const Matrix d_minus_a = Matrix(pi.values().asDiagonal()) - symmetric_flow(m, pi);
  const Index n = m.size();

  // First start: a small perturbation of the constants along the gap
  // eigenfunction, where E / L tends to lambda / 2.
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized_generator(m, pi));
  Vector phi = pi.values().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().col(1);
  phi /= sup_norm(phi);

  double best = std::numeric_limits<double>::infinity();
  bool best_converged = false;
  auto consider = [&](const DescentResult& r) {
    if (r.ratio < best) {
      best = r.ratio;
      best_converged = r.converged;
    }
  };
  consider(descend((Vector::Ones(n) + 1e-3 * phi).array().log().matrix(), iters, d_minus_a, pi));

  std::mt19937_64 rng(seed);
  const double scales[] = {0.5, 1.0, 2.0, 4.0};
  for (int r = 0; r < restarts; ++r) {
    std::normal_distribution<double> normal(0.0, scales[r % 4]);
    Vector g(n);
    for (Index x = 0; x < n; ++x) g[x] = normal(rng);
    consider(descend(g, iters, d_minus_a, pi));
  }

  const double lo = out.alpha_lower * (1.0 - 1e-6);
  const double hi = out.alpha_upper * (1.0 + 1e-6);
  out.converged = best_converged;
  if (!std::isfinite(best) || best > hi) {
    out.alpha_numeric = hi;
    out.clamped = true;
  } else if (best < lo) {
    out.alpha_numeric = lo;
    out.clamped = true;
  } else {
    out.alpha_numeric = best;
  }
  return out;
}

Matrix q_bound_spectral(const MarkovMatrix& m) {
  const DirichletData d = dirichlet_data(m);
  const double lambda = spectral_gap(m, d.pi);
  const Index n = m.size();
  Matrix b(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) b(x, y) = std::sqrt(d.pi[y] / d.pi[x]) / lambda;
  return b;
}

double q_bound_uniform(double lambda, double pi_star) {
  const double factor = 1.0 / log_sobolev_factor(pi_star);
  return (log_plus(std::log(1.0 / pi_star)) * factor + std::numbers::e) / lambda;
}

double q_bound_uniform(const MarkovMatrix& m) {
  const DirichletData d = dirichlet_data(m);
  return q_bound_uniform(spectral_gap(m, d.pi), d.pi_star);
}

std::optional<AnnealingSpectrum> annealing_spectrum(const MarkovMatrix& m0, const Vector& u,
                                                    double beta, AcceptanceShape shape) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  using boost::multiprecision::sqrt;
  const Index n = m0.size();
  if (u.size() != n) throw DimensionError("potential and exploration sizes differ");
  if (n < 2) throw ValidationError("spectral gap needs at least two states");
  if (!is_irreducible(m0)) throw DecomposableError("exploration matrix must be irreducible");
  const ProbVector pi0 = invariant_measure(m0);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      if (std::abs(pi0[x] * m0(x, y) - pi0[y] * m0(y, x)) > 1e-12)
        throw ValidationError("exploration matrix is not reversible");

  const Precise b(beta);
  const double umin = u.minCoeff();
  std::vector<Precise> logw(n), pi(n);
  for (Index x = 0; x < n; ++x) logw[x] = log(Precise(pi0[x])) - b * Precise(u[x] - umin);
  const Precise shift = *std::max_element(logw.begin(), logw.end());
  Precise total = 0;
  for (Index x = 0; x < n; ++x) total += (pi[x] = exp(logw[x] - shift));
  for (auto& p : pi) p /= total;

  auto accept = [&](double w) -> Precise {
    const Precise arg = b * Precise(w);
    if (shape == AcceptanceShape::kMetropolis) return arg <= 0 ? Precise(1) : exp(-arg);
    return 1 / (1 + exp(arg));
  };
  std::vector<Precise> kernel(n * n, Precise(0));
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      if (x != y && m0(x, y) > 0.0) kernel[x * n + y] = Precise(m0(x, y)) * accept(u[y] - u[x]);

  std::vector<Precise> s(n * n, Precise(0));
  for (Index x = 0; x < n; ++x) {
    Precise out = 0;
    for (Index y = 0; y < n; ++y) {
      if (y == x) continue;
      out += kernel[x * n + y];
      s[x * n + y] = -(pi[x] * kernel[x * n + y] + pi[y] * kernel[y * n + x]) /
                     (2 * sqrt(pi[x] * pi[y]));
    }
    s[x * n + x] = out;
  }
  const auto ev = jacobi_eigenvalues(std::move(s), static_cast<std::size_t>(n));
  const Precise lambda = ev[1];
  if (!(lambda > Precise("1e-80"))) return std::nullopt;
  const Precise pmin = *std::min_element(pi.begin(), pi.end());
  return AnnealingSpectrum{beta, static_cast<double>(log(lambda)), static_cast<double>(log(pmin))};
}

SlopeFit holley_stroock_slope(const MarkovMatrix& m0, const Vector& u,
                              const std::vector<double>& beta_grid, AcceptanceShape shape) {
  if (beta_grid.size() < 2) throw ValidationError("beta grid needs at least two points");
  if (!std::is_sorted(beta_grid.begin(), beta_grid.end()))
    throw ValidationError("beta grid must be increasing");
  SlopeFit fit;
  for (double beta : beta_grid) {
    auto point = annealing_spectrum(m0, u, beta, shape);
    if (point)
      fit.points.push_back(*point);
    else
      fit.dropped_betas.push_back(beta);
  }
  if (fit.points.size() < 2) throw NumericalError("fewer than two resolvable grid points");
  const std::size_t first = fit.points.size() / 2;
  fit.fitted = fit.points.size() - first;
  if (fit.fitted < 2) throw NumericalError("fewer than two points in the top half of the grid");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < fit.points.size(); ++i) {
    const double x = fit.points[i].beta, y = fit.points[i].log_lambda;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(fit.fitted);
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw NumericalError("degenerate beta grid");
  fit.slope = (k * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / k;
  return fit;
}

}  // namespace selfint
