#include "selfint/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "selfint/errors.hpp"
#include "selfint/inclusion.hpp"
#include "selfint/spectral.hpp"
#include "selfint/text_io.hpp"

namespace selfint {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Rule at_most(std::string stat, double hi, std::string text) {
  return {std::move(stat), -kInf, hi, false, std::move(text)};
}
Rule at_least(std::string stat, double lo, std::string text) {
  return {std::move(stat), lo, kInf, false, std::move(text)};
}
Rule within(std::string stat, double lo, double hi, std::string text) {
  return {std::move(stat), lo, hi, false, std::move(text)};
}
Rule report(std::string stat, std::string text) {
  return {std::move(stat), -kInf, kInf, true, std::move(text)};
}

// ---- fixtures and config plumbing

Landscape landscape_of(const ExperimentConfig& cfg) {
  if (auto f = cfg.file("experiment.landscape")) return read_landscape(*f).landscape;
  return path_landscape_fixture();
}

MarkovMatrix chain_of(const ExperimentConfig& cfg, const MarkovMatrix& fallback) {
  if (auto f = cfg.file("experiment.chain")) return read_chain(*f).chain;
  return fallback;
}

Matrix interaction_of(const ExperimentConfig& cfg, const Matrix& fallback) {
  if (auto f = cfg.file("experiment.interaction")) return read_matrix(*f).entries;
  return fallback;
}

TwoPlayerGame game_of(const ExperimentConfig& cfg) {
  if (auto f = cfg.file("experiment.game")) return read_game(*f).game;
  return matching_fixture();
}

AcceptanceShape shape_of(const ExperimentConfig& cfg) {
  return parse_acceptance(cfg.text("kernel.shape", "metropolis"));
}

MarkovMatrix complete_exploration(Index n) {
  return MarkovMatrix(Matrix::Constant(n, n, 1.0 / static_cast<double>(n)));
}

// rate = "admissible" uses admissible_A(barrier); a zero barrier leaves A
// unrestricted, and schedule.unbounded_rate (default 1) is used instead.
CoolingSchedule schedule_of(const ExperimentConfig& cfg, double barrier,
                            const std::string& section = "schedule") {
  CoolingSchedule s;
  s.beta0 = cfg.number(section + ".beta0", 0.0);
  const std::string rate = cfg.text(section + ".rate", "admissible");
  if (rate == "admissible") {
    s.rate = admissible_A(barrier);
    if (std::isinf(s.rate)) s.rate = cfg.number(section + ".unbounded_rate", 1.0);
  } else {
    s.rate = cfg.number(section + ".rate", 0.0);
  }
  if (s.beta0 < 0.0 || s.rate < 0.0) throw ParseError(section + ": beta0 and rate must be >= 0", 0);
  return s;
}

ProcessSpec base_spec(const ExperimentConfig& cfg, KernelSpec kernel, long default_horizon) {
  ProcessSpec spec{std::move(kernel), std::nullopt, ObservationMap::kOccupation, {}, 0, 1, 1, {}, false};
  spec.horizon = cfg.horizon(default_horizon);
  spec.checkpoints = cfg.checkpoints(spec.horizon);
  spec.seed = cfg.seed();
  spec.weights.alpha = cfg.number("weights.alpha", 0.0);
  spec.initial_state = cfg.integer("run.initial_state", 0);
  spec.record_states = false;
  return spec;
}

// The annealing run is shared by the annealing experiment and its
// diagnostics; identical (config, seed) gives identical traces, so it is
// computed once per process.
std::vector<ProcessTrace> cached_replicas(const std::string& key, const ProcessSpec& spec,
                                          int replicas) {
  static std::mutex mutex;
  static std::map<std::string, std::vector<ProcessTrace>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto traces = simulate_replicas(spec, replicas);
  cache.emplace(key, traces);
  return traces;
}

void add_traces(ExperimentResult& r, const std::string& prefix,
                const std::vector<ProcessTrace>& traces) {
  for (std::size_t i = 0; i < traces.size(); ++i)
    r.traces.emplace_back(prefix + "r" + std::to_string(i), traces[i]);
}

std::vector<double> tail(const std::vector<Checkpoint>& cps, double DiagnosticsRow::*field) {
  std::vector<double> out;
  for (std::size_t i = cps.size() / 2; i < cps.size(); ++i) out.push_back(cps[i].diagnostics.*field);
  return out;
}

// Random row-stochastic matrix; each entry is kept with probability
// `density`, and an empty row gets one random entry.
MarkovMatrix random_chain(std::mt19937_64& rng, Index n, double density) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  Matrix m(n, n);
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) m(x, y) = unif(rng) < density ? unif(rng) + 1e-3 : 0.0;
    if (m.row(x).sum() == 0.0) m(x, pick(rng)) = 1.0;
    m.row(x) /= m.row(x).sum();
  }
  return MarkovMatrix(m, 1e-10);
}

// ---- A1

ExperimentResult run_pseudo_inverse(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const long count = cfg.integer("kernel.count", 200);
  const long max_states = cfg.integer("kernel.max_states", 8);
  std::mt19937_64 rng(cfg.seed());
  std::uniform_int_distribution<Index> size(1, max_states);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  long accepted = 0, rejected = 0;
  while (accepted < count) {
    const Index n = size(rng);
    // Sparse draws give transient states and periodic classes as well.
    const MarkovMatrix m = random_chain(rng, n, 0.15 + 0.85 * unif(rng));
    if (!is_indecomposable(m)) {
      ++rejected;
      continue;
    }
    ++accepted;
    const PseudoInverse q = pseudo_inverse(m);
    const Matrix id = Matrix::Identity(n, n);
    const Matrix defect = id - MarkovMatrix::rank_one(q.invariant()).matrix();
    const Matrix lap = id - m.matrix();
    worst = std::max({worst, sup_norm(Vector(q.matrix().rowwise().sum())),
                      sup_norm(Matrix(q.matrix() * lap - defect)),
                      sup_norm(Matrix(lap * q.matrix() - defect))});
  }
  double rank_one_error = 0.0, rank_one_mq = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = size(rng);
    Vector w(n);
    for (Index i = 0; i < n; ++i) w[i] = unif(rng) + 1e-3;
    const ProbVector pi(w / w.sum(), 1e-10);
    const MarkovMatrix m = MarkovMatrix::rank_one(pi);
    const PseudoInverse q = pseudo_inverse(m);
    const Matrix expected = Matrix::Identity(n, n) - m.matrix();
    rank_one_error = std::max(rank_one_error, sup_norm(Matrix(q.matrix() - expected)));
    rank_one_mq = std::max(rank_one_mq, sup_norm(Matrix(m.matrix() * q.matrix())));
  }
  ExperimentResult r;
  r.summary = {summarize("identity_error", {worst}),
               summarize("rank_one_error", {rank_one_error}),
               summarize("rank_one_mq", {rank_one_mq}),
               summarize("rejected_draws", {static_cast<double>(rejected)}),
               summarize("runtime_s", {clock.seconds()})};
  return r;
}

// ---- A2

ExperimentResult run_q_bound(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const long count = cfg.integer("kernel.count", 100);
  const long max_states = cfg.integer("kernel.max_states", 6);
  std::mt19937_64 rng(cfg.seed());
  std::uniform_int_distribution<Index> size(2, max_states);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double entrywise = -kInf, uniform = -kInf, tightest = kInf;
  for (long accepted = 0; accepted < count;) {
    const MarkovMatrix m = random_chain(rng, size(rng), 0.2 + 0.8 * unif(rng));
    if (!is_irreducible(m)) continue;
    ++accepted;
    const Matrix q = pseudo_inverse(m).matrix().cwiseAbs();
    const Matrix b = q_bound_spectral(m);
    entrywise = std::max(entrywise, (q - b).maxCoeff());
    uniform = std::max(uniform, q.maxCoeff() - q_bound_uniform(m));
    tightest = std::min(tightest, (b - q).minCoeff());
  }
  ExperimentResult r;
  r.summary = {summarize("entrywise_excess", {entrywise}),
               summarize("uniform_excess", {uniform}),
               summarize("tightest_slack", {tightest}),
               summarize("runtime_s", {clock.seconds()})};
  return r;
}

// ---- A3

ExperimentResult run_holley_stroock(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const Landscape land = landscape_of(cfg);
  const double lo = cfg.number("kernel.beta_min", 10.0);
  const double hi = cfg.number("kernel.beta_max", 40.0);
  const double stepsize = cfg.number("kernel.beta_step", 2.5);
  if (!(stepsize > 0.0 && hi > lo)) throw ParseError("kernel: need beta_min < beta_max and beta_step > 0", 0);
  std::vector<double> grid;
  for (double b = lo; b <= hi + 1e-9; b += stepsize) grid.push_back(b);
  const SlopeFit fit = holley_stroock_slope(land.exploration(), land.potential(), grid, shape_of(cfg));
  const double barrier = energy_barrier(land);
  std::ostringstream table;
  table.precision(17);
  table << "beta,log_lambda,log_pi_star\n";
  for (const auto& p : fit.points) table << p.beta << ',' << p.log_lambda << ',' << p.log_pi_star << '\n';
  ExperimentResult r;
  r.tables.emplace_back("beta_sweep", table.str());
  const double rel = barrier > 0.0 ? std::abs(fit.slope + barrier) / barrier : std::abs(fit.slope);
  r.summary = {summarize("slope", {fit.slope}),
               summarize("barrier", {barrier}),
               summarize("relative_error", {rel}),
               summarize("fitted_points", {static_cast<double>(fit.fitted)}),
               summarize("dropped_points", {static_cast<double>(fit.dropped_betas.size())}),
               summarize("runtime_s", {clock.seconds()})};
  return r;
}

// ---- A4 / A5

struct AnnealingRun {
  Landscape land;
  ProcessSpec spec;
  std::string key;
};

AnnealingRun annealing_run(const ExperimentConfig& cfg, double rate_override = -1.0) {
  Landscape land = landscape_of(cfg);
  const double barrier = energy_barrier(land);
  AnnealingStrategy k{land, shape_of(cfg), schedule_of(cfg, barrier)};
  if (rate_override >= 0.0) k.schedule.rate = rate_override;
  ProcessSpec spec = base_spec(cfg, k, 1000000);
  std::ostringstream key;
  key.precision(17);
  key << "annealing|" << cfg.text("experiment.landscape", "<fixture>") << '|' << k.schedule.beta0
      << '|' << k.schedule.rate << '|' << to_string(k.shape) << '|' << spec.horizon << '|'
      << spec.seed << '|' << cfg.replicas() << '|' << spec.initial_state << '|'
      << cfg.text("run.checkpoints", "dyadic");
  return {std::move(land), std::move(spec), key.str()};
}

double argmin_mass(const Landscape& land, const ProcessTrace& t) {
  double mass = 0.0;
  for (Index x : argmin_set(land.potential())) mass += t.final_state.occ1[x];
  return mass;
}

ExperimentResult run_annealing(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const AnnealingRun main = annealing_run(cfg);
  const auto traces = cached_replicas(main.key, main.spec, cfg.replicas());
  const double barrier = energy_barrier(main.land);
  const double bad_rate = cfg.number("kernel.violation_rate", barrier > 0.0 ? 5.0 / (2.0 * barrier) : 5.0);
  const AnnealingRun bad = annealing_run(cfg, bad_rate);
  const auto bad_traces = cached_replicas(bad.key, bad.spec, cfg.replicas());
  std::vector<double> mass, bad_mass;
  for (const auto& t : traces) mass.push_back(argmin_mass(main.land, t));
  for (const auto& t : bad_traces) bad_mass.push_back(argmin_mass(bad.land, t));
  ExperimentResult r;
  add_traces(r, "", traces);
  add_traces(r, "violation_", bad_traces);
  const auto& sched = std::get<AnnealingStrategy>(main.spec.kernel).schedule;
  r.summary = {summarize("mass_argmin", mass),
               summarize("violation_mass_argmin", bad_mass),
               summarize("rate", {sched.rate}),
               summarize("violation_rate", {bad_rate}),
               summarize("runtime_s", {clock.seconds()})};
  return r;
}

ExperimentResult run_annealing_diagnostics(const ExperimentConfig& cfg) {
  const AnnealingRun run = annealing_run(cfg);
  const auto traces = cached_replicas(run.key, run.spec, cfg.replicas());
  const auto& k = std::get<AnnealingStrategy>(run.spec.kernel);
  // |M_{n+1} - M_n| <= c |beta_{n+1} - beta_n| with c the largest row sum of
  // M0(x, y) |W(x, y)| (the diagonal moves by the sum of its row).
  const Matrix w = potential_differences(run.land.potential());
  const Matrix& m0 = run.land.exploration().matrix();
  double c = 0.0;
  for (Index x = 0; x < m0.rows(); ++x) {
    double row = 0.0;
    for (Index y = 0; y < m0.cols(); ++y)
      if (y != x) row += m0(x, y) * std::abs(w(x, y));
    c = std::max(c, row);
  }
  std::vector<double> decreasing, ratio, flagged, tail_max;
  for (const auto& t : traces) {
    const auto rep = hypothesis_report(t);
    for (const auto& v : rep.verdicts)
      if (v.quantity == "hyp1_i") decreasing.push_back(v.consistent ? 1.0 : 0.0);
    flagged.push_back(static_cast<double>(rep.flagged_rows));
    double worst = 0.0;
    for (const auto& cp : t.checkpoints) {
      const double n = static_cast<double>(cp.n);
      const double step = std::abs(k.schedule(n + 1.0) - k.schedule(n));
      const double bound = c * step * n / std::log(n);
      const double value = cp.diagnostics.prop34_ii;
      if (bound > 0.0)
        worst = std::max(worst, value / bound);
      else if (value > 0.0)
        worst = kInf;
    }
    ratio.push_back(worst);
    const auto tl = tail(t.checkpoints, &DiagnosticsRow::prop34_ii);
    tail_max.push_back(tl.empty() ? 0.0 : *std::max_element(tl.begin(), tl.end()));
  }
  ExperimentResult r;
  r.summary = {summarize("hyp1_decreasing", decreasing),
               summarize("prop34_ii_bound_ratio", ratio),
               summarize("prop34_ii_tail_max", tail_max),
               summarize("derivative_constant", {c}),
               summarize("flagged_rows", flagged)};
  return r;
}

// ---- A6

ExperimentResult run_constant_chain(const ExperimentConfig& cfg) {
  const MarkovMatrix m = chain_of(cfg, four_state_fixture());
  const ProbVector pi = invariant_measure(m);
  const ProcessSpec spec = base_spec(cfg, ConstantStrategy{m}, 100000);
  const auto traces = simulate_replicas(spec, cfg.replicas());
  std::vector<double> err;
  for (const auto& t : traces) err.push_back((t.final_state.occ1 - pi.values()).lpNorm<1>());
  ExperimentResult r;
  add_traces(r, "", traces);
  r.summary = {summarize("l1_error", err)};
  return r;
}

// ---- A7

ExperimentResult run_vrrw_linear(const ExperimentConfig& cfg) {
  const Matrix u = interaction_of(cfg, symmetric_interaction_fixture());
  const ProcessSpec spec = base_spec(cfg, LinearVrrwStrategy{u}, 1000000);
  const auto traces = simulate_replicas(spec, cfg.replicas());
  const CriticalSet crit = critical_set_quadratic(u);
  std::vector<double> residual, h_gap;
  for (const auto& t : traces) {
    const Vector& v = t.final_state.occ1;
    residual.push_back(linear_vrrw_residual(u, v));
    const double h = lyapunov_H(u, v);
    double best = kInf;
    for (double c : crit.values) best = std::min(best, std::abs(h - c));
    h_gap.push_back(best);
  }
  ExperimentResult r;
  add_traces(r, "", traces);
  r.summary = {summarize("fixed_point_residual", residual), summarize("critical_value_gap", h_gap),
               summarize("critical_points", {static_cast<double>(crit.points.size())})};
  return r;
}

// ---- A8

ExperimentResult run_vrrw_exponential(const ExperimentConfig& cfg) {
  const Matrix u = interaction_of(cfg, Matrix::Identity(2, 2));
  const Index n = u.rows();
  const MarkovMatrix m0 = chain_of(cfg, complete_exploration(n));
  // The landscape x -> U(x, v) for pure v = delta_z is column z of Umat; the
  // largest column barrier bounds the rate.
  double barrier = 0.0;
  for (Index z = 0; z < n; ++z)
    barrier = std::max(barrier, energy_barrier(Landscape(m0, u.col(z))));
  ExponentialVrrwStrategy k{m0, u, shape_of(cfg), schedule_of(cfg, barrier)};
  const ProcessSpec spec = base_spec(cfg, k, 1000000);
  const auto traces = simulate_replicas(spec, cfg.replicas());
  // Target: the unique critical point of U(v, v); for Umat = I it is uniform.
  const CriticalSet crit = critical_set_quadratic(u);
  std::vector<Vector> interior;
  for (const auto& p : crit.points)
    if ((p.array() > 1e-12).all()) interior.push_back(p);
  if (interior.empty()) throw ValidationError("interaction has no interior critical point");
  std::vector<double> dist;
  for (const auto& t : traces) dist.push_back(distance_to_points(interior, t.final_state.occ1));
  ExperimentResult r;
  add_traces(r, "", traces);
  r.summary = {summarize("distance_to_critical", dist), summarize("rate", {k.schedule.rate}),
               summarize("barrier", {barrier})};
  return r;
}

// ---- A9

ExperimentResult run_zero_sum_fp(const ExperimentConfig& cfg) {
  const TwoPlayerGame game = game_of(cfg);
  if (!game.is_zero_sum()) throw ValidationError("zero_sum_fp needs a zero-sum game");
  const MarkovMatrix m1 = complete_exploration(game.actions(1));
  const MarkovMatrix m2 = complete_exploration(game.actions(2));
  const double b1 = game_barrier(game.payoff(1), m1);
  const double b2 = game_barrier(game.payoff(2).transpose(), m2);
  FictitiousStrategy k{m1, shape_of(cfg), schedule_of(cfg, b1)};
  ProcessSpec spec = base_spec(cfg, k, 1000000);
  spec.game = GameSetup{game, FictitiousOpponent{m2, shape_of(cfg), schedule_of(cfg, b2)},
                        cfg.integer("run.initial_action", 0)};
  spec.observation = ObservationMap::kGameFull;
  const auto traces = simulate_replicas(spec, cfg.replicas());
  const ZeroSumSolution sol = zero_sum_value(game);
  std::vector<double> d1, d2, gap, nash;
  for (const auto& t : traces) {
    const auto& s = t.final_state;
    d1.push_back((s.occ1 - sol.v1).norm());
    d2.push_back((s.occ2 - sol.v2).norm());
    gap.push_back(std::abs(s.payoff[0] - sol.value));
    nash.push_back(nash_set_distance(game, s.occ1, s.occ2));
  }
  ExperimentResult r;
  add_traces(r, "", traces);
  r.summary = {summarize("distance_player1", d1), summarize("distance_player2", d2),
               summarize("payoff_gap", gap), summarize("nash_set_distance", nash),
               summarize("value", {sol.value}), summarize("rate_player1", {k.schedule.rate})};
  return r;
}

// ---- A10

ExperimentResult run_counterexample(const ExperimentConfig& cfg) {
  const double eps = cfg.number("kernel.epsilon", 0.2);
  if (!(eps >= 0.0 && eps <= 1.0)) throw ParseError("kernel.epsilon must lie in [0, 1]", 0);
  Matrix lazy(2, 2);
  lazy << eps, 1.0 - eps, 1.0 - eps, eps;
  ProcessSpec spec = base_spec(cfg, ConstantStrategy{MarkovMatrix(lazy)}, 1000000);
  spec.game = GameSetup{game_of(cfg), MirrorOpponent{}, cfg.integer("run.initial_action", 0)};
  spec.observation = ObservationMap::kGameFull;
  const auto traces = simulate_replicas(spec, cfg.replicas());
  std::vector<double> payoff, hyp2_min, violated;
  for (const auto& t : traces) {
    payoff.push_back(t.final_state.payoff[0]);
    const auto h = tail(t.checkpoints, &DiagnosticsRow::hyp2);
    hyp2_min.push_back(h.empty() ? 0.0 : *std::min_element(h.begin(), h.end()));
    for (const auto& v : hypothesis_report(t).verdicts)
      if (v.quantity == "hyp2") violated.push_back(v.consistent ? 0.0 : 1.0);
  }
  ExperimentResult r;
  add_traces(r, "", traces);
  r.summary = {summarize("payoff_mean", payoff), summarize("hyp2_tail_min", hyp2_min),
               summarize("hyp2_violated", violated), summarize("epsilon", {eps})};
  return r;
}

// ---- A11

ExperimentResult run_weighted(const ExperimentConfig& cfg) {
  const MarkovMatrix m = chain_of(cfg, four_state_fixture());
  ExperimentConfig local = cfg;
  if (!cfg.text("run.checkpoints")) local.set("run.checkpoints", "dyadic, 1000");
  std::vector<double> alphas;
  {
    std::stringstream parts(cfg.text("weights.alphas", "1, -0.5"));
    for (std::string item; std::getline(parts, item, ',');) alphas.push_back(std::stod(item));
  }
  const long early = cfg.integer("weights.early_checkpoint", 1000);
  ExperimentResult r;
  for (double alpha : alphas) {
    ProcessSpec spec = base_spec(local, ConstantStrategy{m}, 1000000);
    spec.weights.alpha = alpha;
    std::ostringstream tag;
    tag << "alpha_" << alpha;
    const auto traces = simulate_replicas(spec, cfg.replicas());
    std::vector<double> violations, ratio, final_bound, final_gap;
    for (const auto& t : traces) {
      double bad = 0.0, at_early = kNaN, at_end = kNaN;
      for (const auto& row : weighted_gap_bound(t)) {
        if (row.gap > row.bound + 1e-12) bad += 1.0;
        if (row.n == early) at_early = row.bound;
        at_end = row.bound;
      }
      violations.push_back(bad);
      ratio.push_back(at_end / at_early);
      final_bound.push_back(at_end);
      final_gap.push_back(t.checkpoints.empty() ? kNaN : t.checkpoints.back().weighted_gap);
    }
    add_traces(r, tag.str() + "_", traces);
    r.summary.push_back(summarize("violations_" + tag.str(), violations));
    r.summary.push_back(summarize("bound_ratio_" + tag.str(), ratio));
    r.summary.push_back(summarize("final_bound_" + tag.str(), final_bound));
    r.summary.push_back(summarize("final_gap_" + tag.str(), final_gap));
  }
  return r;
}

// ---- A12

ExperimentResult run_inclusion(const ExperimentConfig& cfg) {
  const double h = cfg.number("kernel.step", 0.01);
  Vector target(3);
  target << 0.2, 0.3, 0.5;
  Vector v0(3);
  v0 << 1.0, 0.0, 0.0;
  const FaceValuedMap constant = FaceValuedMap::constant_set(ProbVector(target));

  const InclusionSolution sol = integrate(constant, v0, h, 5.0);
  double closed = 0.0;
  for (std::size_t k = 0; k < sol.points.size(); ++k) {
    const Vector exact = target + std::pow(1.0 - h, static_cast<double>(k)) * (v0 - target);
    closed = std::max(closed, sup_norm(Vector(sol.points[k] - exact)));
  }

  // Global error at T = 1 against the flow v(t) = pi + e^{-t}(v0 - pi).
  auto global_error = [&](double step) {
    const InclusionSolution s = integrate(constant, v0, step, 1.0);
    const Vector exact = target + std::exp(-s.times.back()) * (v0 - target);
    return (s.points.back() - exact).norm();
  };
  const double coarse = cfg.number("kernel.coarse_step", 0.02);
  const double order = std::log2(global_error(coarse) / global_error(coarse / 2.0));

  std::mt19937_64 rng(cfg.seed());
  std::exponential_distribution<double> expo(1.0);
  std::vector<Matrix> interactions = {interaction_of(cfg, symmetric_interaction_fixture()),
                                      Matrix::Identity(3, 3)};
  const long starts = cfg.integer("kernel.starts", 20);
  double failures = 0.0, worst = -kInf;
  for (const Matrix& u : interactions) {
    const FaceValuedMap c = FaceValuedMap::argmin_interaction(u, ProbVector::uniform(3));
    for (long i = 0; i < starts; ++i) {
      Vector start(3);
      for (Index j = 0; j < 3; ++j) start[j] = expo(rng);
      start /= start.sum();
      const LyapunovVerdict verdict = lyapunov_check(integrate(c, start, h, 10.0), u);
      if (!verdict.nonincreasing) failures += 1.0;
      worst = std::max(worst, verdict.worst_increase - verdict.tolerance);
    }
  }
  const FaceValuedMap identity =
      FaceValuedMap::argmin_interaction(Matrix::Identity(2, 2), ProbVector::uniform(2));
  Vector start2(2);
  start2 << 0.9, 0.1;
  std::ostringstream table;
  write_solution_csv(table, identity, integrate(identity, start2, h, 5.0));
  ExperimentResult r;
  r.tables.emplace_back("solution_identity", table.str());
  r.summary = {summarize("closed_form_error", {closed}), summarize("convergence_order", {order}),
               summarize("lyapunov_failures", {failures}),
               summarize("worst_excess_over_tolerance", {worst})};
  return r;
}

std::vector<RegistryEntry> build_registry() {
  std::vector<RegistryEntry> out;
  out.push_back({"pseudo_inverse_identities", "A1",
                 "pseudo-inverse identities Q1 = 0, Q(I-M) = (I-M)Q = I-Pi; rank-one chain gives MQ = 0",
                 {at_most("identity_error", 1e-9, "Q identities hold to 1e-9"),
                  at_most("rank_one_error", 1e-12, "M = Pi gives Q = I - Pi to 1e-12"),
                  at_most("rank_one_mq", 1e-12, "M = Pi gives MQ = 0"),
                  at_most("runtime_s", 5.0, "runtime under 5 s")},
                 run_pseudo_inverse});
  out.push_back({"q_spectral_bound", "A2",
                 "spectral-gap bounds on the pseudo-inverse, entrywise and uniform",
                 {at_most("entrywise_excess", 1e-9, "|Q(x,y)| <= sqrt(pi(y)/pi(x))/lambda + 1e-9"),
                  at_most("uniform_excess", 1e-9, "|Q| <= uniform lambda bound"),
                  at_most("runtime_s", 5.0, "runtime under 5 s")},
                 run_q_bound});
  out.push_back({"holley_stroock", "A3",
                 "log lambda(beta) / beta tends to minus the energy barrier",
                 {at_most("relative_error", 0.15, "fitted slope within 15% of -barrier"),
                  at_most("runtime_s", 5.0, "runtime under 5 s")},
                 run_holley_stroock});
  out.push_back({"annealing", "A4",
                 "annealing with A below 1/(2 barrier) concentrates the occupation measure on Argmin U",
                 {at_least("mass_argmin", 0.9, "mean mass on Argmin U >= 0.9"),
                  report("violation_mass_argmin", "run with A above the bound, reported only"),
                  at_most("runtime_s", 120.0, "runtime under 2 min")},
                 run_annealing});
  out.push_back({"annealing_diagnostics", "A5",
                 "annealing strategies satisfy the pseudo-inverse growth and smoothness hypotheses",
                 {at_least("hyp1_decreasing", 1.0, "|Q_n|^2 log n / n decreasing over the last half"),
                  at_most("prop34_ii_bound_ratio", 1.0 + 1e-9, "|M_{n+1}-M_n| n/log n <= c |dbeta| n/log n")},
                 run_annealing_diagnostics});
  out.push_back({"constant_chain", "A6", "constant strategy: occupation measure converges to pi",
                 {at_most("l1_error", 0.05, "mean |v_N - pi|_1 <= 0.05")},
                 run_constant_chain});
  out.push_back({"vrrw_linear_symmetric", "A7",
                 "symmetric linear reinforcement converges to the critical set of U(v, v)",
                 {at_most("fixed_point_residual", 0.05, "mean |-v_N + pi(v_N)| <= 0.05"),
                  at_most("critical_value_gap", 0.05, "H(v_N) within 0.05 of a critical value")},
                 run_vrrw_linear});
  out.push_back({"vrrw_exponential_unique", "A8",
                 "exponential reinforcement with a single critical point converges to it",
                 {at_most("distance_to_critical", 0.05, "mean |v_N - v*| <= 0.05")},
                 run_vrrw_exponential});
  out.push_back({"zero_sum_fp", "A9",
                 "two-sided Markovian fictitious play in a zero-sum game reaches the optimal strategies and value",
                 {at_most("distance_player1", 0.1, "mean |v1_N - v1*| <= 0.1"),
                  at_most("distance_player2", 0.1, "mean |v2_N - v2*| <= 0.1"),
                  at_most("payoff_gap", 0.05, "running payoff within 0.05 of the value")},
                 run_zero_sum_fp});
  out.push_back({"counterexample_mirror", "A10",
                 "lazy strategy against a mirror opponent: payoff -(1-eps), drift hypothesis fails",
                 {within("payoff_mean", -0.85, -0.75, "mean payoff in [-0.85, -0.75]"),
                  at_least("hyp2_tail_min", std::nextafter(0.01, 1.0), "hyp2 > 0.01 on tail checkpoints")},
                 run_counterexample});
  out.push_back({"weighted_average", "A11",
                 "weighted occupation measure tracks the plain one: |w_n - v_n| <= explicit bound",
                 {at_most("violations_alpha_1", 0.0, "gap <= bound at every checkpoint (alpha = 1)"),
                  at_most("bound_ratio_alpha_1", std::nextafter(1.0, 0.0), "bound(N) < bound(1000) (alpha = 1)"),
                  at_most("violations_alpha_-0.5", 0.0, "gap <= bound at every checkpoint (alpha = -0.5)"),
                  at_most("bound_ratio_alpha_-0.5", std::nextafter(1.0, 0.0),
                          "bound(N) < bound(1000) (alpha = -0.5)")},
                 run_weighted});
  out.push_back({"inclusion_integrator", "A12",
                 "Euler scheme for dv/dt in -v + C(v): closed form, first order, Lyapunov descent",
                 {at_most("closed_form_error", 1e-12, "constant C matches pi + (1-h)^k (v0 - pi)"),
                  within("convergence_order", 0.9, 1.1, "halving h halves the error"),
                  at_most("lyapunov_failures", 0.0, "H nonincreasing within 10 h^2 max|U|")},
                 run_inclusion});
  return out;
}

std::string format_bound(const Rule& rule) {
  std::ostringstream os;
  os.precision(12);
  if (rule.report_only) return "report only";
  if (std::isinf(rule.lo)) {
    os << "<= " << rule.hi;
  } else if (std::isinf(rule.hi)) {
    os << ">= " << rule.lo;
  } else {
    os << "in [" << rule.lo << ", " << rule.hi << "]";
  }
  return os.str();
}

}  // namespace

SummaryRow summarize(const std::string& statistic, const std::vector<double>& values) {
  SummaryRow row{statistic, 0.0, 0.0, values.size()};
  if (values.empty()) {
    row.mean = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  row.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - row.mean) * (v - row.mean);
    row.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return row;
}

std::vector<RuleOutcome> evaluate_rules(const std::vector<Rule>& rules,
                                        const std::vector<SummaryRow>& summary) {
  std::vector<RuleOutcome> out;
  for (const auto& rule : rules) {
    RuleOutcome o{rule};
    for (const auto& row : summary) {
      if (row.statistic != rule.statistic) continue;
      o.found = true;
      o.value = row.mean;
    }
    o.pass = rule.report_only || (o.found && o.value >= rule.lo && o.value <= rule.hi);
    out.push_back(o);
  }
  return out;
}

bool all_pass(const std::vector<RuleOutcome>& outcomes) {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const RuleOutcome& o) { return o.pass; });
}

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> entries = build_registry();
  return entries;
}

const RegistryEntry& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw ValidationError("unknown experiment '" + name + "'");
}

void write_summary_csv(std::ostream& out, const RegistryEntry& entry,
                       const std::vector<SummaryRow>& summary) {
  out << "# experiment=" << entry.name << " criterion=" << entry.criterion
      << " target=" << entry.target << '\n';
  out << "statistic,mean,sd,count\n";
  const auto old = out.precision(17);
  for (const auto& row : summary)
    out << row.statistic << ',' << row.mean << ',' << row.sd << ',' << row.count << '\n';
  out.precision(old);
}

void write_verdict(std::ostream& out, const RegistryEntry& entry,
                   const std::vector<RuleOutcome>& outcomes) {
  out << "experiment " << entry.name << " (" << entry.criterion << ")\n";
  const auto old = out.precision(10);
  for (const auto& o : outcomes) {
    const char* tag = o.rule.report_only ? "REPORT" : (o.pass ? "PASS" : "FAIL");
    out << tag << ' ' << o.rule.statistic << ' ';
    if (o.found)
      out << "mean=" << o.value;
    else
      out << "missing";
    out << " (" << format_bound(o.rule) << "): " << o.rule.description << '\n';
  }
  out << "overall " << (all_pass(outcomes) ? "PASS" : "FAIL") << '\n';
  out.precision(old);
}

std::vector<RuleOutcome> write_artifacts(const RegistryEntry& entry, const ExperimentResult& result,
                                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [stem, trace] : result.traces) {
    std::ofstream f(dir / ("trace_" + stem + ".csv"));
    write_trace_csv(f, trace);
  }
  for (const auto& [stem, text] : result.tables) {
    std::ofstream f(dir / (stem + ".csv"));
    f << text;
  }
  {
    std::ofstream f(dir / "summary.csv");
    write_summary_csv(f, entry, result.summary);
  }
  const auto outcomes = evaluate_rules(entry.rules, result.summary);
  std::ofstream f(dir / "verdict.txt");
  write_verdict(f, entry, outcomes);
  return outcomes;
}

LoadedSummary read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  LoadedSummary out;
  std::string line;
  int number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto at = line.find("experiment=");
      if (at != std::string::npos) {
        const auto end = line.find(' ', at);
        out.experiment = line.substr(at + 11, end == std::string::npos ? end : end - at - 11);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "statistic,mean,sd,count") throw ParseError("unexpected summary header", number);
      header_seen = true;
      continue;
    }
    std::stringstream fields(line);
    SummaryRow row;
    std::string mean, sd, count;
    if (!std::getline(fields, row.statistic, ',') || !std::getline(fields, mean, ',') ||
        !std::getline(fields, sd, ',') || !std::getline(fields, count))
      throw ParseError("expected 4 fields", number);
    try {
      row.mean = std::stod(mean);
      row.sd = std::stod(sd);
      row.count = static_cast<std::size_t>(std::stoul(count));
    } catch (const std::exception&) {
      throw ParseError("bad number in summary row", number);
    }
    out.rows.push_back(row);
  }
  if (out.experiment.empty()) throw ParseError("summary has no experiment metadata line", 1);
  return out;
}

Landscape path_landscape_fixture() {
  Matrix m0 = Matrix::Zero(5, 5);
  for (Index x = 0; x < 5; ++x) {
    if (x > 0) m0(x, x - 1) = 0.5;
    if (x < 4) m0(x, x + 1) = 0.5;
  }
  m0(0, 0) = 0.5;
  m0(4, 4) = 0.5;
  Vector u(5);
  u << 0.0, 3.0, 1.0, 2.0, 0.0;
  return Landscape(MarkovMatrix(m0), u);
}

MarkovMatrix four_state_fixture() {
  Matrix m(4, 4);
  m << 0.1, 0.6, 0.2, 0.1,
       0.3, 0.1, 0.5, 0.1,
       0.2, 0.2, 0.2, 0.4,
       0.5, 0.1, 0.1, 0.3;
  return MarkovMatrix(m);
}

Matrix symmetric_interaction_fixture() {
  Matrix u(3, 3);
  u << 1.0, 2.0, 2.0,
       2.0, 1.0, 2.0,
       2.0, 2.0, 1.0;
  return u;
}

TwoPlayerGame matching_fixture() {
  Matrix u(2, 2);
  u << 0.0, -1.0, -1.0, 0.0;
  return TwoPlayerGame::zero_sum(u);
}

}  // namespace selfint
