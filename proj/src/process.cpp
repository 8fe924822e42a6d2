#include "selfint/process.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include "selfint/errors.hpp"

namespace selfint {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Vector unit(Index size, Index at) {
  Vector e = Vector::Zero(size);
  e[at] = 1.0;
  return e;
}

void running_mean_at(Vector& v, Index hit, long n) {
  for (Index i = 0; i < v.size(); ++i) v[i] += ((i == hit ? 1.0 : 0.0) - v[i]) / static_cast<double>(n);
}

const FictitiousOpponent* fictitious_opponent(const ProcessSpec& spec) {
  if (!spec.game) return nullptr;
  return std::get_if<FictitiousOpponent>(&spec.game->opponent);
}

// Diagnostics are data: a decomposable or numerically singular strategy
// yields no pseudo-inverse rather than an error.
std::optional<PseudoInverse> try_pseudo_inverse(const MarkovMatrix& m) {
  if (!is_indecomposable(m)) return std::nullopt;
  try {
    return pseudo_inverse(m);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

// Values <= kVanish count as zero in trend verdicts.
constexpr double kVanish = 1e-12;

Verdict decreasing_verdict(const std::string& name, const std::vector<long>& ns,
                           const std::vector<double>& vals) {
  Verdict v{name, true, std::nullopt};
  if (vals.size() < 2) return v;
  if (std::all_of(vals.begin(), vals.end(), [](double x) { return x <= kVanish; })) return v;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    if (vals[i] > vals[i - 1] * (1.0 + 1e-9) + kVanish) {
      v.consistent = false;
      v.offending_n = ns[i];
      return v;
    }
  }
  // A flat positive tail does not go to zero.
  if (!(vals.back() < vals.front() * (1.0 - 1e-9))) {
    v.consistent = false;
    v.offending_n = ns.back();
  }
  return v;
}

Verdict bounded_verdict(const std::string& name, const std::vector<long>& ns,
                        const std::vector<double>& first, const std::vector<double>& last) {
  Verdict v{name, true, std::nullopt};
  if (first.empty() || last.empty()) return v;
  const double cap = *std::max_element(first.begin(), first.end()) * (1.0 + 1e-9) + kVanish;
  for (std::size_t i = 0; i < last.size(); ++i) {
    if (last[i] > cap) {
      v.consistent = false;
      v.offending_n = ns[i];
      return v;
    }
  }
  return v;
}

}  // namespace

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) {
  return splitmix64(splitmix64(seed) ^ (replica * 0xD1B54A32D192ED03ull));
}

Index sample_row(const Vector& row, double draw) {
  if (row.size() == 0) throw ValidationError("cannot sample from an empty row");
  if (!(draw >= 0.0 && draw < 1.0)) throw ValidationError("draw must lie in [0, 1)");
  const double total = row.sum();
  if (!(std::abs(total - 1.0) <= 1e-9)) throw ValidationError("row does not sum to one");
  double cumulative = 0.0;
  Index last_positive = -1;
  for (Index y = 0; y < row.size(); ++y) {
    if (row[y] < 0.0) throw ValidationError("row has a negative entry");
    if (row[y] == 0.0) continue;
    last_positive = y;
    cumulative += row[y];
    if (draw < cumulative) return y;
  }
  // Round-off left the draw above the accumulated mass.
  return last_positive;
}

Index step(const MarkovMatrix& m, Index current_state, double draw) {
  if (current_state < 0 || current_state >= m.size())
    throw DimensionError("current state out of range");
  return sample_row(m.matrix().row(current_state).transpose(), draw);
}

Vector update_average(const Vector& v_prev, const Vector& v_new, long n) {
  if (n < 1) throw ValidationError("time index must be at least 1");
  if (v_prev.size() != v_new.size()) throw DimensionError("observation sizes differ");
  Vector out = v_prev;
  for (Index i = 0; i < out.size(); ++i) out[i] += (v_new[i] - out[i]) / static_cast<double>(n);
  return out;
}

WeightedAverage update_weighted(const Vector& w_prev, const Vector& v_new, double a_n,
                                double r_prev) {
  if (!(a_n > 0.0)) throw ValidationError("weights must be positive");
  if (w_prev.size() != v_new.size()) throw DimensionError("observation sizes differ");
  WeightedAverage out{w_prev, r_prev + a_n};
  for (Index i = 0; i < out.w.size(); ++i) out.w[i] += (v_new[i] - out.w[i]) * a_n / out.r;
  return out;
}

double WeightSequence::operator()(long i) const {
  return std::pow(std::log(static_cast<double>(i) + 1.0), alpha);
}

ObservationMap parse_observation(const std::string& name) {
  if (name == "occupation") return ObservationMap::kOccupation;
  if (name == "game_pair") return ObservationMap::kGamePair;
  if (name == "game_full") return ObservationMap::kGameFull;
  throw ValidationError("unknown observation map '" + name + "'");
}

Opponent scripted_opponent(ScriptedKind kind, const Vector& q) {
  if (kind == ScriptedKind::kMirror) return MirrorOpponent{};
  return FixedMixedOpponent{ProbVector(q, 1e-9).values()};
}

std::vector<long> dyadic_checkpoints(long horizon) {
  std::vector<long> out;
  for (long n = 2; n <= horizon; n *= 2) {
    out.push_back(n);
    if (n > std::numeric_limits<long>::max() / 2) break;
  }
  if (horizon >= 2 && (out.empty() || out.back() != horizon)) out.push_back(horizon);
  return out;
}

Simulator::Simulator(ProcessSpec spec) : spec_(std::move(spec)) {
  n1_ = std::visit(
      Overloaded{
          [](const ConstantStrategy& k) { return k.chain.size(); },
          [this](const AnnealingStrategy& k) {
            annealing_w_ = potential_differences(k.landscape.potential());
            return k.landscape.size();
          },
          [](const LinearVrrwStrategy& k) {
            if (k.interaction.rows() != k.interaction.cols() || k.interaction.rows() == 0)
              throw DimensionError("interaction matrix must be square");
            if ((k.interaction.array() < 0.0).any())
              throw ValidationError("linear reinforcement needs a nonnegative interaction");
            return k.interaction.rows();
          },
          [](const ExponentialVrrwStrategy& k) {
            if (k.interaction.rows() != k.exploration.size() ||
                k.interaction.cols() != k.exploration.size())
              throw DimensionError("interaction and exploration sizes differ");
            return k.exploration.size();
          },
          [this](const FictitiousStrategy& k) {
            if (!spec_.game) throw ValidationError("fictitious play needs a game");
            if (k.exploration.size() != spec_.game->game.actions(1))
              throw DimensionError("exploration matrix does not match player 1's actions");
            return k.exploration.size();
          },
      },
      spec_.kernel);

  if (spec_.game) {
    const auto& g = *spec_.game;
    if (g.game.actions(1) != n1_) throw DimensionError("game does not match the process states");
    n2_ = g.game.actions(2);
    if (g.initial_action < 0 || g.initial_action >= n2_)
      throw ValidationError("initial opponent action out of range");
    std::visit(Overloaded{
                   [this](const MirrorOpponent&) {
                     if (n1_ != n2_) throw DimensionError("mirror opponent needs |E1| = |E2|");
                   },
                   [this](const FixedMixedOpponent& o) {
                     if (o.q.size() != n2_) throw DimensionError("opponent mixture has the wrong size");
                     ProbVector check(o.q, 1e-9);
                   },
                   [this](const FictitiousOpponent& o) {
                     if (o.exploration.size() != n2_)
                       throw DimensionError("opponent exploration does not match its actions");
                   },
               },
               g.opponent);
  } else if (spec_.observation != ObservationMap::kOccupation) {
    throw ValidationError("game observations need a game");
  }
  if (spec_.initial_state < 0 || spec_.initial_state >= n1_)
    throw ValidationError("initial state out of range");
  if (spec_.horizon < 1) throw ValidationError("horizon must be at least 1");
  for (std::size_t i = 0; i < spec_.checkpoints.size(); ++i) {
    const long c = spec_.checkpoints[i];
    if (c < 2 || c > spec_.horizon) throw ValidationError("checkpoints must lie in [2, horizon]");
    if (i > 0 && c <= spec_.checkpoints[i - 1])
      throw ValidationError("checkpoints must be strictly increasing");
  }
}

double Simulator::beta(const CoolingSchedule& schedule, long n) const {
  return schedule(static_cast<double>(n));
}

ProcessState Simulator::initial_state() const {
  ProcessState s;
  s.n = 1;
  s.x = spec_.initial_state;
  s.occ1 = unit(n1_, s.x);
  if (spec_.game) {
    s.y = spec_.game->initial_action;
    s.occ2 = unit(n2_, s.y);
    s.payoff = Vector(2);
    s.payoff << spec_.game->game.payoff(1)(s.x, s.y), spec_.game->game.payoff(2)(s.x, s.y);
  }
  s.r = spec_.weights(1);
  s.w = unit(n1_, s.x);
  s.bound_sum = std::abs(s.r - spec_.weights(2));
  return s;
}

void Simulator::player_row(const ProcessState& s, Index x, Vector& row) const {
  std::visit(Overloaded{
                 [&](const ConstantStrategy& k) { row = k.chain.matrix().row(x).transpose(); },
                 [&](const AnnealingStrategy& k) {
                   metropolis_row(k.landscape.exploration(), x, annealing_w_.row(x).transpose(),
                                  beta(k.schedule, s.n), k.shape, row);
                 },
                 [&](const LinearVrrwStrategy& k) {
                   vrrw_linear_row(k.interaction, 1.0 / s.r, s.w, x, row);
                 },
                 [&](const ExponentialVrrwStrategy& k) {
                   const Vector score = k.interaction * s.occ1;
                   const Vector w = score.array() - score[x];
                   metropolis_row(k.exploration, x, w, beta(k.schedule, s.n), k.shape, row);
                 },
                 [&](const FictitiousStrategy& k) {
                   const Vector gain = spec_.game->game.payoff(1) * s.occ2;
                   const Vector w = gain[x] - gain.array();
                   metropolis_row(k.exploration, x, w, beta(k.schedule, s.n), k.shape, row);
                 },
             },
             spec_.kernel);
}

MarkovMatrix Simulator::player_kernel(const ProcessState& s) const {
  Matrix m(n1_, n1_);
  Vector row;
  for (Index x = 0; x < n1_; ++x) {
    player_row(s, x, row);
    m.row(x) = row.transpose();
  }
  return MarkovMatrix(std::move(m), 1e-10);
}

void Simulator::opponent_fictitious_row(const FictitiousOpponent& opp, const ProcessState& s,
                                        Index y, Vector& row) const {
  const Vector gain = expected_payoffs(spec_.game->game, 2, s.occ1);
  const Vector w = gain[y] - gain.array();
  metropolis_row(opp.exploration, y, w, beta(opp.schedule, s.n), opp.shape, row);
}

Vector Simulator::opponent_law(const ProcessState& s) const {
  if (!spec_.game) throw ValidationError("process has no opponent");
  return std::visit(Overloaded{
                        [&](const MirrorOpponent&) { return unit(n2_, s.x); },
                        [&](const FixedMixedOpponent& o) { return o.q; },
                        [&](const FictitiousOpponent& o) {
                          Vector row;
                          opponent_fictitious_row(o, s, s.y, row);
                          return row;
                        },
                    },
                    spec_.game->opponent);
}

MarkovMatrix Simulator::strategy(const ProcessState& s) const {
  MarkovMatrix m1 = player_kernel(s);
  const auto* opp = fictitious_opponent(spec_);
  if (!opp) return m1;
  Matrix m2(n2_, n2_);
  Vector row;
  for (Index y = 0; y < n2_; ++y) {
    opponent_fictitious_row(*opp, s, y, row);
    m2.row(y) = row.transpose();
  }
  return product_kernel(m1, MarkovMatrix(std::move(m2), 1e-10));
}

Index Simulator::observation_dimension() const {
  switch (spec_.observation) {
    case ObservationMap::kOccupation:
      return n1_;
    case ObservationMap::kGamePair:
      return n1_ + n2_;
    case ObservationMap::kGameFull:
      return n1_ + n2_ + 2;
  }
  return 0;
}

Matrix Simulator::observation_map(const ProcessState& s) const {
  const bool product = fictitious_opponent(spec_) != nullptr;
  const Index rows = product ? n1_ * n2_ : n1_;
  Matrix out = Matrix::Zero(rows, observation_dimension());
  // With a scripted opponent, Y_{n+1} is independent of X_{n+1} given the past,
  // so the opponent block is its law nu_n whatever x is.
  const Vector nu = spec_.game && !product ? opponent_law(s) : Vector();
  for (Index r = 0; r < rows; ++r) {
    const Index x = product ? r / n2_ : r;
    out(r, x) = 1.0;
    if (spec_.observation == ObservationMap::kOccupation) continue;
    Vector opp = product ? unit(n2_, r % n2_) : nu;
    out.block(r, n1_, 1, n2_) = opp.transpose();
    if (spec_.observation == ObservationMap::kGameFull) {
      out(r, n1_ + n2_) = spec_.game->game.payoff(1).row(x).dot(opp);
      out(r, n1_ + n2_ + 1) = spec_.game->game.payoff(2).row(x).dot(opp);
    }
  }
  return out;
}

Vector Simulator::observation_average(const ProcessState& s) const {
  Vector out(observation_dimension());
  switch (spec_.observation) {
    case ObservationMap::kOccupation:
      out = s.occ1;
      break;
    case ObservationMap::kGamePair:
      out << s.occ1, s.occ2;
      break;
    case ObservationMap::kGameFull:
      out << s.occ1, s.occ2, s.payoff;
      break;
  }
  return out;
}

void Simulator::advance(ProcessState& s, Index x_next, Index y_next) const {
  if (x_next < 0 || x_next >= n1_) throw DimensionError("next state out of range");
  ++s.n;
  s.x = x_next;
  running_mean_at(s.occ1, x_next, s.n);
  if (spec_.game) {
    if (y_next < 0 || y_next >= n2_) throw DimensionError("next opponent action out of range");
    s.y = y_next;
    running_mean_at(s.occ2, y_next, s.n);
    const double p1 = spec_.game->game.payoff(1)(x_next, y_next);
    const double p2 = spec_.game->game.payoff(2)(x_next, y_next);
    s.payoff[0] += (p1 - s.payoff[0]) / static_cast<double>(s.n);
    s.payoff[1] += (p2 - s.payoff[1]) / static_cast<double>(s.n);
  }
  const double a = spec_.weights(s.n);
  s.r += a;
  for (Index i = 0; i < s.w.size(); ++i) s.w[i] += ((i == x_next ? 1.0 : 0.0) - s.w[i]) * a / s.r;
  s.bound_sum += std::abs(s.r / static_cast<double>(s.n) - spec_.weights(s.n + 1));
}

DiagnosticsRow Simulator::diagnose(const ProcessState& s, Vector* theta) const {
  DiagnosticsRow d;
  d.n = s.n;
  const double n = static_cast<double>(s.n);
  const double logn = std::log(n);
  const MarkovMatrix m = strategy(s);
  const Matrix vh = observation_map(s);
  const auto q = try_pseudo_inverse(m);
  if (!q) {
    d.resolved = false;
    d.q_norm = d.q_step = d.pi_step = d.m_step = kNaN;
    d.hyp1_i = d.prop34_ii = d.prop34_iii = d.hyp2 = kNaN;
    if (theta) *theta = Vector::Constant(vh.cols(), kNaN);
    return d;
  }
  const Vector& pi = q->invariant().values();
  if (theta) *theta = vh.transpose() * pi;
  d.q_norm = sup_norm(q->matrix());
  d.hyp1_i = d.q_norm * d.q_norm * logn / n;

  Vector law1;
  player_row(s, s.x, law1);
  const Vector law2 = spec_.game ? opponent_law(s) : Vector::Ones(1);
  bool flagged = false;
  for (Index x = 0; x < law1.size(); ++x) {
    if (law1[x] <= 0.0) continue;
    for (Index y = 0; y < law2.size(); ++y) {
      if (law2[y] <= 0.0) continue;
      ProcessState next = s;
      advance(next, x, spec_.game ? y : -1);
      const MarkovMatrix m2 = strategy(next);
      const auto q2 = try_pseudo_inverse(m2);
      if (!q2) {
        flagged = true;
        continue;
      }
      d.q_step = std::max(d.q_step, sup_norm(Matrix(q2->matrix() - q->matrix())));
      d.pi_step = std::max(d.pi_step, sup_norm(Vector(q2->invariant().values() - pi)));
      d.m_step = std::max(d.m_step, sup_norm(Matrix(m2.matrix() - m.matrix())));
      const Matrix drift = m2.matrix() * q2->matrix() * (observation_map(next) - vh);
      d.hyp2 = std::max(d.hyp2, sup_norm(drift));
    }
  }
  if (flagged) {
    d.resolved = false;
    d.q_step = d.pi_step = d.m_step = d.hyp2 = kNaN;
  }
  d.prop34_ii = d.m_step * n / logn;
  d.prop34_iii = d.pi_step * std::sqrt(n / logn);
  return d;
}

Checkpoint Simulator::checkpoint(const ProcessState& s) const {
  Checkpoint c;
  c.n = s.n;
  c.state = s.x;
  c.opponent_state = s.y;
  c.v = observation_average(s);
  c.w = s.w;
  c.payoff_mean = spec_.game ? s.payoff[0] : kNaN;
  c.weighted_gap = (s.w - s.occ1).lpNorm<1>();
  c.weighted_bound = 2.0 / s.r * s.bound_sum;
  c.diagnostics = diagnose(s, &c.theta);
  return c;
}

ProcessTrace Simulator::run() const {
  ProcessTrace trace;
  trace.seed = spec_.seed;
  Rng rng(spec_.seed);
  ProcessState s = initial_state();
  if (spec_.record_states) {
    trace.states.reserve(static_cast<std::size_t>(spec_.horizon));
    trace.states.push_back(static_cast<std::int32_t>(s.x));
    if (spec_.game) {
      trace.opponent_states.reserve(static_cast<std::size_t>(spec_.horizon));
      trace.opponent_states.push_back(static_cast<std::int32_t>(s.y));
    }
  }
  auto next_cp = spec_.checkpoints.begin();
  Vector row;
  while (true) {
    try {
      if (next_cp != spec_.checkpoints.end() && *next_cp == s.n) {
        trace.checkpoints.push_back(checkpoint(s));
        ++next_cp;
      }
      if (s.n >= spec_.horizon) break;
      player_row(s, s.x, row);
      const Index x = sample_row(row, rng.uniform());
      Index y = -1;
      if (spec_.game) y = sample_row(opponent_law(s), rng.uniform());
      advance(s, x, y);
    } catch (const KernelError&) {
      throw;
    } catch (const Error& e) {
      throw KernelError(e.what(), s.n);
    }
    if (spec_.record_states) {
      trace.states.push_back(static_cast<std::int32_t>(s.x));
      if (spec_.game) trace.opponent_states.push_back(static_cast<std::int32_t>(s.y));
    }
  }
  trace.final_state = std::move(s);
  return trace;
}

ProcessTrace simulate(const ProcessSpec& spec) { return Simulator(spec).run(); }

std::vector<ProcessTrace> simulate_replicas(const ProcessSpec& spec, int replicas) {
  if (replicas < 1) throw ValidationError("need at least one replica");
  std::vector<std::future<ProcessTrace>> jobs;
  for (int i = 0; i < replicas; ++i) {
    ProcessSpec copy = spec;
    copy.seed = replica_seed(spec.seed, static_cast<std::uint64_t>(i));
    jobs.push_back(std::async(std::launch::async,
                              [c = std::move(copy)]() { return Simulator(c).run(); }));
  }
  std::vector<ProcessTrace> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

HypothesisReport hypothesis_report(const ProcessTrace& trace) {
  HypothesisReport rep;
  std::vector<const DiagnosticsRow*> good;
  for (const auto& c : trace.checkpoints) {
    rep.rows.push_back(c.diagnostics);
    if (c.diagnostics.resolved)
      good.push_back(&c.diagnostics);
    else
      ++rep.flagged_rows;
  }
  const std::size_t half = good.size() / 2;
  std::vector<long> ns;
  for (std::size_t i = half; i < good.size(); ++i) ns.push_back(good[i]->n);
  auto column = [&](double DiagnosticsRow::*field, std::size_t from, std::size_t to) {
    std::vector<double> out;
    for (std::size_t i = from; i < to; ++i) out.push_back(good[i]->*field);
    return out;
  };
  for (auto [name, field] : {std::pair{"hyp1_i", &DiagnosticsRow::hyp1_i},
                             std::pair{"q_step", &DiagnosticsRow::q_step},
                             std::pair{"pi_step", &DiagnosticsRow::pi_step},
                             std::pair{"hyp2", &DiagnosticsRow::hyp2}})
    rep.verdicts.push_back(decreasing_verdict(name, ns, column(field, half, good.size())));
  for (auto [name, field] : {std::pair{"prop34_ii", &DiagnosticsRow::prop34_ii},
                             std::pair{"prop34_iii", &DiagnosticsRow::prop34_iii}})
    rep.verdicts.push_back(bounded_verdict(name, ns, column(field, 0, half),
                                           column(field, half, good.size())));
  return rep;
}

std::vector<GapBoundRow> weighted_gap_bound(const ProcessTrace& trace) {
  std::vector<GapBoundRow> out;
  for (const auto& c : trace.checkpoints) out.push_back({c.n, c.weighted_gap, c.weighted_bound});
  return out;
}

void write_trace_csv(std::ostream& out, const ProcessTrace& trace) {
  const Index dv = trace.checkpoints.empty() ? trace.final_state.occ1.size()
                                             : trace.checkpoints.front().v.size();
  const Index dw = trace.final_state.w.size();
  out << "n,state";
  for (Index i = 0; i < dv; ++i) out << ",v" << i;
  for (Index i = 0; i < dw; ++i) out << ",w" << i;
  out << ",q_norm,q_step,pi_step,hyp1_i,prop34_ii,prop34_iii,hyp2,payoff_mean\n";
  const auto old = out.precision(17);
  for (const auto& c : trace.checkpoints) {
    out << c.n << ',' << c.state;
    for (Index i = 0; i < c.v.size(); ++i) out << ',' << c.v[i];
    for (Index i = 0; i < c.w.size(); ++i) out << ',' << c.w[i];
    const auto& d = c.diagnostics;
    out << ',' << d.q_norm << ',' << d.q_step << ',' << d.pi_step << ',' << d.hyp1_i << ','
        << d.prop34_ii << ',' << d.prop34_iii << ',' << d.hyp2 << ',' << c.payoff_mean << '\n';
  }
  out.precision(old);
}

}  // namespace selfint
