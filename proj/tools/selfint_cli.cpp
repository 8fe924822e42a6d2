#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "selfint/config.hpp"
#include "selfint/errors.hpp"
#include "selfint/experiments.hpp"
#include "selfint/spectral.hpp"
#include "selfint/text_io.hpp"

namespace fs = std::filesystem;
using namespace selfint;

namespace {

enum Exit { kOk = 0, kFail = 1, kConfigError = 2, kRuntimeError = 3 };

std::string join(const StateSpace& s, const std::vector<Index>& idx) {
  std::string out;
  for (Index i : idx) out += (out.empty() ? "" : ",") + s.label(i);
  return "{" + out + "}";
}

void print_vector(std::ostream& out, const std::string& name, const Vector& v) {
  out << name << ':';
  for (Index i = 0; i < v.size(); ++i) out << ' ' << v[i];
  out << '\n';
}

void analyze_chain(std::ostream& out, const StateSpace& space, const MarkovMatrix& m, int restarts,
                   int iters) {
  const auto dec = class_decomposition(m);
  for (std::size_t c = 0; c < dec.classes.size(); ++c)
    out << "class " << join(space, dec.classes[c]) << (dec.recurrent[c] ? " recurrent" : " transient")
        << '\n';
  if (!is_indecomposable(m)) {
    out << "decomposable: " << dec.recurrent_count()
        << " closed classes, invariant measure and Q are not unique\n";
    return;
  }
  const PseudoInverse q = pseudo_inverse(m);
  print_vector(out, "pi", q.invariant().values());
  out << "|Q|: " << sup_norm(q.matrix()) << '\n';
  if (!is_irreducible(m)) {
    out << "reducible: spectral quantities need an irreducible chain\n";
    return;
  }
  const DirichletData d = dirichlet_data(m);
  const auto sc = log_sobolev_search(m, d.pi, restarts, iters);
  out << "pi_star: " << d.pi_star << '\n';
  out << "lambda: " << sc.lambda << '\n';
  out << "alpha bracket: [" << sc.alpha_lower << ", " << sc.alpha_upper << "]";
  if (sc.alpha_numeric) out << " search: " << *sc.alpha_numeric << (sc.clamped ? " (clamped)" : "");
  out << '\n';
  const Matrix excess = q.matrix().cwiseAbs() - q_bound_spectral(m);
  out << "entrywise bound sqrt(pi(y)/pi(x))/lambda: max excess " << excess.maxCoeff()
      << (excess.maxCoeff() <= 1e-9 ? " (holds)" : " (VIOLATED)") << '\n';
  out << "uniform bound: " << q_bound_uniform(m) << '\n';
}

void analyze_landscape(std::ostream& out, const StateSpace& space, const Landscape& l, int restarts,
                       int iters) {
  const double barrier = energy_barrier(l);
  print_vector(out, "U", l.potential());
  out << "argmin U: " << join(space, argmin_set(l.potential())) << '\n';
  out << "energy barrier: " << barrier << '\n';
  const double a = admissible_A(barrier);
  out << "admissible A: ";
  if (std::isinf(a))
    out << "unrestricted\n";
  else
    out << a << '\n';
  out << "exploration matrix:\n";
  analyze_chain(out, space, l.exploration(), restarts, iters);
}

void analyze_game(std::ostream& out, const LabeledGame& g) {
  const auto& game = g.game;
  out << "actions1: " << g.actions1.size() << "  actions2: " << g.actions2.size() << '\n';
  out << "zero_sum: " << (game.is_zero_sum() ? "yes" : "no")
      << "  potential: " << (game.is_potential() ? "yes" : "no") << '\n';
  for (const auto& e : nash_equilibria(game)) {
    out << "equilibrium:";
    for (Index i = 0; i < e.v1.size(); ++i) out << ' ' << e.v1[i];
    out << " |";
    for (Index i = 0; i < e.v2.size(); ++i) out << ' ' << e.v2[i];
    out << "  payoffs " << mixed_payoff(game, e.v1, e.v2, 1) << ' ' << mixed_payoff(game, e.v1, e.v2, 2)
        << '\n';
  }
  if (game.is_zero_sum()) out << "value: " << zero_sum_value(game).value << '\n';
  const auto complete = [](Index n) {
    return MarkovMatrix(Matrix::Constant(n, n, 1.0 / static_cast<double>(n)));
  };
  out << "barrier player 1 (complete exploration): "
      << game_barrier(game.payoff(1), complete(game.actions(1))) << '\n';
  out << "barrier player 2 (complete exploration): "
      << game_barrier(game.payoff(2).transpose(), complete(game.actions(2))) << '\n';
}

std::vector<double> parse_grid(const std::string& spec) {
  double lo, hi, step;
  char c1, c2;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0) || hi < lo)
    throw ParseError("--betas expects lo:hi:step", 0);
  std::vector<double> out;
  for (double b = lo; b <= hi + 1e-9 * step; b += step) out.push_back(b);
  return out;
}

void beta_sweep(std::ostream& out, const Landscape& l, const std::vector<double>& grid) {
  out << "beta,lambda,alpha_lower,alpha_upper,q_uniform_bound\n";
  out.precision(17);
  for (double beta : grid) {
    const auto s = annealing_spectrum(l.exploration(), l.potential(), beta);
    if (!s) {
      out << beta << ",nan,nan,nan,nan\n";
      continue;
    }
    const double lambda = std::exp(s->log_lambda);
    const double pi_star = std::exp(s->log_pi_star);
    const auto bracket = log_sobolev_bracket(lambda, pi_star);
    out << beta << ',' << lambda << ',' << bracket.lower << ',' << bracket.upper << ','
        << q_bound_uniform(lambda, pi_star) << '\n';
  }
}

int cmd_analyze(const std::string& file, const std::string& csv, const std::string& betas,
                int restarts, int iters) {
  const ParsedFile parsed = read_any(file);
  std::cout.precision(12);
  if (const auto* c = std::get_if<LabeledChain>(&parsed)) {
    if (!csv.empty()) throw ParseError("--csv needs a landscape file", 0);
    analyze_chain(std::cout, c->space, c->chain, restarts, iters);
  } else if (const auto* l = std::get_if<LabeledLandscape>(&parsed)) {
    analyze_landscape(std::cout, l->space, l->landscape, restarts, iters);
    if (!csv.empty()) {
      std::ofstream f(csv);
      if (!f) throw ParseError("cannot write '" + csv + "'", 0);
      beta_sweep(f, l->landscape, parse_grid(betas));
    }
  } else {
    if (!csv.empty()) throw ParseError("--csv needs a landscape file", 0);
    analyze_game(std::cout, std::get<LabeledGame>(parsed));
  }
  return kOk;
}

int cmd_run(const std::string& file, const std::string& output) {
  ExperimentConfig cfg = ExperimentConfig::load(file);
  if (!output.empty()) cfg.set("run.output", fs::absolute(output).string());
  const RegistryEntry& entry = find_experiment(cfg.name());
  // Validate everything the run reads before producing any artifact.
  cfg.horizon(1);
  cfg.replicas();
  cfg.seed();
  const auto result = entry.run(cfg);
  const fs::path dir = cfg.output();
  const auto outcomes = write_artifacts(entry, result, dir);
  write_verdict(std::cout, entry, outcomes);
  std::cout << "artifacts: " << dir.string() << '\n';
  return all_pass(outcomes) ? kOk : kFail;
}

int cmd_report(const std::string& dir) {
  const LoadedSummary s = read_summary_csv(fs::path(dir) / "summary.csv");
  const RegistryEntry& entry = find_experiment(s.experiment);
  std::cout << "statistic,mean,sd,count\n";
  std::cout.precision(12);
  for (const auto& r : s.rows) std::cout << r.statistic << ',' << r.mean << ',' << r.sd << ',' << r.count << '\n';
  const auto outcomes = evaluate_rules(entry.rules, s.rows);
  write_verdict(std::cout, entry, outcomes);
  return all_pass(outcomes) ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-interacting Markov process experiments"};
  app.require_subcommand(1);

  std::string file, csv, betas = "0:40:2";
  int restarts = 8, iters = 400;
  auto* analyze = app.add_subcommand("analyze", "Report pi, |Q|, lambda, alpha bracket and bounds of a file");
  analyze->add_option("file", file, "matrix, landscape or game file")->required();
  analyze->add_option("--csv", csv, "write a beta sweep (landscapes only)");
  analyze->add_option("--betas", betas, "beta grid lo:hi:step for --csv");
  analyze->add_option("--restarts", restarts, "log-Sobolev search restarts");
  analyze->add_option("--iters", iters, "log-Sobolev search iterations per restart");

  std::string config, output;
  auto* run = app.add_subcommand("run", "Run a registered experiment from a config file");
  run->add_option("config", config, "experiment config (INI)")->required();
  run->add_option("--output", output, "override [run] output");

  std::string dir;
  auto* report = app.add_subcommand("report", "Re-evaluate the verdict of a run directory");
  report->add_option("dir", dir, "run output directory")->required();

  auto* list = app.add_subcommand("list", "List registered experiments");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*analyze) return cmd_analyze(file, csv, betas, restarts, iters);
    if (*run) return cmd_run(config, output);
    if (*report) return cmd_report(dir);
    if (*list) {
      for (const auto& e : registry()) std::cout << e.criterion << ' ' << e.name << ": " << e.target << '\n';
      return kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
