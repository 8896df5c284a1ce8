// Command-line front end: solve, monitor, experiment, bounds, check.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "vdpf/bounds.hpp"
#include "vdpf/errors.hpp"
#include "vdpf/filter.hpp"
#include "vdpf/harness.hpp"
#include "vdpf/pomdp_format.hpp"
#include "vdpf/text.hpp"
#include "vdpf/valuefn.hpp"

using namespace vdpf;

namespace {

// Every config key doubles as a --flag; flags override the config file.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value experiment file")->check(CLI::ExistingFile);
    for (const auto& key : config_keys()) app->add_option("--" + key, values[key], "config key " + key);
  }

  ExperimentConfig build(CLI::App* app) const {
    ExperimentConfig config;
    if (!config_path.empty()) config = parse_config(read_file(config_path), config);
    for (const auto& key : config_keys())
      if (app->count("--" + key) > 0) set_config_value(config, key, values.at(key));
    return config;
  }
};

std::string show(double x) { return format_double(x); }

int run_solve(const std::string& model_path, std::optional<std::size_t> horizon, std::optional<double> tolerance,
              const std::string& prune, const std::string& mode, std::size_t cap, const std::string& out) {
  if (horizon.has_value() == tolerance.has_value())
    throw ConfigError("solve needs exactly one of --horizon and --tolerance");
  const Pomdp model = load_pomdp(model_path);
  const Prune p = prune == "none" ? Prune::none : prune == "pointwise" ? Prune::pointwise : Prune::lp;
  const SolveMode m = mode == "min" ? SolveMode::minimize : SolveMode::maximize;
  std::optional<AlphaSet> set;
  if (horizon) {
    set = solve(model, {.horizon = *horizon, .mode = m, .prune = p, .vector_cap = cap});
  } else {
    StationaryOptions opts;
    opts.mode = m;
    opts.prune = p;
    opts.tolerance = *tolerance;
    opts.vector_cap = cap;
    set = solve_stationary(model, opts);
  }
  const std::string text = write_alpha(*set);
  if (out.empty()) std::cout << text;
  else write_file(out, text);
  std::cerr << set->size() << " vectors\n";
  return 0;
}

int run_monitor(const ExperimentConfig& config, std::size_t trial) {
  config.validate();
  const Pomdp model = load_pomdp(config.model_path);
  const Schedules schedules = prepare_schedules(model, config);
  CellConfig cell;
  cell.policy = config.policies.front();
  cell.particles = config.particles.front();
  cell.plan = config.plan;
  cell.plan.max_batches = config.batches.front();
  if (config.stop_at_two_epsilon) cell.plan.stop_threshold = 2.0 * cell.plan.epsilon;
  cell.stages = config.stages;
  cell.single_stage = config.single_stage;
  cell.random_fixed = config.random_fixed;
  cell.initial = config.initial;
  cell.resampling = config.resampling;
  const TrialRecord rec = run_trial(model, schedules.values, schedules.worst ? &*schedules.worst : nullptr, cell,
                                    config.seed, trial);
  std::cout << "policy " << to_string(cell.policy) << "\ninitial";
  for (double x : rec.initial_belief) std::cout << ' ' << show(x);
  std::cout << "\noptimal_value " << show(rec.optimal_value) << '\n';
  std::cout << "stage action observation reward samples batches tau epsilon depleted\n";
  for (std::size_t t = 0; t < rec.stages.size(); ++t) {
    const auto& s = rec.stages[t];
    std::cout << t << ' ' << model.action_name(s.action) << ' ' << model.observation_name(s.observation) << ' '
              << show(s.reward) << ' ' << s.samples << ' ' << s.batches << ' ' << (s.tau ? show(*s.tau) : "-") << ' '
              << (s.epsilon ? show(*s.epsilon) : "-") << ' ' << (s.depleted ? "yes" : "no") << '\n';
  }
  std::cout << "discounted_return " << show(rec.discounted_return) << "\nloss " << show(rec.loss) << '\n';
  return 0;
}

int run_experiment_command(const ExperimentConfig& config) {
  config.validate();
  ExperimentConfig quiet = config;
  quiet.output_path.reset();
  const ExperimentResult result = run_experiment(quiet);
  const std::string csv = results_csv(result, config.seed);
  if (config.output_path) {
    write_file(*config.output_path, csv);
    write_summary(std::cout, result);
  } else {
    std::cout << csv;
    write_summary(std::cerr, result);
  }
  return 0;
}

struct BoundArgs {
  std::optional<double> range, epsilon, delta, h, beta, tau;
  std::optional<std::size_t> n, vectors, batches, t, k;
};

int run_bounds(const BoundArgs& a) {
  auto need = [](const auto& v, const char* name) {
    if (!v) throw ConfigError(std::string("bounds needs --") + name);
    return *v;
  };
  const double delta = need(a.delta, "delta");
  if (a.range && a.n) std::cout << "epsilon_bound " << show(epsilon_bound(*a.range, delta, *a.n)) << '\n';
  if (a.range && a.epsilon) {
    std::cout << "sample_size " << sample_size(*a.range, *a.epsilon, delta) << '\n';
    if (a.vectors)
      std::cout << "simultaneous_sample_size " << sample_size(*a.range, *a.epsilon, delta / *a.vectors) << '\n';
    if (a.vectors && a.batches)
      std::cout << "batch_size " << formula_batch_size(*a.range, *a.epsilon, *a.batches, *a.vectors, delta) << '\n';
  }
  if (a.h && a.beta) {
    const double h = *a.h, beta = *a.beta;
    const std::size_t t = a.t.value_or(0);
    if (a.epsilon) {
      const BoundInputs in{.epsilon = *a.epsilon, .delta = delta, .h = h, .beta = beta, .t = t, .k = a.k.value_or(0)};
      std::cout << "one_stage_bound " << show(one_stage_bound(in)) << '\n';
      std::cout << "approx_multistage_bound " << show(approx_multistage_bound(*a.epsilon, h, beta, delta)) << '\n';
      if (a.k)
        std::cout << "posthoc_multistage_bound " << show(posthoc_multistage_bound(h, beta, delta, *a.epsilon, t, *a.k))
                  << '\n';
    }
    if (a.tau) std::cout << "posthoc_one_stage_bound " << show(posthoc_one_stage_bound(*a.tau, delta, h, beta, t)) << '\n';
    std::cout << "multistage_bound " << show(multistage_bound(h, beta, delta)) << '\n';
  }
  return 0;
}

int run_check(const ExperimentConfig& config, std::size_t pairs, std::size_t depth, std::size_t rollouts) {
  if (config.model_path.empty()) throw ConfigError("model path is required");
  const Pomdp model = load_pomdp(config.model_path);
  const Schedules schedules = prepare_schedules(model, config);
  Rng rng = Rng::stream(config.seed, 0, 7);

  const Fact1Report f = fact1_check(model, schedules.values, {.pairs = pairs, .depth = depth}, rng);
  std::cout << "fact1 policy_pairs " << f.policy_pairs << " policy_violations " << f.policy_violations
            << " random_pairs " << f.random_pairs << " random_violations " << f.random_violations << " skipped "
            << f.skipped << '\n';

  // Filter diagnostics: distance to the exact filter along random-action rollouts.
  const std::size_t ns = model.num_states();
  std::cout << "filter particles mean_tv_sis mean_tv_ei mean_ess_sis depletions\n";
  for (std::size_t n : config.particles) {
    double tv_sis = 0.0, tv_ei = 0.0, ess = 0.0;
    std::size_t steps = 0, depletions = 0;
    for (std::size_t r = 0; r < rollouts; ++r) {
      Rng env = Rng::stream(config.seed, r, 8), prng = Rng::stream(config.seed, r, 9);
      Belief exact = sample_uniform_belief(ns, env);
      std::size_t s = sample_state(exact, env);
      ParticleSet sis = ParticleSet::sample(exact, n, prng), ei = sis;
      for (std::size_t t = 0; t < config.stages; ++t) {
        const std::size_t a = env.below(model.num_actions());
        const StepOutcome step = simulate_step(model, s, a, env);
        s = step.next_state;
        exact = belief_update(model, exact, a, step.observation);
        try {
          sis = sis_step(model, sis, a, step.observation, n, prng);
        } catch (const ImpossibleEvidence&) {
          sis = ParticleSet::exact(exact);
          ++depletions;
        }
        try {
          ei = ei_step(model, ei, a, step.observation, n, prng);
        } catch (const ImpossibleEvidence&) {
          ei = ParticleSet::exact(exact);
          ++depletions;
        }
        tv_sis += total_variation(to_belief(sis, ns).probs(), exact.probs());
        tv_ei += total_variation(to_belief(ei, ns).probs(), exact.probs());
        ess += effective_sample_size(sis);
        ++steps;
      }
    }
    const double d = steps ? static_cast<double>(steps) : 1.0;
    std::cout << "filter " << n << ' ' << show(tv_sis / d) << ' ' << show(tv_ei / d) << ' ' << show(ess / d) << ' '
              << depletions << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"value-directed particle filtering for POMDPs"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "solve a model and write its alpha vectors");
  std::string model_path, prune = "lp", mode = "max", out;
  std::optional<std::size_t> horizon;
  std::optional<double> tolerance;
  std::size_t cap = 1'000'000;
  solve_cmd->add_option("model", model_path, ".pomdp file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--horizon", horizon, "finite horizon");
  solve_cmd->add_option("--tolerance", tolerance, "value-iteration tolerance for a stationary set");
  solve_cmd->add_option("--prune", prune)->check(CLI::IsMember({"none", "pointwise", "lp"}));
  solve_cmd->add_option("--mode", mode)->check(CLI::IsMember({"max", "min"}));
  solve_cmd->add_option("--cap", cap, "largest cross-sum allowed before pruning");
  solve_cmd->add_option("-o,--out", out, "alpha file to write (default stdout)");

  ConfigFlags monitor_flags, experiment_flags, check_flags;
  auto* monitor_cmd = app.add_subcommand("monitor", "trace one episode of the first configured policy");
  monitor_flags.attach(monitor_cmd);
  std::size_t trial = 0;
  monitor_cmd->add_option("--trial", trial, "trial index (selects the random streams)");

  auto* experiment_cmd = app.add_subcommand("experiment", "run the configured grid and write a CSV");
  experiment_flags.attach(experiment_cmd);

  auto* bounds_cmd = app.add_subcommand("bounds", "sample sizes and decision-quality bounds");
  BoundArgs b;
  bounds_cmd->add_option("--range", b.range, "value range R of an alpha-vector");
  bounds_cmd->add_option("--epsilon", b.epsilon);
  bounds_cmd->add_option("--delta", b.delta)->required();
  bounds_cmd->add_option("--n", b.n, "sample count for epsilon_bound");
  bounds_cmd->add_option("--vectors", b.vectors, "number of alpha-vectors");
  bounds_cmd->add_option("--batches", b.batches, "batch limit B");
  bounds_cmd->add_option("--hbound", b.h, "bound on the loss of arbitrary behaviour");
  bounds_cmd->add_option("--beta", b.beta, "discount");
  bounds_cmd->add_option("--stage", b.t, "stage t of the first approximation");
  bounds_cmd->add_option("--offset", b.k, "offset to the second unseparated stage");
  bounds_cmd->add_option("--tau", b.tau, "observed separation");

  auto* check_cmd = app.add_subcommand("check", "audit the maximizing-vector fact and the filters");
  check_flags.attach(check_cmd);
  std::size_t pairs = 1000, depth = 3, rollouts = 200;
  check_cmd->add_option("--pairs", pairs);
  check_cmd->add_option("--depth", depth);
  check_cmd->add_option("--rollouts", rollouts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return run_solve(model_path, horizon, tolerance, prune, mode, cap, out);
    if (*monitor_cmd) return run_monitor(monitor_flags.build(monitor_cmd), trial);
    if (*experiment_cmd) return run_experiment_command(experiment_flags.build(experiment_cmd));
    if (*bounds_cmd) return run_bounds(b);
    if (*check_cmd) return run_check(check_flags.build(check_cmd), pairs, depth, rollouts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
