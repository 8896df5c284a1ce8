#include "vdpf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "vdpf/bounds.hpp"
#include "vdpf/errors.hpp"
#include "vdpf/pomdp_format.hpp"
#include "vdpf/text.hpp"

namespace vdpf {

namespace {

// Above this many states the exact filter is considered unaffordable for depletion recovery.
constexpr std::size_t kExactFilterLimit = 4096;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ',' || s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ',' && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
}

std::size_t to_count(std::string_view key, std::string_view value) {
  const auto v = parse_unsigned(value);
  if (!v) bad_value(key, value);
  return static_cast<std::size_t>(*v);
}

double to_real(std::string_view key, std::string_view value) {
  const auto v = parse_double(value);
  if (!v) bad_value(key, value);
  return *v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  bad_value(key, value);
}

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

std::size_t action_at(const AlphaSet& set, const Belief& b) { return set[value_and_ma(set, b).id].action; }

ParticleSet recover(const Pomdp& model, const ParticleSet& previous, std::size_t a, std::size_t o,
                    const Belief& exact) {
  const std::size_t n = model.num_states();
  if (n > kExactFilterLimit) return ParticleSet::exact(Belief::uniform(n));
  try {
    return ParticleSet::exact(belief_update(model, to_belief(previous, n), a, o));
  } catch (const ImpossibleEvidence&) {
    // The particle belief rules the observation out entirely; fall back to the true history.
    return ParticleSet::exact(exact);
  }
}

std::string batches_text(const std::optional<std::size_t>& b) { return b ? std::to_string(*b) : "unbounded"; }

}  // namespace

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::exact: return "exact";
    case Policy::pf_sis: return "pf_sis";
    case Policy::pf_ei: return "pf_ei";
    case Policy::pf_dynamic: return "pf_dynamic";
    case Policy::random: return "random";
    case Policy::worst: return "worst";
  }
  return "?";
}

Policy parse_policy(std::string_view name) {
  for (Policy p : {Policy::exact, Policy::pf_sis, Policy::pf_ei, Policy::pf_dynamic, Policy::random, Policy::worst})
    if (to_string(p) == name) return p;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

ValueSchedule ValueSchedule::finite(std::vector<AlphaSet> by_steps_to_go) {
  if (by_steps_to_go.empty()) throw DomainError("finite schedule needs at least one set");
  return ValueSchedule(std::move(by_steps_to_go), false);
}

ValueSchedule ValueSchedule::stationary(AlphaSet set) {
  std::vector<AlphaSet> sets;
  sets.push_back(std::move(set));
  return ValueSchedule(std::move(sets), true);
}

const AlphaSet& ValueSchedule::at(std::size_t steps_to_go) const {
  if (stationary_) return sets_.front();
  if (steps_to_go == 0 || steps_to_go > sets_.size()) throw DomainError("no value function for that many steps");
  return sets_[steps_to_go - 1];
}

double ValueSchedule::value(std::size_t steps_to_go, const Belief& b) const {
  if (!stationary_ && steps_to_go == 0) return 0.0;
  return value_and_ma(at(steps_to_go), b).value;
}

// ---------------------------------------------------------------------------
// Configuration

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "model",   "alpha",      "worst_alpha", "solve",      "horizon",      "prune",   "tolerance",
      "cap",     "policies",   "particles",   "batches",    "epsilon",      "delta",   "batch_size",
      "schedule", "stop",      "look_limit",  "resampling", "trials",       "stages",  "seed",
      "single_stage", "random_fixed", "initial", "threads", "output"};
  return keys;
}

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "model") {
    c.model_path = value;
  } else if (key == "alpha") {
    c.alpha_path = std::string(value);
  } else if (key == "worst_alpha") {
    c.worst_alpha_path = std::string(value);
  } else if (key == "solve") {
    if (value == "finite") c.stationary = false;
    else if (value == "stationary") c.stationary = true;
    else bad_value(key, value);
  } else if (key == "horizon") {
    c.horizon = to_count(key, value);
  } else if (key == "prune") {
    if (value == "none") c.prune = Prune::none;
    else if (value == "pointwise") c.prune = Prune::pointwise;
    else if (value == "lp") c.prune = Prune::lp;
    else bad_value(key, value);
  } else if (key == "tolerance") {
    c.tolerance = to_real(key, value);
  } else if (key == "cap") {
    c.vector_cap = to_count(key, value);
  } else if (key == "policies" || key == "policy") {
    c.policies.clear();
    for (auto p : split_list(value)) c.policies.push_back(parse_policy(p));
  } else if (key == "particles") {
    c.particles.clear();
    for (auto p : split_list(value)) c.particles.push_back(to_count(key, p));
  } else if (key == "batches") {
    c.batches.clear();
    for (auto b : split_list(value)) {
      if (b == "unbounded") c.batches.push_back(std::nullopt);
      else c.batches.push_back(to_count(key, b));
    }
  } else if (key == "epsilon") {
    c.plan.epsilon = to_real(key, value);
  } else if (key == "delta") {
    c.plan.delta = to_real(key, value);
  } else if (key == "batch_size") {
    if (value == "formula") c.plan.batch_size.reset();
    else c.plan.batch_size = to_count(key, value);
  } else if (key == "schedule") {
    if (value == "uniform") c.plan.schedule = DeltaSchedule::uniform;
    else if (value == "harmonic") c.plan.schedule = DeltaSchedule::harmonic;
    else bad_value(key, value);
  } else if (key == "stop") {
    if (value == "2eps") {
      c.stop_at_two_epsilon = true;
    } else {
      c.stop_at_two_epsilon = false;
      c.plan.stop_threshold = value == "optimal" ? 0.0 : to_real(key, value);
    }
  } else if (key == "look_limit") {
    c.plan.look_limit = to_count(key, value);
  } else if (key == "resampling") {
    if (value == "multinomial") c.resampling = Resampling::multinomial;
    else if (value == "systematic") c.resampling = Resampling::systematic;
    else bad_value(key, value);
  } else if (key == "trials") {
    c.trials = to_count(key, value);
  } else if (key == "stages") {
    c.stages = to_count(key, value);
  } else if (key == "seed") {
    const auto v = parse_unsigned(value);
    if (!v) bad_value(key, value);
    c.seed = *v;
  } else if (key == "single_stage") {
    c.single_stage = to_bool(key, value);
  } else if (key == "random_fixed") {
    c.random_fixed = to_bool(key, value);
  } else if (key == "initial") {
    if (value == "dirichlet") c.initial = InitialBelief::dirichlet;
    else if (value == "start") c.initial = InitialBelief::start;
    else bad_value(key, value);
  } else if (key == "threads") {
    c.threads = to_count(key, value);
  } else if (key == "output") {
    c.output_path = std::string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig config) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    set_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return config;
}

void ExperimentConfig::validate() const {
  if (model_path.empty()) throw ConfigError("model path is required");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (stages < 1) throw ConfigError("stages must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (policies.empty()) throw ConfigError("at least one policy is required");
  if (particles.empty()) throw ConfigError("at least one particle count is required");
  if (batches.empty()) throw ConfigError("at least one batch limit is required");
  for (auto n : particles)
    if (n < 1) throw ConfigError("particle counts must be at least 1");
  if (alpha_path && (horizon || stationary)) throw ConfigError("alpha file and solve parameters are exclusive");
  if (horizon && *horizon < stages) throw ConfigError("solve horizon must cover every stage");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (!(plan.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(plan.delta > 0.0 && plan.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (std::find(policies.begin(), policies.end(), Policy::pf_dynamic) != policies.end()) {
    for (const auto& b : batches) {
      SamplingPlan p = plan;
      p.max_batches = b;
      if (stop_at_two_epsilon) p.stop_threshold = 2.0 * p.epsilon;
      try {
        p.validate();
      } catch (const DomainError& e) {
        throw ConfigError(std::string("sampling plan with batches = ") + batches_text(b) + ": " + e.what());
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Trials

TrialRecord run_trial(const Pomdp& model, const ValueSchedule& values, const ValueSchedule* worst,
                      const CellConfig& cell, std::uint64_t seed, std::size_t trial) {
  const std::size_t ns = model.num_states();
  const std::size_t horizon = values.is_stationary() ? cell.stages : values.horizon();
  if (horizon < cell.stages) throw ConfigError("value schedule is shorter than the episode");
  if (cell.policy == Policy::worst && !worst) throw ConfigError("worst policy needs a minimize-mode schedule");
  if (worst && !worst->is_stationary() && worst->horizon() < horizon)
    throw ConfigError("worst schedule is shorter than the value schedule");

  Rng init = Rng::stream(seed, trial, 0);
  Rng env = Rng::stream(seed, trial, 1);
  Rng policy_rng = Rng::stream(seed, trial, 2);

  Belief b0 = Belief::uniform(ns);
  if (cell.initial == InitialBelief::start) {
    if (!model.start()) throw ConfigError("model has no start belief");
    b0 = *model.start();
  } else {
    b0 = sample_uniform_belief(ns, init);
  }
  std::size_t state = sample_state(b0, init);

  TrialRecord rec;
  rec.trial = trial;
  rec.initial_belief.assign(b0.probs().begin(), b0.probs().end());
  rec.optimal_value = values.value(horizon, b0);

  Belief exact = b0;
  std::optional<ParticleSet> particles;
  std::size_t chosen = 0;  // dynamic selector's vector at the current stage
  std::optional<Belief> fixed_random;
  std::size_t last_action = 0, last_observation = 0;
  double discount = 1.0;
  CompensatedSum ret;
  std::size_t dynamic_stages = 0, batches_total = 0;

  for (std::size_t t = 0; t < cell.stages; ++t) {
    const std::size_t steps = horizon - t;
    const AlphaSet& set = values.at(steps);
    const bool approximate = !cell.single_stage || t == 0;
    StageLog log;

    std::size_t action = 0;
    if (!approximate || cell.policy == Policy::exact) {
      action = action_at(set, exact);
    } else {
      switch (cell.policy) {
        case Policy::exact: break;
        case Policy::worst: action = action_at(worst->at(steps), exact); break;
        case Policy::random: {
          if (cell.random_fixed) {
            if (!fixed_random) fixed_random = sample_uniform_belief(ns, policy_rng);
            action = action_at(set, *fixed_random);
          } else {
            action = action_at(set, sample_uniform_belief(ns, policy_rng));
          }
          break;
        }
        case Policy::pf_sis:
        case Policy::pf_ei: {
          const std::size_t n = cell.particles;
          if (t == 0) {
            particles = ParticleSet::sample(b0, n, policy_rng);
          } else {
            try {
              particles = cell.policy == Policy::pf_sis
                              ? sis_step(model, *particles, last_action, last_observation, n, policy_rng)
                              : ei_step(model, *particles, last_action, last_observation, n, policy_rng,
                                        cell.resampling);
            } catch (const ImpossibleEvidence&) {
              particles = recover(model, *particles, last_action, last_observation, exact);
              log.depleted = true;
            }
          }
          if (!log.depleted) log.samples = n;
          log.epsilon = report_2epsilon(set, n, cell.plan.delta) / 2.0;
          action = action_at(set, to_belief(*particles, ns));
          break;
        }
        case Policy::pf_dynamic: {
          try {
            std::optional<Selection> sel;
            if (t == 0) {
              const ParticleSet prior = ParticleSet::exact(b0);
              const ParticleSampler sampler(prior);
              sel.emplace(dynamic_select([&](Rng& r) { return sampler.draw_state(r); }, set, cell.plan, policy_rng));
            } else {
              sel.emplace(dynamic_select(model, *particles, last_action, last_observation, set, cell.plan,
                                         policy_rng));
            }
            chosen = sel->report.chosen;
            log.tau = sel->report.tau;
            log.samples = sel->report.samples_used;
            log.batches = sel->report.batches_used;
            ++dynamic_stages;
            batches_total += log.batches;
            particles = std::move(sel->particles);
          } catch (const ImpossibleEvidence&) {
            particles = recover(model, *particles, last_action, last_observation, exact);
            chosen = value_and_ma(set, to_belief(*particles, ns)).id;
            log.depleted = true;
          }
          action = set[chosen].action;
          break;
        }
      }
    }

    const StepOutcome step = simulate_step(model, state, action, env);
    ret.add(discount * step.reward);
    discount *= model.discount();
    exact = belief_update(model, exact, action, step.observation);
    state = step.next_state;
    last_action = action;
    last_observation = step.observation;

    log.action = action;
    log.observation = step.observation;
    log.reward = step.reward;
    rec.samples_total += log.samples;
    rec.depletions += log.depleted;
    rec.stages.push_back(log);
  }

  const double terminal = values.value(horizon - cell.stages, exact);
  rec.discounted_return = ret.value() + discount * terminal;
  rec.loss = rec.optimal_value - rec.discounted_return;
  rec.batches_mean = dynamic_stages ? static_cast<double>(batches_total) / static_cast<double>(dynamic_stages) : 0.0;
  return rec;
}

double report_2epsilon(const AlphaSet& set, std::size_t n, double delta) {
  const double per_vector = delta / static_cast<double>(set.size());
  double eps = 0.0;
  for (const auto& a : set) eps = std::max(eps, epsilon_bound(alpha_range(a), per_vector, n));
  return 2.0 * eps;
}

// ---------------------------------------------------------------------------
// Experiments

Schedules prepare_schedules(const Pomdp& model, const ExperimentConfig& config) {
  const bool need_worst =
      std::find(config.policies.begin(), config.policies.end(), Policy::worst) != config.policies.end();
  auto load = [&](const std::string& path, SolveMode mode) {
    AlphaSet set = parse_alpha(read_file(path), mode);
    if (set.num_states() != model.num_states())
      throw ConfigError("alpha file " + path + " does not match the model's state count");
    return ValueSchedule::stationary(std::move(set));
  };
  auto solve_schedule = [&](SolveMode mode, bool stationary) {
    if (stationary) {
      StationaryOptions opts;
      opts.mode = mode;
      opts.prune = config.prune;
      opts.tolerance = config.tolerance;
      opts.vector_cap = config.vector_cap;
      return ValueSchedule::stationary(solve_stationary(model, opts));
    }
    SolveOptions opts;
    opts.horizon = config.horizon.value_or(config.stages);
    opts.mode = mode;
    opts.prune = config.prune;
    opts.vector_cap = config.vector_cap;
    return ValueSchedule::finite(solve_sequence(model, opts));
  };

  Schedules out{config.alpha_path ? load(*config.alpha_path, SolveMode::maximize)
                                  : solve_schedule(SolveMode::maximize, config.stationary),
                std::nullopt};
  if (need_worst) {
    if (config.worst_alpha_path) out.worst = load(*config.worst_alpha_path, SolveMode::minimize);
    else out.worst = solve_schedule(SolveMode::minimize, out.values.is_stationary());
  }
  return out;
}

ExperimentResult run_experiment(const Pomdp& model, const Schedules& schedules, const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  for (Policy p : config.policies)
    for (std::size_t n : config.particles)
      for (const auto& b : config.batches) {
        CellConfig cell;
        cell.policy = p;
        cell.particles = n;
        cell.plan = config.plan;
        cell.plan.max_batches = b;
        if (config.stop_at_two_epsilon) cell.plan.stop_threshold = 2.0 * cell.plan.epsilon;
        cell.stages = config.stages;
        cell.single_stage = config.single_stage;
        cell.random_fixed = config.random_fixed;
        cell.initial = config.initial;
        cell.resampling = config.resampling;
        result.cells.push_back(cell);
      }

  const ValueSchedule* worst = schedules.worst ? &*schedules.worst : nullptr;
  const std::size_t top = schedules.values.is_stationary() ? 1 : schedules.values.horizon();
  const AlphaSet& first_set = schedules.values.at(top);

  for (const auto& cell : result.cells) {
    std::vector<TrialRecord> records(config.trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (std::size_t i = next++; i < config.trials; i = next++) {
        try {
          records[i] = run_trial(model, schedules.values, worst, cell, config.seed, i);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = config.trials;
        }
      }
    };
    const std::size_t nthreads = std::min(config.threads, config.trials);
    if (nthreads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    CompensatedSum loss, loss_sq, samples, batches, depletions;
    for (const auto& r : records) {
      loss.add(r.loss);
      samples.add(static_cast<double>(r.samples_total));
      batches.add(r.batches_mean);
      depletions.add(static_cast<double>(r.depletions));
    }
    const double n = static_cast<double>(records.size());
    const double mean = loss.value() / n;
    for (const auto& r : records) loss_sq.add((r.loss - mean) * (r.loss - mean));
    const double se = records.size() > 1 ? std::sqrt(loss_sq.value() / (n - 1.0) / n) : 0.0;
    const bool fixed_n = cell.policy == Policy::pf_sis || cell.policy == Policy::pf_ei;
    result.summaries.push_back({cell.policy, cell.particles, cell.plan.max_batches, records.size(), mean, se,
                                samples.value() / n, batches.value() / n, depletions.value() / n,
                                fixed_n ? report_2epsilon(first_set, cell.particles, config.plan.delta)
                                        : std::numeric_limits<double>::quiet_NaN()});
    result.records.push_back(std::move(records));
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Pomdp model = load_pomdp(config.model_path);
  const Schedules schedules = prepare_schedules(model, config);
  ExperimentResult result = run_experiment(model, schedules, config);
  if (config.output_path) write_file(*config.output_path, results_csv(result, config.seed));
  return result;
}

std::string csv_header() {
  return "trial,policy,particles,batches_limit,stage_count,loss,samples_total,batches_mean,depletions,seed";
}

std::string results_csv(const ExperimentResult& result, std::uint64_t seed) {
  std::string out = csv_header() + "\n";
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto& cell = result.cells[c];
    for (const auto& r : result.records[c]) {
      out += std::to_string(r.trial);
      out += ',';
      out += to_string(cell.policy);
      out += ',' + std::to_string(cell.particles);
      out += ',' + batches_text(cell.plan.max_batches);
      out += ',' + std::to_string(r.stages.size());
      out += ',' + format_double(r.loss);
      out += ',' + std::to_string(r.samples_total);
      out += ',' + format_double(r.batches_mean);
      out += ',' + std::to_string(r.depletions);
      out += ',' + std::to_string(seed);
      out += '\n';
    }
  }
  return out;
}

void write_summary(std::ostream& out, const ExperimentResult& result) {
  out << "policy particles batches trials mean_loss stderr mean_samples mean_batches depletions two_epsilon\n";
  for (const auto& s : result.summaries) {
    out << to_string(s.policy) << ' ' << s.particles << ' ' << batches_text(s.batches) << ' ' << s.trials << ' '
        << format_double(s.mean_loss) << ' ' << format_double(s.loss_stderr) << ' ' << format_double(s.mean_samples)
        << ' ' << format_double(s.mean_batches) << ' ' << format_double(s.depletion_rate) << ' '
        << (std::isnan(s.two_epsilon) ? std::string("-") : format_double(s.two_epsilon)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Fact 1 audit

Fact1Report fact1_check(const Pomdp& model, const ValueSchedule& values, const Fact1Options& options, Rng& rng) {
  const std::size_t ns = model.num_states();
  const std::size_t nz = model.num_observations();
  const std::size_t horizon = values.is_stationary() ? options.depth + 1 : values.horizon();
  const std::size_t depth = std::min(options.depth, horizon - 1);
  const AlphaSet& top = values.at(horizon);
  Fact1Report report;

  std::vector<double> weights(nz);
  for (std::size_t i = 0; i < options.pairs; ++i) {
    const Belief b = sample_uniform_belief(ns, rng);
    const std::size_t id = value_and_ma(top, b).id;
    std::optional<Belief> partner;
    if (options.identical) {
      partner = b;
    } else {
      for (std::size_t k = 0; k < options.max_rejections && !partner; ++k) {
        Belief c = sample_uniform_belief(ns, rng);
        if (value_and_ma(top, c).id == id) partner = std::move(c);
      }
    }
    if (!partner) {
      ++report.skipped;
      continue;
    }

    for (bool follow_policy : {true, false}) {
      Belief x = b, y = *partner;
      bool violated = false;
      for (std::size_t j = 0; j < depth && !violated; ++j) {
        const AlphaSet& now = values.at(horizon - j);
        const std::size_t a = follow_policy ? action_at(now, x) : rng.below(model.num_actions());
        // Observations possible under both beliefs, weighted by their probability under x.
        double total = 0.0;
        for (std::size_t z = 0; z < nz; ++z) {
          const double px = obs_probability(model, x, a, z);
          weights[z] = px > kImpossibleEvidence && obs_probability(model, y, a, z) > kImpossibleEvidence ? px : 0.0;
          total += weights[z];
        }
        if (total <= 0.0) break;
        const std::size_t z = rng.categorical(weights, total);
        x = belief_update(model, x, a, z);
        y = belief_update(model, y, a, z);
        const AlphaSet& next = values.at(horizon - j - 1);
        violated = value_and_ma(next, x).id != value_and_ma(next, y).id;
      }
      if (follow_policy) {
        ++report.policy_pairs;
        report.policy_violations += violated;
      } else {
        ++report.random_pairs;
        report.random_violations += violated;
      }
    }
  }
  return report;
}

}  // namespace vdpf
