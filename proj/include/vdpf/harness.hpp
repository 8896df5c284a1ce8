#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vdpf/filter.hpp"
#include "vdpf/valuefn.hpp"
#include "vdpf/vds.hpp"

namespace vdpf {

enum class Policy { exact, pf_sis, pf_ei, pf_dynamic, random, worst };

std::string_view to_string(Policy p);
Policy parse_policy(std::string_view name);

/// Value functions indexed by steps to go. A finite schedule holds the sets for
/// 1..H steps and values zero at 0 steps; a stationary schedule uses one set throughout.
class ValueSchedule {
 public:
  static ValueSchedule finite(std::vector<AlphaSet> by_steps_to_go);
  static ValueSchedule stationary(AlphaSet set);

  bool is_stationary() const noexcept { return stationary_; }
  /// Number of steps covered; 0 for a stationary schedule.
  std::size_t horizon() const noexcept { return stationary_ ? 0 : sets_.size(); }
  /// Set used with `steps_to_go` >= 1 steps remaining.
  const AlphaSet& at(std::size_t steps_to_go) const;
  /// V with `steps_to_go` steps remaining; zero for a finite schedule at 0 steps.
  double value(std::size_t steps_to_go, const Belief& b) const;

 private:
  ValueSchedule(std::vector<AlphaSet> sets, bool stationary) : sets_(std::move(sets)), stationary_(stationary) {}
  std::vector<AlphaSet> sets_;
  bool stationary_;
};

enum class InitialBelief { dirichlet, start };

struct ExperimentConfig {
  std::string model_path;
  std::optional<std::string> alpha_path;
  std::optional<std::string> worst_alpha_path;
  bool stationary = false;  // inline solve by value iteration instead of a finite horizon
  std::optional<std::size_t> horizon;  // finite solve horizon, defaults to stages
  Prune prune = Prune::lp;
  double tolerance = 1e-4;
  std::size_t vector_cap = 1'000'000;

  std::vector<Policy> policies{Policy::exact};
  std::vector<std::size_t> particles{100};
  /// Batch limits B for the dynamic policy; nullopt is unbounded.
  std::vector<std::optional<std::size_t>> batches{std::size_t{1}};
  SamplingPlan plan{};  // max_batches is overwritten per grid cell
  bool stop_at_two_epsilon = false;
  Resampling resampling = Resampling::multinomial;

  std::size_t trials = 2000;
  std::size_t stages = 15;
  std::uint64_t seed = 1;
  bool single_stage = false;
  bool random_fixed = false;
  InitialBelief initial = InitialBelief::dirichlet;
  std::size_t threads = 1;
  std::optional<std::string> output_path;

  /// Throws ConfigError.
  void validate() const;
};

/// Applies one `key = value` setting. Throws ConfigError for unknown keys or bad values.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);
/// Flat `key = value` text, `#` comments. Later lines override earlier ones.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
/// Every key set_config_value understands.
const std::vector<std::string>& config_keys();

/// One grid cell: a policy with its particle count and batch limit.
struct CellConfig {
  Policy policy = Policy::exact;
  std::size_t particles = 100;
  SamplingPlan plan{};
  std::size_t stages = 15;
  bool single_stage = false;
  bool random_fixed = false;
  InitialBelief initial = InitialBelief::dirichlet;
  Resampling resampling = Resampling::multinomial;
};

struct StageLog {
  std::size_t action = 0;
  std::size_t observation = 0;
  double reward = 0.0;
  /// Separation reported by the dynamic selector.
  std::optional<double> tau;
  /// Hoeffding precision of a fixed-n particle belief.
  std::optional<double> epsilon;
  std::size_t samples = 0;
  std::size_t batches = 0;
  bool depleted = false;

  friend bool operator==(const StageLog&, const StageLog&) = default;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::vector<double> initial_belief;
  double optimal_value = 0.0;
  double discounted_return = 0.0;
  double loss = 0.0;
  std::vector<StageLog> stages;
  std::size_t samples_total = 0;
  std::size_t depletions = 0;
  /// Mean batches over stages that ran the dynamic selector; 0 if none did.
  double batches_mean = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Simulates one episode. Random streams derive from (seed, trial), so the
/// initial belief, hidden state and observation noise are shared by every
/// policy run with the same seed and trial. `worst` is needed only for Policy::worst.
TrialRecord run_trial(const Pomdp& model, const ValueSchedule& values, const ValueSchedule* worst,
                      const CellConfig& cell, std::uint64_t seed, std::size_t trial);

struct CellSummary {
  Policy policy;
  std::size_t particles;
  std::optional<std::size_t> batches;
  std::size_t trials;
  double mean_loss;
  double loss_stderr;
  double mean_samples;
  double mean_batches;
  double depletion_rate;  // depletion events per trial
  /// 2 epsilon for fixed-n particle policies, NaN otherwise.
  double two_epsilon;
};

struct ExperimentResult {
  std::vector<CellConfig> cells;
  std::vector<std::vector<TrialRecord>> records;  // per cell, in trial order
  std::vector<CellSummary> summaries;
};

/// Loads or solves the value schedules named by the config.
struct Schedules {
  ValueSchedule values;
  std::optional<ValueSchedule> worst;
};
Schedules prepare_schedules(const Pomdp& model, const ExperimentConfig& config);

ExperimentResult run_experiment(const Pomdp& model, const Schedules& schedules, const ExperimentConfig& config);
/// Loads the model, solves, runs, and writes the CSV if output_path is set.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string csv_header();
/// One row per trial per cell, fields as in csv_header.
std::string results_csv(const ExperimentResult& result, std::uint64_t seed);
void write_summary(std::ostream& out, const ExperimentResult& result);

/// 2 max_alpha epsilon_bound(R_alpha, delta / |set|, n).
double report_2epsilon(const AlphaSet& set, std::size_t n, double delta);

struct Fact1Options {
  std::size_t pairs = 1000;
  std::size_t depth = 3;
  /// Use b~ = b for every pair.
  bool identical = false;
  std::size_t max_rejections = 10'000;
};

struct Fact1Report {
  std::size_t policy_pairs = 0;
  std::size_t policy_violations = 0;
  std::size_t random_pairs = 0;
  std::size_t random_violations = 0;
  /// Pairs dropped because no partner with the same maximizing vector was found.
  std::size_t skipped = 0;
};

/// Empirical audit of the claim that beliefs sharing a maximizing vector keep
/// sharing one after any common action/observation sequence. Step j of a roll
/// compares maximizers under values.at(H - j) (the same set for stationary schedules).
Fact1Report fact1_check(const Pomdp& model, const ValueSchedule& values, const Fact1Options& options, Rng& rng);

}  // namespace vdpf
