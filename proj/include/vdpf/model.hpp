#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vdpf/rng.hpp"

namespace vdpf {

inline constexpr double kStochasticTolerance = 1e-9;
inline constexpr double kImpossibleEvidence = 1e-15;

/// Probability vector over the states of a model.
class Belief {
 public:
  /// Takes ownership of `probs`; throws DomainError unless the entries are
  /// non-negative and sum to one within kStochasticTolerance.
  explicit Belief(std::vector<double> probs);

  static Belief uniform(std::size_t num_states);
  static Belief point(std::size_t num_states, std::size_t state);
  /// Divides non-negative weights by their sum. Throws on zero mass.
  static Belief normalized(std::vector<double> weights);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t s) const { return probs_[s]; }
  std::span<const double> probs() const noexcept { return probs_; }

  friend bool operator==(const Belief&, const Belief&) = default;

 private:
  std::vector<double> probs_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Total-variation distance between two distributions over the same states.
double total_variation(std::span<const double> p, std::span<const double> q);

struct Labels {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> observations;

  friend bool operator==(const Labels&, const Labels&) = default;
};

/// Flat POMDP. Tables are dense and row-major:
///   transition  [a][s][s']  = T(s,a)(s')
///   observation [a][s'][z]  = O(a,s')(z)
///   reward      [s][a]      = R(s,a)
class Pomdp {
 public:
  Pomdp(std::size_t num_states, std::size_t num_actions, std::size_t num_observations,
        std::vector<double> transition, std::vector<double> observation, std::vector<double> reward,
        double discount, Labels labels = {}, std::optional<Belief> start = std::nullopt);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  std::size_t num_observations() const noexcept { return num_observations_; }
  double discount() const noexcept { return discount_; }
  const Labels& labels() const noexcept { return labels_; }
  const std::optional<Belief>& start() const noexcept { return start_; }

  double transition(std::size_t a, std::size_t s, std::size_t next) const {
    return transition_[(a * num_states_ + s) * num_states_ + next];
  }
  std::span<const double> transition_row(std::size_t a, std::size_t s) const {
    return {transition_.data() + (a * num_states_ + s) * num_states_, num_states_};
  }
  double observation(std::size_t a, std::size_t next, std::size_t z) const {
    return observation_[(a * num_states_ + next) * num_observations_ + z];
  }
  std::span<const double> observation_row(std::size_t a, std::size_t next) const {
    return {observation_.data() + (a * num_states_ + next) * num_observations_, num_observations_};
  }
  double reward(std::size_t s, std::size_t a) const { return reward_[s * num_actions_ + a]; }
  double min_reward() const noexcept { return min_reward_; }

  /// Pr(z | s, a) = sum_{s'} T(s,a)(s') O(a,s')(z), precomputed.
  double evidence_likelihood(std::size_t a, std::size_t s, std::size_t z) const {
    return likelihood_[(a * num_states_ + s) * num_observations_ + z];
  }

  /// Same model with every reward negated.
  Pomdp with_negated_rewards() const;

  std::string state_name(std::size_t s) const;
  std::string action_name(std::size_t a) const;
  std::string observation_name(std::size_t z) const;

  friend bool operator==(const Pomdp& x, const Pomdp& y) {
    return x.num_states_ == y.num_states_ && x.num_actions_ == y.num_actions_ &&
           x.num_observations_ == y.num_observations_ && x.transition_ == y.transition_ &&
           x.observation_ == y.observation_ && x.reward_ == y.reward_ && x.discount_ == y.discount_ &&
           x.labels_ == y.labels_ && x.start_ == y.start_;
  }

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  std::size_t num_observations_;
  std::vector<double> transition_;
  std::vector<double> observation_;
  std::vector<double> reward_;
  std::vector<double> likelihood_;
  double discount_;
  double min_reward_;
  Labels labels_;
  std::optional<Belief> start_;
};

/// Exact Bayes update T(b, a, o). Throws ImpossibleEvidence when Pr(o | b, a) is zero.
Belief belief_update(const Pomdp& model, const Belief& b, std::size_t a, std::size_t o);

/// Pr(o | b, a).
double obs_probability(const Pomdp& model, const Belief& b, std::size_t a, std::size_t o);

std::size_t sample_transition(const Pomdp& model, std::size_t s, std::size_t a, Rng& rng);

/// Draws s' with probability proportional to T(s,a)(s') O(a,s')(o).
std::size_t sample_posterior_state(const Pomdp& model, std::size_t s, std::size_t a, std::size_t o,
                                   Rng& rng);

struct StepOutcome {
  std::size_t next_state;
  std::size_t observation;
  double reward;

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

/// One environment step. Always consumes exactly two uniforms from `rng`, so
/// trajectories under different policies stay aligned on a shared stream.
StepOutcome simulate_step(const Pomdp& model, std::size_t s, std::size_t a, Rng& rng);

/// Draw from the flat Dirichlet(1, ..., 1) distribution on the simplex.
Belief sample_uniform_belief(std::size_t num_states, Rng& rng);

std::size_t sample_state(const Belief& b, Rng& rng);

}  // namespace vdpf
