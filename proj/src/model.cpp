#include "vdpf/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vdpf/errors.hpp"

namespace vdpf {

namespace {

void check_distribution(std::span<const double> row, const std::string& name) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0 && p <= 1.0)) throw StochasticityError(name, std::accumulate(row.begin(), row.end(), 0.0));
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) throw StochasticityError(name, sum);
}

}  // namespace

Belief::Belief(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw DomainError("belief over zero states");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw DomainError("belief has a negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance)
    throw DomainError("belief sums to " + std::to_string(sum));
}

Belief Belief::uniform(std::size_t num_states) {
  return Belief(std::vector<double>(num_states, 1.0 / static_cast<double>(num_states)));
}

Belief Belief::point(std::size_t num_states, std::size_t state) {
  std::vector<double> probs(num_states, 0.0);
  probs.at(state) = 1.0;
  return Belief(std::move(probs));
}

Belief Belief::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("zero total weight");
  for (double& w : weights) w /= total;
  return Belief(std::move(weights));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

Pomdp::Pomdp(std::size_t num_states, std::size_t num_actions, std::size_t num_observations,
             std::vector<double> transition, std::vector<double> observation, std::vector<double> reward,
             double discount, Labels labels, std::optional<Belief> start)
    : num_states_(num_states),
      num_actions_(num_actions),
      num_observations_(num_observations),
      transition_(std::move(transition)),
      observation_(std::move(observation)),
      reward_(std::move(reward)),
      discount_(discount),
      min_reward_(0.0),
      labels_(std::move(labels)),
      start_(std::move(start)) {
  if (num_states_ == 0 || num_actions_ == 0 || num_observations_ == 0)
    throw DomainError("model needs at least one state, action and observation");
  if (transition_.size() != num_actions_ * num_states_ * num_states_)
    throw DomainError("transition table has the wrong size");
  if (observation_.size() != num_actions_ * num_states_ * num_observations_)
    throw DomainError("observation table has the wrong size");
  if (reward_.size() != num_states_ * num_actions_) throw DomainError("reward table has the wrong size");
  if (!(discount_ >= 0.0 && discount_ < 1.0))
    throw DomainError("discount " + std::to_string(discount_) + " outside [0, 1)");
  if (start_ && start_->size() != num_states_) throw DomainError("start belief has the wrong size");
  for (std::size_t a = 0; a < num_actions_; ++a) {
    for (std::size_t s = 0; s < num_states_; ++s) {
      check_distribution(transition_row(a, s), "T(" + action_name(a) + ", " + state_name(s) + ")");
      check_distribution(observation_row(a, s), "O(" + action_name(a) + ", " + state_name(s) + ")");
    }
  }
  for (double r : reward_)
    if (!std::isfinite(r)) throw DomainError("non-finite reward");
  min_reward_ = *std::min_element(reward_.begin(), reward_.end());

  likelihood_.assign(num_actions_ * num_states_ * num_observations_, 0.0);
  for (std::size_t a = 0; a < num_actions_; ++a) {
    for (std::size_t s = 0; s < num_states_; ++s) {
      double* out = likelihood_.data() + (a * num_states_ + s) * num_observations_;
      for (std::size_t next = 0; next < num_states_; ++next) {
        const double t = this->transition(a, s, next);
        if (t == 0.0) continue;
        for (std::size_t z = 0; z < num_observations_; ++z) out[z] += t * this->observation(a, next, z);
      }
    }
  }
}

Pomdp Pomdp::with_negated_rewards() const {
  std::vector<double> negated(reward_);
  for (double& r : negated) r = -r;
  return Pomdp(num_states_, num_actions_, num_observations_, transition_, observation_, std::move(negated),
               discount_, labels_, start_);
}

std::string Pomdp::state_name(std::size_t s) const {
  return s < labels_.states.size() ? labels_.states[s] : std::to_string(s);
}
std::string Pomdp::action_name(std::size_t a) const {
  return a < labels_.actions.size() ? labels_.actions[a] : std::to_string(a);
}
std::string Pomdp::observation_name(std::size_t z) const {
  return z < labels_.observations.size() ? labels_.observations[z] : std::to_string(z);
}

double obs_probability(const Pomdp& model, const Belief& b, std::size_t a, std::size_t o) {
  double total = 0.0;
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    if (b[s] == 0.0) continue;
    total += b[s] * model.evidence_likelihood(a, s, o);
  }
  return total;
}

Belief belief_update(const Pomdp& model, const Belief& b, std::size_t a, std::size_t o) {
  const std::size_t n = model.num_states();
  std::vector<double> next(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (b[s] == 0.0) continue;
    const auto row = model.transition_row(a, s);
    for (std::size_t s2 = 0; s2 < n; ++s2) next[s2] += b[s] * row[s2];
  }
  double total = 0.0;
  for (std::size_t s2 = 0; s2 < n; ++s2) {
    next[s2] *= model.observation(a, s2, o);
    total += next[s2];
  }
  if (total <= kImpossibleEvidence)
    throw ImpossibleEvidence("observation " + model.observation_name(o) + " has zero probability after action " +
                             model.action_name(a));
  for (double& p : next) p /= total;
  return Belief(std::move(next));
}

std::size_t sample_transition(const Pomdp& model, std::size_t s, std::size_t a, Rng& rng) {
  return rng.categorical(model.transition_row(a, s), 1.0);
}

std::size_t sample_posterior_state(const Pomdp& model, std::size_t s, std::size_t a, std::size_t o,
                                   Rng& rng) {
  const std::size_t n = model.num_states();
  std::vector<double> weights(n);
  const auto row = model.transition_row(a, s);
  double total = 0.0;
  for (std::size_t s2 = 0; s2 < n; ++s2) {
    weights[s2] = row[s2] * model.observation(a, s2, o);
    total += weights[s2];
  }
  if (total <= 0.0)
    throw ImpossibleEvidence("no successor of state " + model.state_name(s) + " can emit observation " +
                             model.observation_name(o));
  return rng.categorical(weights, total);
}

StepOutcome simulate_step(const Pomdp& model, std::size_t s, std::size_t a, Rng& rng) {
  const std::size_t next = sample_transition(model, s, a, rng);
  const std::size_t z = rng.categorical(model.observation_row(a, next), 1.0);
  return {next, z, model.reward(s, a)};
}

Belief sample_uniform_belief(std::size_t num_states, Rng& rng) {
  std::vector<double> weights(num_states);
  for (double& w : weights) w = rng.exponential();
  return Belief::normalized(std::move(weights));
}

std::size_t sample_state(const Belief& b, Rng& rng) { return rng.categorical(b.probs(), 1.0); }

}  // namespace vdpf
