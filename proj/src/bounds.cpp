#include "vdpf/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vdpf/errors.hpp"

namespace vdpf {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
}

// Ceiling that absorbs rounding noise: a value within 1e-9 (relative) of an
// integer is treated as that integer, so ln(e^-2) = 2 - ulp still gives 4, not 5.
std::size_t tolerant_ceil(double x) {
  if (x <= 0.0) return 0;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(x));
}

}  // namespace

double epsilon_bound(double range, double delta, std::size_t n) {
  check_delta(delta);
  if (n == 0) throw DomainError("epsilon_bound needs n >= 1");
  if (!(range >= 0.0)) throw DomainError("range must be non-negative");
  return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

std::size_t sample_size(double range, double epsilon, double delta) {
  check_delta(delta);
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (!(range >= 0.0)) throw DomainError("range must be non-negative");
  return tolerant_ceil(range * range * std::log(1.0 / delta) / (2.0 * epsilon * epsilon));
}

std::size_t simultaneous_sample_size(const AlphaSet& set, double epsilon, double delta) {
  const double per_vector = delta / static_cast<double>(set.size());
  std::size_t n = 0;
  for (const auto& v : set) n = std::max(n, sample_size(alpha_range(v), epsilon, per_vector));
  return n;
}

std::size_t formula_batch_size(double max_range, double epsilon, std::size_t max_batches,
                               std::size_t num_vectors, double delta) {
  check_delta(delta);
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (max_batches == 0 || num_vectors == 0) throw DomainError("batch formula needs B >= 1 and a non-empty set");
  const double b = static_cast<double>(max_batches);
  const double x = max_range * max_range / (2.0 * b * epsilon * epsilon) *
                   std::log(b * static_cast<double>(num_vectors) / delta);
  return std::max<std::size_t>(tolerant_ceil(x), 1);
}

TauResult posthoc_tau(std::span<const TauInput> estimates, std::size_t n, double delta) {
  if (estimates.empty()) throw DomainError("posthoc_tau needs at least one estimate");
  std::size_t best = 0;
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    const auto& e = estimates[i];
    const auto& b = estimates[best];
    if (e.estimate > b.estimate || (e.estimate == b.estimate && e.id < b.id)) best = i;
  }
  if (estimates.size() == 1) return {-std::numeric_limits<double>::infinity(), estimates[0].id};
  const double per_vector = delta / static_cast<double>(estimates.size());
  const double chosen_lower = estimates[best].estimate - epsilon_bound(estimates[best].range, per_vector, n);
  double rival_upper = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (i == best) continue;
    rival_upper = std::max(rival_upper, estimates[i].estimate + epsilon_bound(estimates[i].range, per_vector, n));
  }
  return {rival_upper - chosen_lower, estimates[best].id};
}

double one_stage_bound(const BoundInputs& in) {
  return std::pow(in.beta, static_cast<double>(in.t + 1)) *
         (2.0 * in.epsilon * (1.0 - in.delta) + in.delta * in.h);
}

double posthoc_one_stage_bound(double tau, double delta, double h, double beta, std::size_t t) {
  return std::pow(beta, static_cast<double>(t + 1)) * (std::max(tau, 0.0) * (1.0 - delta) + delta * h);
}

double multistage_bound(double h, double beta, double delta) {
  return h * beta * delta / (1.0 - beta + beta * delta);
}

double approx_multistage_bound(double epsilon, double h, double beta, double delta) {
  return 2.0 * epsilon * beta / (1.0 - beta) + 2.0 * epsilon * h * beta * delta / (1.0 - beta + beta * delta);
}

double posthoc_multistage_bound(double h, double beta, double delta, double epsilon, std::size_t t, std::size_t k) {
  return multistage_bound(h, beta, delta) + std::pow(beta, static_cast<double>(t + 1)) * 2.0 * epsilon +
         std::pow(beta, static_cast<double>(t + k + 1)) * h;
}

}  // namespace vdpf
