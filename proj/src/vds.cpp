#include "vdpf/vds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vdpf/errors.hpp"

namespace vdpf {

void SamplingPlan::validate() const {
  if (!(epsilon > 0.0)) throw DomainError("plan epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("plan delta must lie in (0, 1)");
  if (!(stop_threshold >= 0.0)) throw DomainError("stop threshold must be non-negative");
  if (max_batches && *max_batches == 0) throw DomainError("batch limit must be at least 1");
  if (batch_size && *batch_size == 0) throw DomainError("batch size must be at least 1");
  if (schedule == DeltaSchedule::uniform && !max_batches)
    throw DomainError("the uniform schedule needs a finite batch limit");
  if (schedule == DeltaSchedule::harmonic && max_batches)
    throw DomainError("the harmonic schedule is for unbounded batches");
  if (!batch_size && !max_batches) throw DomainError("the batch-size formula needs a finite batch limit");
  if (look_limit == 0) throw DomainError("look limit must be at least 1");
}

double SamplingPlan::look_delta(std::size_t j) const {
  if (schedule == DeltaSchedule::uniform) return delta / static_cast<double>(*max_batches);
  const double jj = static_cast<double>(j);
  return delta / (jj * (jj + 1.0));
}

std::size_t SamplingPlan::batch_samples(std::size_t num_vectors, double max_range) const {
  if (batch_size) return *batch_size;
  return formula_batch_size(max_range, epsilon, *max_batches, num_vectors, delta);
}

Selection dynamic_select(const StateSampler& sampler, const AlphaSet& set, const SamplingPlan& plan, Rng& rng) {
  plan.validate();
  const std::size_t n_states = set.num_states();
  const std::size_t k = set.size();
  const std::size_t m = plan.batch_samples(k, set.max_range());
  const std::size_t limit = plan.max_batches.value_or(plan.look_limit);

  std::vector<double> ranges(k);
  for (std::size_t i = 0; i < k; ++i) ranges[i] = alpha_range(set[i]);

  std::vector<std::size_t> counts(n_states, 0);
  std::vector<Particle> pooled;
  std::vector<double> estimates(k);
  std::vector<double> precisions(k);
  SelectionReport report;

  for (std::size_t j = 1; j <= limit; ++j) {
    const double delta_j = plan.look_delta(j);
    pooled.reserve(pooled.size() + m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t s = sampler(rng);
      ++counts[s];
      pooled.push_back({s, 1.0});
    }
    const std::size_t n = pooled.size();
    const double per_vector = delta_j / static_cast<double>(k);
    std::size_t leader = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double sum = 0.0;
      for (std::size_t s = 0; s < n_states; ++s)
        if (counts[s]) sum += static_cast<double>(counts[s]) * set[i].values[s];
      estimates[i] = sum / static_cast<double>(n);
      precisions[i] = epsilon_bound(ranges[i], per_vector, n);
      if (estimates[i] > estimates[leader]) leader = i;
    }
    double tau = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      if (i == leader) continue;
      tau = std::max(tau, estimates[i] + precisions[i] - (estimates[leader] - precisions[leader]));
    }
    report.looks.push_back({n, delta_j, leader, tau});
    report.confidence_spent += delta_j;
    if (tau <= plan.stop_threshold) break;
  }

  const auto& last = report.looks.back();
  report.chosen = last.leader;
  report.tau = last.tau;
  for (const auto& look : report.looks)
    if (look.leader == last.leader) report.tau = std::min(report.tau, look.tau);
  report.separated = report.tau <= plan.stop_threshold;
  report.batches_used = report.looks.size();
  report.samples_used = pooled.size();
  report.per_vector.reserve(k);
  for (std::size_t i = 0; i < k; ++i) report.per_vector.push_back({i, estimates[i], precisions[i], pooled.size()});
  return {std::move(report), ParticleSet(std::move(pooled))};
}

Selection dynamic_select(const Pomdp& model, const ParticleSet& p, std::size_t a, std::size_t o,
                         const AlphaSet& set, const SamplingPlan& plan, Rng& rng) {
  const PosteriorSampler posterior(model, p, a, o);
  return dynamic_select([&](Rng& r) { return posterior.draw(r); }, set, plan, rng);
}

}  // namespace vdpf
