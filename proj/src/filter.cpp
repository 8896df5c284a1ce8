#include "vdpf/filter.hpp"

#include <algorithm>
#include <cmath>

#include "vdpf/errors.hpp"

namespace vdpf {

ParticleSet::ParticleSet(std::vector<Particle> particles) : particles_(std::move(particles)), total_(0.0) {
  if (particles_.empty()) throw DomainError("particle set is empty");
  for (const auto& p : particles_) {
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) throw DomainError("particle weight is negative or not finite");
    total_ += p.weight;
  }
  if (!(total_ > 0.0)) throw DomainError("particle set has zero total weight");
}

ParticleSet ParticleSet::sample(const Belief& b, std::size_t n, Rng& rng) {
  if (n == 0) throw DomainError("need at least one particle");
  std::vector<Particle> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({sample_state(b, rng), 1.0});
  return ParticleSet(std::move(out));
}

ParticleSet ParticleSet::exact(const Belief& b) {
  std::vector<Particle> out;
  for (std::size_t s = 0; s < b.size(); ++s)
    if (b[s] > 0.0) out.push_back({s, b[s]});
  return ParticleSet(std::move(out));
}

Belief to_belief(const ParticleSet& p, std::size_t num_states) {
  std::vector<double> probs(num_states, 0.0);
  for (const auto& particle : p.particles()) {
    if (particle.state >= num_states) throw DomainError("particle state out of range");
    probs[particle.state] += particle.weight;
  }
  for (double& x : probs) x /= p.total_weight();
  return Belief(std::move(probs));
}

ParticleSampler::ParticleSampler(const ParticleSet& p) : particles_(&p) {
  cumulative_.reserve(p.size());
  double sum = 0.0;
  for (const auto& particle : p.particles()) {
    sum += particle.weight;
    cumulative_.push_back(sum);
  }
}

std::size_t ParticleSampler::draw_index(Rng& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  // upper_bound skips zero-weight entries, since they repeat the previous sum.
  return static_cast<std::size_t>(it - cumulative_.begin());
}

ParticleSet sis_step(const Pomdp& model, const ParticleSet& p, std::size_t a, std::size_t o, std::size_t n_out,
                     Rng& rng) {
  if (n_out == 0) throw DomainError("sis_step needs n_out >= 1");
  const ParticleSampler sampler(p);
  std::vector<Particle> out;
  out.reserve(n_out);
  double total = 0.0;
  for (std::size_t i = 0; i < n_out; ++i) {
    const std::size_t s = sampler.draw_state(rng);
    const std::size_t next = sample_transition(model, s, a, rng);
    const double w = model.observation(a, next, o);
    total += w;
    out.push_back({next, w});
  }
  if (!(total > 0.0))
    throw ParticleDepletion("every sampled successor has zero likelihood for observation " +
                            model.observation_name(o));
  return ParticleSet(std::move(out));
}

ParticleSet reweight(const Pomdp& model, const ParticleSet& p, std::size_t a, std::size_t o) {
  std::vector<Particle> out;
  out.reserve(p.size());
  double total = 0.0;
  for (const auto& particle : p.particles()) {
    const double w = particle.weight * model.evidence_likelihood(a, particle.state, o);
    total += w;
    out.push_back({particle.state, w});
  }
  if (!(total > kImpossibleEvidence * p.total_weight()))
    throw ImpossibleEvidence("observation " + model.observation_name(o) + " has zero probability under the particles");
  for (auto& particle : out) particle.weight /= total;
  return ParticleSet(std::move(out));
}

PosteriorSampler::PosteriorSampler(const Pomdp& model, const ParticleSet& prior, std::size_t a, std::size_t o)
    : model_(&model),
      action_(a),
      observation_(o),
      reweighted_(reweight(model, prior, a, o)),
      ancestors_(reweighted_) {}

std::size_t PosteriorSampler::draw(Rng& rng) const {
  return draw_successor(ancestors_.draw_state(rng), rng);
}

std::size_t PosteriorSampler::draw_successor(std::size_t ancestor, Rng& rng) const {
  return sample_posterior_state(*model_, ancestor, action_, observation_, rng);
}

ParticleSet ei_step(const Pomdp& model, const ParticleSet& p, std::size_t a, std::size_t o, std::size_t n_out,
                    Rng& rng, Resampling resampling) {
  if (n_out == 0) throw DomainError("ei_step needs n_out >= 1");
  const PosteriorSampler sampler(model, p, a, o);
  std::vector<Particle> out;
  out.reserve(n_out);
  if (resampling == Resampling::multinomial) {
    for (std::size_t i = 0; i < n_out; ++i) out.push_back({sampler.draw(rng), 1.0});
  } else {
    const auto& ancestors = sampler.reweighted().particles();
    const double step = sampler.reweighted().total_weight() / static_cast<double>(n_out);
    double target = rng.uniform() * step;
    double cumulative = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n_out; ++i) {
      while (j + 1 < ancestors.size() && (cumulative + ancestors[j].weight <= target || ancestors[j].weight == 0.0)) {
        cumulative += ancestors[j].weight;
        ++j;
      }
      out.push_back({sampler.draw_successor(ancestors[j].state, rng), 1.0});
      target += step;
    }
  }
  return ParticleSet(std::move(out));
}

double effective_sample_size(const ParticleSet& p) {
  double sum_sq = 0.0;
  for (const auto& particle : p.particles()) sum_sq += particle.weight * particle.weight;
  return p.total_weight() * p.total_weight() / sum_sq;
}

}  // namespace vdpf
