#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vdpf/model.hpp"
#include "vdpf/rng.hpp"

namespace vdpf {

struct Particle {
  std::size_t state;
  double weight;

  friend bool operator==(const Particle&, const Particle&) = default;
};

/// Weighted state samples approximating a belief. Non-empty with positive
/// total weight; individual weights may be zero.
class ParticleSet {
 public:
  explicit ParticleSet(std::vector<Particle> particles);

  /// n equally weighted states drawn i.i.d. from `b`.
  static ParticleSet sample(const Belief& b, std::size_t n, Rng& rng);
  /// One particle per support state of `b`, weighted by its probability.
  static ParticleSet exact(const Belief& b);

  std::size_t size() const noexcept { return particles_.size(); }
  double total_weight() const noexcept { return total_; }
  std::span<const Particle> particles() const noexcept { return particles_; }
  const Particle& operator[](std::size_t i) const { return particles_[i]; }

  friend bool operator==(const ParticleSet&, const ParticleSet&) = default;

 private:
  std::vector<Particle> particles_;
  double total_;
};

Belief to_belief(const ParticleSet& p, std::size_t num_states);

/// Draws from a particle set in proportion to weight, in O(log n) per draw.
class ParticleSampler {
 public:
  explicit ParticleSampler(const ParticleSet& p);
  std::size_t draw_index(Rng& rng) const;
  std::size_t draw_state(Rng& rng) const { return (*particles_)[draw_index(rng)].state; }

 private:
  const ParticleSet* particles_;
  std::vector<double> cumulative_;
};

/// Basic sequential importance sampling: n_out times draw s from p, s' ~ T(s,a),
/// and emit (s', O(a,s')(o)). Throws ParticleDepletion if every weight is zero.
ParticleSet sis_step(const Pomdp& model, const ParticleSet& p, std::size_t a, std::size_t o, std::size_t n_out,
                     Rng& rng);

/// Multiplies each weight by Pr(o | s_i, a) and renormalizes to total weight 1.
/// Throws ImpossibleEvidence if the reweighted mass is zero.
ParticleSet reweight(const Pomdp& model, const ParticleSet& p, std::size_t a, std::size_t o);

enum class Resampling { multinomial, systematic };

/// Samples states of T(to_belief(p), a, o) exactly: ancestors are drawn from
/// the reweighted set, successors from the one-step posterior given o.
class PosteriorSampler {
 public:
  PosteriorSampler(const Pomdp& model, const ParticleSet& prior, std::size_t a, std::size_t o);
  PosteriorSampler(const PosteriorSampler&) = delete;
  PosteriorSampler& operator=(const PosteriorSampler&) = delete;

  std::size_t draw(Rng& rng) const;
  /// Successor of a given ancestor state.
  std::size_t draw_successor(std::size_t ancestor, Rng& rng) const;
  const ParticleSet& reweighted() const noexcept { return reweighted_; }

 private:
  const Pomdp* model_;
  std::size_t action_;
  std::size_t observation_;
  ParticleSet reweighted_;
  ParticleSampler ancestors_;
};

/// Evidence-integration step. Output particles all have weight exactly 1.
ParticleSet ei_step(const Pomdp& model, const ParticleSet& p, std::size_t a, std::size_t o, std::size_t n_out,
                    Rng& rng, Resampling resampling = Resampling::multinomial);

/// (sum w)^2 / sum w^2.
double effective_sample_size(const ParticleSet& p);

}  // namespace vdpf
