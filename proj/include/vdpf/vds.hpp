#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "vdpf/bounds.hpp"
#include "vdpf/filter.hpp"
#include "vdpf/valuefn.hpp"

namespace vdpf {

enum class DeltaSchedule {
  uniform,   // delta_j = delta / B, needs a finite batch limit B
  harmonic,  // delta_j = delta / (j (j + 1)), sums to delta over infinitely many looks
};

/// How the batch selector spends samples and confidence.
struct SamplingPlan {
  double epsilon = 1.0;
  double delta = 0.1;
  /// Batch limit B; nullopt means unbounded (harmonic schedule only).
  std::optional<std::size_t> max_batches;
  /// Fixed batch size m; nullopt means the 2-epsilon formula (finite B only).
  std::optional<std::size_t> batch_size;
  DeltaSchedule schedule = DeltaSchedule::uniform;
  /// Stop once tau_j <= stop_threshold: 0 to certify the optimal vector,
  /// 2 epsilon for a 2-epsilon-optimal selection.
  double stop_threshold = 0.0;
  /// Hard cap on looks for unbounded plans, so exact ties cannot loop forever.
  std::size_t look_limit = 10'000;

  /// Throws DomainError when the fields are inconsistent.
  void validate() const;
  /// Confidence spent at look j (1-based).
  double look_delta(std::size_t j) const;
  /// Samples drawn at every look for a set with the given size and largest range.
  std::size_t batch_samples(std::size_t num_vectors, double max_range) const;
};

struct VectorEstimate {
  std::size_t id;
  double estimate;
  double precision;
  std::size_t count;
};

struct BatchLook {
  std::size_t samples;  // pooled sample count after this look
  double delta;         // delta_j
  std::size_t leader;   // alpha*_j
  double tau;           // tau_j
};

struct SelectionReport {
  std::size_t chosen = 0;
  /// min of tau_j over looks whose leader equals the final leader. -infinity
  /// when the set has a single vector.
  double tau = 0.0;
  /// tau <= the plan's stop threshold.
  bool separated = false;
  std::size_t batches_used = 0;
  std::size_t samples_used = 0;
  double confidence_spent = 0.0;
  std::vector<VectorEstimate> per_vector;
  std::vector<BatchLook> looks;
};

struct Selection {
  SelectionReport report;
  /// Every pooled sample with weight 1: the next-stage particle belief.
  ParticleSet particles;
};

using StateSampler = std::function<std::size_t(Rng&)>;

/// Batch selection of the maximizing vector from i.i.d. draws of `sampler`.
Selection dynamic_select(const StateSampler& sampler, const AlphaSet& set, const SamplingPlan& plan, Rng& rng);

/// Batch selection for the belief T(to_belief(p), a, o), sampled with the
/// evidence-integration mechanics (reweight once, then posterior draws).
Selection dynamic_select(const Pomdp& model, const ParticleSet& p, std::size_t a, std::size_t o,
                         const AlphaSet& set, const SamplingPlan& plan, Rng& rng);

}  // namespace vdpf
