#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vdpf/valuefn.hpp"

namespace vdpf {

// Hoeffding-based precision and sample sizes. All functions here are pure.

/// One-sided error bound sqrt(R^2 ln(1/delta) / (2n)) on the mean of n samples
/// of a quantity with range R, holding with probability at least 1 - delta.
double epsilon_bound(double range, double delta, std::size_t n);

/// ceil(R^2 ln(1/delta) / (2 eps^2)): samples needed for precision eps.
std::size_t sample_size(double range, double epsilon, double delta);

/// Samples needed so that every vector of `set` is estimated to precision eps
/// simultaneously with probability 1 - delta (Bonferroni over the set).
std::size_t simultaneous_sample_size(const AlphaSet& set, double epsilon, double delta);

/// Fixed batch size for a B-batch plan that guarantees a 2 eps selection:
/// ceil(max_range^2 / (2 B eps^2) * ln(B |set| / delta)).
std::size_t formula_batch_size(double max_range, double epsilon, std::size_t max_batches,
                               std::size_t num_vectors, double delta);

struct TauInput {
  std::size_t id;
  double estimate;
  double range;
};

struct TauResult {
  double tau;
  std::size_t chosen;
};

/// Post-hoc separation of the apparent best vector from its competitors, with
/// precisions computed at delta / |estimates| each. tau <= 0 certifies the
/// choice with confidence 1 - delta; a lone vector gives tau = -infinity.
TauResult posthoc_tau(std::span<const TauInput> estimates, std::size_t n, double delta);

/// Parameters of the decision-quality bounds. `h` bounds the loss of arbitrary
/// suboptimal behaviour, `t` is the stage of the first approximation and `k`
/// the offset to the second.
struct BoundInputs {
  double epsilon = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double beta = 0.0;
  std::size_t t = 0;
  std::size_t k = 0;
};

/// Loss of approximating a single stage t with exact monitoring elsewhere:
/// beta^(t+1) (2 eps (1 - delta) + delta h).
double one_stage_bound(const BoundInputs& in);

/// beta^(t+1) (max(tau, 0)(1 - delta) + delta h).
double posthoc_one_stage_bound(double tau, double delta, double h, double beta, std::size_t t);

/// h beta delta / (1 - beta + beta delta): loss when every stage is separated
/// and a mistake happens with probability at most delta per stage.
double multistage_bound(double h, double beta, double delta);

/// 2 eps beta / (1 - beta) + 2 eps h beta delta / (1 - beta + beta delta).
/// A heuristic estimate, not a guarantee.
double approx_multistage_bound(double epsilon, double h, double beta, double delta);

/// h beta delta / (1 - beta + beta delta) + beta^(t+1) 2 eps + beta^(t+k+1) h,
/// where t is the first unseparated stage and t + k the second.
double posthoc_multistage_bound(double h, double beta, double delta, double epsilon, std::size_t t, std::size_t k);

}  // namespace vdpf
