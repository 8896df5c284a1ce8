#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdpf/model.hpp"

namespace vdpf {

struct AlphaVector {
  std::vector<double> values;
  std::size_t action = 0;
  std::size_t id = 0;

  friend bool operator==(const AlphaVector&, const AlphaVector&) = default;
};

/// Whether a set represents max_a b.alpha (optimal values) or min_a b.alpha
/// (pessimal values, used for the worst-case policy).
enum class SolveMode { maximize, minimize };

enum class Prune { none, pointwise, lp };

/// A non-empty collection of alpha-vectors of equal dimension with no exact
/// duplicates. Ids are renumbered 0..size()-1 in the given order.
class AlphaSet {
 public:
  AlphaSet(std::vector<AlphaVector> vectors, std::optional<std::size_t> horizon = std::nullopt,
           SolveMode mode = SolveMode::maximize);

  std::size_t size() const noexcept { return vectors_.size(); }
  std::size_t num_states() const noexcept { return vectors_.front().values.size(); }
  const AlphaVector& operator[](std::size_t i) const { return vectors_[i]; }
  std::span<const AlphaVector> vectors() const noexcept { return vectors_; }
  auto begin() const noexcept { return vectors_.begin(); }
  auto end() const noexcept { return vectors_.end(); }

  /// Finite horizon the set was solved for; nullopt means stationary.
  std::optional<std::size_t> horizon() const noexcept { return horizon_; }
  SolveMode mode() const noexcept { return mode_; }

  double max_range() const;

  friend bool operator==(const AlphaSet&, const AlphaSet&) = default;

 private:
  std::vector<AlphaVector> vectors_;
  std::optional<std::size_t> horizon_;
  SolveMode mode_;
};

struct ValueAndMa {
  double value;
  std::size_t id;
};

/// max_alpha b.alpha and the id of a maximizer (lowest id on ties). For a
/// minimize-mode set the min and a minimizer are returned instead.
ValueAndMa value_and_ma(const AlphaSet& set, std::span<const double> belief);
inline ValueAndMa value_and_ma(const AlphaSet& set, const Belief& b) { return value_and_ma(set, b.probs()); }

/// max_s alpha(s) - min_s alpha(s).
double alpha_range(std::span<const double> values);
inline double alpha_range(const AlphaVector& alpha) { return alpha_range(alpha.values); }

inline constexpr double kWitnessTolerance = 1e-9;

/// Belief where `candidate` beats every vector in `others` by more than
/// kWitnessTolerance, if one exists. Solves the witness LP
///   max d  s.t.  b.(candidate - other) >= d for every other, b in the simplex.
std::optional<std::vector<double>> find_witness(std::span<const double> candidate,
                                                std::span<const AlphaVector> others);

/// True iff no belief has candidate strictly better (by the tolerance) than all others.
bool is_dominated(std::span<const double> candidate, std::span<const AlphaVector> others);
inline bool is_dominated(const AlphaVector& candidate, std::span<const AlphaVector> others) {
  return is_dominated(candidate.values, others);
}

/// Drops exact duplicates and vectors entrywise <= another vector (earlier vector wins ties).
std::vector<AlphaVector> prune_pointwise(std::vector<AlphaVector> vectors);
/// Pointwise pass followed by an LP filter keeping only vectors with a witness region.
std::vector<AlphaVector> prune_lp(std::vector<AlphaVector> vectors);

struct SolveOptions {
  std::size_t horizon = 1;
  SolveMode mode = SolveMode::maximize;
  Prune prune = Prune::lp;
  /// Largest pre-pruning cross-sum allowed at any stage.
  std::size_t vector_cap = 1'000'000;
};

/// Exact finite-horizon dynamic programming by full enumeration: every
/// (action, observation -> next-stage vector) combination is generated, then pruned.
AlphaSet solve(const Pomdp& model, const SolveOptions& options);

/// Sets for 1..horizon steps to go; element k-1 is the k-step set.
std::vector<AlphaSet> solve_sequence(const Pomdp& model, const SolveOptions& options);

struct StationaryOptions {
  SolveMode mode = SolveMode::maximize;
  Prune prune = Prune::lp;
  /// Stop once the sup-norm change of V over the belief grid falls below this.
  double tolerance = 1e-4;
  std::size_t max_iterations = 10'000;
  std::size_t grid_size = 256;
  std::uint64_t grid_seed = 0x5eed;
  std::size_t vector_cap = 1'000'000;
};

/// Value iteration until V stops changing on a fixed random belief grid
/// (plus the simplex corners). The result is tagged stationary.
AlphaSet solve_stationary(const Pomdp& model, const StationaryOptions& options);

/// Alpha file: `<num_vectors> <num_states>`, then per vector a line with the
/// action index and a line with the values. Blank lines are ignored.
AlphaSet parse_alpha(std::string_view text, SolveMode mode = SolveMode::maximize);
std::string write_alpha(const AlphaSet& set);

enum class HBoundMode { loose, tight };

/// Bound h on the loss of arbitrary suboptimal behaviour.
///   loose: max_alpha max_s alpha(s) - discount * min R / (1 - discount)
///   tight: max_s (max_alpha alpha(s) - min_{w in worst} w(s))
/// Tight mode requires the minimize-mode set `worst`.
double h_bound(const Pomdp& model, const AlphaSet& set, HBoundMode mode, const AlphaSet* worst = nullptr);

}  // namespace vdpf
