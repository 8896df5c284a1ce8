#include "vdpf/valuefn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "vdpf/errors.hpp"
#include "vdpf/simplex.hpp"
#include "vdpf/text.hpp"

namespace vdpf {

namespace {

struct VectorHash {
  std::size_t operator()(const AlphaVector* v) const noexcept {
    std::uint64_t h = splitmix64(v->action);
    for (double x : v->values) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &x, sizeof bits);
      h = splitmix64(h ^ bits);
    }
    return static_cast<std::size_t>(h);
  }
};

struct VectorEq {
  bool operator()(const AlphaVector* x, const AlphaVector* y) const noexcept {
    return x->action == y->action && x->values == y->values;
  }
};

std::vector<AlphaVector> drop_duplicates(std::vector<AlphaVector> vectors) {
  std::unordered_set<const AlphaVector*, VectorHash, VectorEq> seen;
  seen.reserve(vectors.size() * 2);
  std::vector<bool> keep(vectors.size(), false);
  for (std::size_t i = 0; i < vectors.size(); ++i) keep[i] = seen.insert(&vectors[i]).second;
  std::vector<AlphaVector> out;
  out.reserve(seen.size());
  for (std::size_t i = 0; i < vectors.size(); ++i)
    if (keep[i]) out.push_back(std::move(vectors[i]));
  return out;
}

bool dominates(const std::vector<double>& w, const std::vector<double>& v) {
  for (std::size_t s = 0; s < w.size(); ++s)
    if (w[s] < v[s]) return false;
  return true;
}

std::vector<AlphaVector> negate_all(std::vector<AlphaVector> vectors) {
  for (auto& v : vectors)
    for (double& x : v.values) x = -x;
  return vectors;
}

// Lexicographic comparison used to break ties between vectors with equal value
// at a witness point, so the filter always makes progress.
bool lex_greater(const std::vector<double>& x, const std::vector<double>& y) {
  return std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end());
}

std::vector<AlphaVector> apply_prune(std::vector<AlphaVector> vectors, Prune prune) {
  switch (prune) {
    case Prune::none: return drop_duplicates(std::move(vectors));
    case Prune::pointwise: return prune_pointwise(std::move(vectors));
    case Prune::lp: return prune_lp(std::move(vectors));
  }
  return vectors;
}

// One Monahan backup of a maximize-mode set.
std::vector<AlphaVector> backup(const Pomdp& model, const std::vector<AlphaVector>& previous, Prune prune,
                                std::size_t cap) {
  const std::size_t n = model.num_states();
  const std::size_t na = model.num_actions();
  const std::size_t nz = model.num_observations();
  const double beta = model.discount();

  // Projections g[a][z] = { s -> sum_{s'} T(s,a)(s') O(a,s')(z) alpha(s') }, deduplicated.
  std::vector<std::vector<std::vector<std::vector<double>>>> projections(na, std::vector<std::vector<std::vector<double>>>(nz));
  double total = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    double product = 1.0;
    for (std::size_t z = 0; z < nz; ++z) {
      std::vector<AlphaVector> proj;
      proj.reserve(previous.size());
      for (const auto& alpha : previous) {
        AlphaVector g{std::vector<double>(n, 0.0), 0, 0};
        for (std::size_t s = 0; s < n; ++s) {
          const auto row = model.transition_row(a, s);
          double sum = 0.0;
          for (std::size_t s2 = 0; s2 < n; ++s2) {
            if (row[s2] == 0.0) continue;
            sum += row[s2] * model.observation(a, s2, z) * alpha.values[s2];
          }
          g.values[s] = sum;
        }
        proj.push_back(std::move(g));
      }
      proj = drop_duplicates(std::move(proj));
      product *= static_cast<double>(proj.size());
      projections[a][z].reserve(proj.size());
      for (auto& g : proj) projections[a][z].push_back(std::move(g.values));
    }
    total += product;
    if (total > static_cast<double>(cap))
      throw CapExceeded("cross-sum would generate more than " + std::to_string(cap) + " vectors");
  }

  std::vector<AlphaVector> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> odometer(nz);
  std::vector<double> acc(n);
  for (std::size_t a = 0; a < na; ++a) {
    std::fill(odometer.begin(), odometer.end(), 0);
    while (true) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t z = 0; z < nz; ++z) {
        const auto& g = projections[a][z][odometer[z]];
        for (std::size_t s = 0; s < n; ++s) acc[s] += g[s];
      }
      AlphaVector v{std::vector<double>(n), a, 0};
      for (std::size_t s = 0; s < n; ++s) v.values[s] = model.reward(s, a) + beta * acc[s];
      out.push_back(std::move(v));
      // Advance the odometer; the last observation varies fastest.
      bool wrapped = true;
      for (std::size_t z = nz; z-- > 0;) {
        if (++odometer[z] < projections[a][z].size()) {
          wrapped = false;
          break;
        }
        odometer[z] = 0;
      }
      if (wrapped) break;
    }
  }
  return apply_prune(std::move(out), prune);
}

std::vector<AlphaVector> immediate_rewards(const Pomdp& model, Prune prune) {
  std::vector<AlphaVector> out;
  for (std::size_t a = 0; a < model.num_actions(); ++a) {
    AlphaVector v{std::vector<double>(model.num_states()), a, 0};
    for (std::size_t s = 0; s < model.num_states(); ++s) v.values[s] = model.reward(s, a);
    out.push_back(std::move(v));
  }
  return apply_prune(std::move(out), prune);
}

}  // namespace

AlphaSet::AlphaSet(std::vector<AlphaVector> vectors, std::optional<std::size_t> horizon, SolveMode mode)
    : vectors_(std::move(vectors)), horizon_(horizon), mode_(mode) {
  if (vectors_.empty()) throw DomainError("alpha set is empty");
  const std::size_t n = vectors_.front().values.size();
  if (n == 0) throw DomainError("alpha vectors have no entries");
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (vectors_[i].values.size() != n) throw DomainError("alpha vectors differ in dimension");
    vectors_[i].id = i;
  }
  std::unordered_set<const AlphaVector*, VectorHash, VectorEq> seen;
  for (const auto& v : vectors_)
    if (!seen.insert(&v).second) throw DomainError("alpha set contains an exact duplicate");
}

double AlphaSet::max_range() const {
  double r = 0.0;
  for (const auto& v : vectors_) r = std::max(r, alpha_range(v));
  return r;
}

ValueAndMa value_and_ma(const AlphaSet& set, std::span<const double> belief) {
  if (belief.size() != set.num_states()) throw DomainError("belief and alpha set differ in dimension");
  const bool maximize = set.mode() == SolveMode::maximize;
  ValueAndMa best{dot(belief, set[0].values), 0};
  for (std::size_t i = 1; i < set.size(); ++i) {
    const double v = dot(belief, set[i].values);
    if (maximize ? v > best.value : v < best.value) best = {v, i};
  }
  return best;
}

double alpha_range(std::span<const double> values) {
  if (values.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

std::optional<std::vector<double>> find_witness(std::span<const double> candidate,
                                                std::span<const AlphaVector> others) {
  const std::size_t n = candidate.size();
  if (others.empty()) return std::vector<double>(n, 1.0 / static_cast<double>(n));

  // Eliminate the last belief coordinate (b_last = 1 - sum of the rest) and
  // shift the free margin d by 1 so every variable is non-negative. Differences
  // D_k = candidate - other_k are scaled into [-1/2, 1/2] first:
  //   d' - sum_i b_i (D_ki - D_k,last) <= 1 + D_k,last   for each other k
  //   sum_i b_i <= 1
  //   d' <= 2
  const std::size_t k = others.size();
  const std::size_t free_b = n - 1;
  double scale = 0.0;
  for (const auto& other : others) {
    if (other.values.size() != n) throw DomainError("alpha vectors differ in dimension");
    for (std::size_t s = 0; s < n; ++s) scale = std::max(scale, std::abs(candidate[s] - other.values[s]));
  }
  if (scale == 0.0) return std::nullopt;  // candidate equals some other vector everywhere
  scale *= 2.0;

  LinearProgram lp;
  lp.rows = k + 1 + (free_b > 0 ? 1 : 0);
  lp.cols = free_b + 1;
  lp.a.assign(lp.rows * lp.cols, 0.0);
  lp.b.assign(lp.rows, 0.0);
  lp.c.assign(lp.cols, 0.0);
  lp.c[free_b] = 1.0;
  for (std::size_t r = 0; r < k; ++r) {
    const auto& other = others[r].values;
    const double last = (candidate[n - 1] - other[n - 1]) / scale;
    for (std::size_t i = 0; i < free_b; ++i) lp.a[r * lp.cols + i] = -((candidate[i] - other[i]) / scale - last);
    lp.a[r * lp.cols + free_b] = 1.0;
    lp.b[r] = 1.0 + last;
  }
  lp.a[k * lp.cols + free_b] = 1.0;
  lp.b[k] = 2.0;
  if (free_b > 0) {
    for (std::size_t i = 0; i < free_b; ++i) lp.a[(k + 1) * lp.cols + i] = 1.0;
    lp.b[k + 1] = 1.0;
  }
  const LpSolution sol = solve_lp(lp);
  if (!sol.bounded) throw Error("witness LP unbounded (internal error)");

  std::vector<double> b(n, 0.0);
  double rest = 1.0;
  for (std::size_t i = 0; i < free_b; ++i) {
    b[i] = std::clamp(sol.x[i], 0.0, 1.0);
    rest -= b[i];
  }
  b[n - 1] = std::max(rest, 0.0);
  // Recompute the margin at the recovered point rather than trusting the tableau.
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& other : others) {
    double diff = 0.0;
    for (std::size_t s = 0; s < n; ++s) diff += b[s] * (candidate[s] - other.values[s]);
    margin = std::min(margin, diff);
  }
  if (margin > kWitnessTolerance) return b;
  return std::nullopt;
}

bool is_dominated(std::span<const double> candidate, std::span<const AlphaVector> others) {
  return !find_witness(candidate, others).has_value();
}

std::vector<AlphaVector> prune_pointwise(std::vector<AlphaVector> vectors) {
  vectors = drop_duplicates(std::move(vectors));
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    bool dominated = false;
    for (std::size_t j : kept) {
      if (dominates(vectors[j].values, vectors[i].values)) {
        dominated = true;
        break;
      }
    }
    if (dominated) continue;
    std::erase_if(kept, [&](std::size_t j) { return dominates(vectors[i].values, vectors[j].values); });
    kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<AlphaVector> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(std::move(vectors[i]));
  return out;
}

std::vector<AlphaVector> prune_lp(std::vector<AlphaVector> vectors) {
  vectors = prune_pointwise(std::move(vectors));
  if (vectors.size() <= 1) return vectors;
  const std::size_t n = vectors.front().values.size();

  std::vector<bool> pending(vectors.size(), true);
  std::vector<std::size_t> winners;
  std::vector<AlphaVector> winner_vectors;

  auto best_at = [&](std::span<const double> b) {
    std::size_t best = vectors.size();
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (!pending[i]) continue;
      const double v = dot(b, vectors[i].values);
      if (best == vectors.size() || v > best_value ||
          (v == best_value && lex_greater(vectors[i].values, vectors[best].values))) {
        best = i;
        best_value = v;
      }
    }
    return best;
  };
  auto promote = [&](std::size_t i) {
    pending[i] = false;
    winners.push_back(i);
    winner_vectors.push_back(vectors[i]);
  };

  // Seed with the best vector at each corner of the simplex.
  std::vector<double> corner(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    corner[s] = 1.0;
    const std::size_t i = best_at(corner);
    if (i < vectors.size()) promote(i);
    corner[s] = 0.0;
  }

  for (std::size_t i = 0; i < vectors.size(); ++i) {
    while (pending[i]) {
      auto witness = find_witness(vectors[i].values, winner_vectors);
      if (!witness) {
        pending[i] = false;
        break;
      }
      promote(best_at(*witness));
    }
  }
  std::sort(winners.begin(), winners.end());
  std::vector<AlphaVector> out;
  out.reserve(winners.size());
  for (std::size_t i : winners) out.push_back(std::move(vectors[i]));
  return out;
}

std::vector<AlphaSet> solve_sequence(const Pomdp& model, const SolveOptions& options) {
  if (options.horizon < 1) throw DomainError("horizon must be at least 1");
  const Pomdp* source = &model;
  std::optional<Pomdp> negated;
  if (options.mode == SolveMode::minimize) {
    negated = model.with_negated_rewards();
    source = &*negated;
  }
  std::vector<AlphaSet> out;
  out.reserve(options.horizon);
  std::vector<AlphaVector> current = immediate_rewards(*source, options.prune);
  for (std::size_t h = 1;; ++h) {
    auto stored = options.mode == SolveMode::minimize ? negate_all(current) : current;
    out.emplace_back(std::move(stored), h, options.mode);
    if (h == options.horizon) break;
    current = backup(*source, current, options.prune, options.vector_cap);
  }
  return out;
}

AlphaSet solve(const Pomdp& model, const SolveOptions& options) {
  if (options.horizon < 1) throw DomainError("horizon must be at least 1");
  const Pomdp* source = &model;
  std::optional<Pomdp> negated;
  if (options.mode == SolveMode::minimize) {
    negated = model.with_negated_rewards();
    source = &*negated;
  }
  std::vector<AlphaVector> current = immediate_rewards(*source, options.prune);
  for (std::size_t h = 2; h <= options.horizon; ++h)
    current = backup(*source, current, options.prune, options.vector_cap);
  if (options.mode == SolveMode::minimize) current = negate_all(std::move(current));
  return AlphaSet(std::move(current), options.horizon, options.mode);
}

AlphaSet solve_stationary(const Pomdp& model, const StationaryOptions& options) {
  if (!(options.tolerance > 0.0)) throw DomainError("stationary tolerance must be positive");
  const std::size_t n = model.num_states();
  std::vector<Belief> grid;
  for (std::size_t s = 0; s < n; ++s) grid.push_back(Belief::point(n, s));
  Rng rng(options.grid_seed);
  for (std::size_t i = 0; i < options.grid_size; ++i) grid.push_back(sample_uniform_belief(n, rng));

  const Pomdp* source = &model;
  std::optional<Pomdp> negated;
  if (options.mode == SolveMode::minimize) {
    negated = model.with_negated_rewards();
    source = &*negated;
  }
  auto values_on_grid = [&](const std::vector<AlphaVector>& vectors) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (const auto& b : grid) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& v : vectors) best = std::max(best, dot(b.probs(), v.values));
      out.push_back(best);
    }
    return out;
  };

  std::vector<AlphaVector> current = immediate_rewards(*source, options.prune);
  std::vector<double> previous = values_on_grid(current);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    current = backup(*source, current, options.prune, options.vector_cap);
    std::vector<double> values = values_on_grid(current);
    double change = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) change = std::max(change, std::abs(values[i] - previous[i]));
    previous = std::move(values);
    if (change < options.tolerance) {
      if (options.mode == SolveMode::minimize) current = negate_all(std::move(current));
      return AlphaSet(std::move(current), std::nullopt, options.mode);
    }
  }
  throw Error("value iteration did not reach tolerance within " + std::to_string(options.max_iterations) +
              " iterations");
}

AlphaSet parse_alpha(std::string_view text, SolveMode mode) {
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      lines.emplace_back(text.substr(start, end - start));
      start = end + 1;
    }
  }
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::optional<std::pair<std::size_t, std::vector<std::string>>> {
    while (line_no < lines.size()) {
      std::istringstream in(lines[line_no++]);
      std::vector<std::string> fields;
      std::string f;
      while (in >> f) fields.push_back(f);
      if (!fields.empty()) return std::make_pair(line_no, std::move(fields));
    }
    return std::nullopt;
  };
  auto header = next_line();
  if (!header || header->second.size() != 2) throw ParseError("expected '<num_vectors> <num_states>'", header ? header->first : 1, 1);
  auto count = parse_unsigned(header->second[0]);
  auto dim = parse_unsigned(header->second[1]);
  if (!count || !dim || *count == 0 || *dim == 0)
    throw ParseError("malformed alpha header", header->first, 1);
  std::vector<AlphaVector> vectors;
  for (std::size_t i = 0; i < *count; ++i) {
    auto action_line = next_line();
    if (!action_line) throw ParseError("missing action line for vector " + std::to_string(i), lines.size(), 1);
    if (action_line->second.size() != 1) throw ParseError("action line must hold one index", action_line->first, 1);
    auto action = parse_unsigned(action_line->second[0]);
    if (!action) throw ParseError("malformed action index '" + action_line->second[0] + "'", action_line->first, 1);
    auto values_line = next_line();
    if (!values_line) throw ParseError("missing values for vector " + std::to_string(i), lines.size(), 1);
    if (values_line->second.size() != *dim)
      throw ParseError("vector " + std::to_string(i) + " has " + std::to_string(values_line->second.size()) +
                           " values, expected " + std::to_string(*dim),
                       values_line->first, 1);
    AlphaVector v{std::vector<double>(*dim), static_cast<std::size_t>(*action), i};
    for (std::size_t s = 0; s < *dim; ++s) {
      auto x = parse_double(values_line->second[s]);
      if (!x || !std::isfinite(*x))
        throw ParseError("malformed number '" + values_line->second[s] + "'", values_line->first, 1);
      v.values[s] = *x;
    }
    vectors.push_back(std::move(v));
  }
  if (auto extra = next_line()) throw ParseError("trailing content after last vector", extra->first, 1);
  return AlphaSet(std::move(vectors), std::nullopt, mode);
}

std::string write_alpha(const AlphaSet& set) {
  std::string out = std::to_string(set.size()) + " " + std::to_string(set.num_states()) + "\n";
  for (const auto& v : set) {
    out += std::to_string(v.action);
    out += '\n';
    for (std::size_t s = 0; s < v.values.size(); ++s) {
      if (s) out += ' ';
      out += format_double(v.values[s]);
    }
    out += "\n\n";
  }
  return out;
}

double h_bound(const Pomdp& model, const AlphaSet& set, HBoundMode mode, const AlphaSet* worst) {
  if (mode == HBoundMode::loose) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& v : set) top = std::max(top, *std::max_element(v.values.begin(), v.values.end()));
    const double beta = model.discount();
    return top - beta * model.min_reward() / (1.0 - beta);
  }
  if (worst == nullptr) throw DomainError("tight h bound needs the minimize-mode set");
  if (worst->num_states() != set.num_states()) throw DomainError("alpha sets differ in dimension");
  double h = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < set.num_states(); ++s) {
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& v : set) hi = std::max(hi, v.values[s]);
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& w : *worst) lo = std::min(lo, w.values[s]);
    h = std::max(h, hi - lo);
  }
  return h;
}

}  // namespace vdpf
