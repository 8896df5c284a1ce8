#include "vdpf/simplex.hpp"

#include <algorithm>
#include <limits>

#include "vdpf/errors.hpp"

namespace vdpf {

namespace {
constexpr double kPivotTolerance = 1e-9;
constexpr double kRatioTieTolerance = 1e-12;

struct IterationLimit {};

// With `perturb`, each rhs gets a distinct tiny increase so no basis is
// degenerate and floating-point cycling cannot occur. The solution is then read
// back from the final basis applied to the original rhs.
LpSolution run_simplex(const LinearProgram& lp, bool perturb) {
  const std::size_t m = lp.rows;
  const std::size_t n = lp.cols;

  // Tableau: m constraint rows over n structural + m slack columns + rhs,
  // objective row last holding reduced costs (negated c).
  const std::size_t width = n + m + 1;
  std::vector<double> t((m + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t col) -> double& { return t[r * width + col]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) at(r, j) = lp.a[r * n + j];
    at(r, n + r) = 1.0;
    at(r, width - 1) = lp.b[r] + (perturb ? 1e-7 * (1.0 + static_cast<double>(r) / static_cast<double>(m)) : 0.0);
    basis[r] = n + r;
  }
  for (std::size_t j = 0; j < n; ++j) at(m, j) = -lp.c[j];

  LpSolution out;
  const std::size_t max_iterations = 50 * (m + n) + 1000;
  // Dantzig pricing until a run of degenerate pivots, then Bland for good.
  bool bland = false;
  std::size_t degenerate_run = 0;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_iterations) throw IterationLimit{};
    std::size_t enter = width;
    double most_negative = -kPivotTolerance;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (at(m, j) < most_negative) {
        enter = j;
        if (bland) break;
        most_negative = at(m, j);
      }
    }
    if (enter == width) break;
    // Exact minimum ratio first; near-ties go to the lowest basic index under
    // Bland, else to the largest pivot element.
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double coef = at(r, enter);
      if (coef > kPivotTolerance) best_ratio = std::min(best_ratio, at(r, width - 1) / coef);
    }
    std::size_t leave = m;
    for (std::size_t r = 0; r < m; ++r) {
      const double coef = at(r, enter);
      if (coef <= kPivotTolerance || at(r, width - 1) / coef > best_ratio + kRatioTieTolerance) continue;
      if (leave == m || (bland ? basis[r] < basis[leave] : coef > at(leave, enter))) leave = r;
    }
    if (leave == m) {
      out.bounded = false;
      return out;
    }
    if (best_ratio <= kPivotTolerance) {
      if (++degenerate_run > 20) bland = true;
    } else {
      degenerate_run = 0;
    }
    const double pivot = at(leave, enter);
    for (std::size_t j = 0; j < width; ++j) at(leave, j) /= pivot;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double factor = at(r, enter);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) at(r, j) -= factor * at(leave, j);
    }
    basis[leave] = enter;
    for (std::size_t r = 0; r < m; ++r)
      if (at(r, width - 1) < 0.0) at(r, width - 1) = 0.0;
  }
  out.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] >= n) continue;
    double v = at(r, width - 1);
    if (perturb) {
      // Slack columns hold the basis inverse.
      v = 0.0;
      for (std::size_t i = 0; i < m; ++i) v += at(r, n + i) * lp.b[i];
      v = std::max(v, 0.0);
    }
    out.x[basis[r]] = v;
  }
  out.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.objective += lp.c[j] * out.x[j];
  return out;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  for (double bi : lp.b)
    if (bi < 0.0) throw DomainError("solve_lp needs a non-negative right-hand side");
  try {
    return run_simplex(lp, false);
  } catch (const IterationLimit&) {
  }
  try {
    return run_simplex(lp, true);
  } catch (const IterationLimit&) {
    throw Error("simplex iteration limit reached");
  }
}

}  // namespace vdpf
