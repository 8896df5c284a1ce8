#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vdpf {

/// Dense LP in the form
///   maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0,
/// so the all-slack basis is feasible and no phase one is needed. Pricing is
/// Dantzig's rule, falling back to Bland's after repeated degenerate pivots;
/// if that still stalls the rhs is perturbed. A is row-major (rows x cols).
struct LinearProgram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
};

struct LpSolution {
  bool bounded = true;
  double objective = 0.0;
  std::vector<double> x;
};

LpSolution solve_lp(const LinearProgram& lp);

}  // namespace vdpf
