#include "vdpf/rng.hpp"

#include <cmath>

namespace vdpf {

double Rng::exponential() {
  // Open interval (0, 1): the variate is finite and strictly positive.
  const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  return -std::log(u);
}

std::size_t Rng::categorical(std::span<const double> weights, double total) {
  const double u = uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding can leave u just above the accumulated sum.
  return last_positive;
}

}  // namespace vdpf
