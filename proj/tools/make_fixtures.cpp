// Seeded generator for the synthetic benchmark models.
//
// template "random": each transition row puts mass on `support` successors;
// each observation row is a noisy reading of the arrival state's group
// (state mod |Z|) with the given accuracy.
//
// template "chain": a degrading machine. States are condition levels, 0 best.
// `run` degrades by one level with a random per-level probability and emits a
// weak alarm signal, `inspect` behaves like `run` but reads the condition half
// (good/bad) with the given accuracy, `repair` resets to level 0 at a cost.
//
// template "sensing": a many-door tiger. The hidden state is a type that only
// changes when one of the two `commit` actions resets it (to a seeded random
// distribution). `sense` leaves it alone and reports a binary signal whose
// per-type probability is drawn at random; each commit pays a random per-type
// reward.
//
// Probabilities are multiples of 1/64 and rewards multiples of 1/4 so the text
// form is exact.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <vector>

#include "vdpf/model.hpp"
#include "vdpf/pomdp_format.hpp"
#include "vdpf/rng.hpp"
#include "vdpf/text.hpp"

using namespace vdpf;

namespace {

// Rounds to multiples of 1/64 and fixes the last entry so the row sums to one exactly.
std::vector<double> dyadic_row(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    w[i] = std::max(1.0, std::round(w[i] / total * 64.0)) / 64.0;
    acc += w[i];
    last = i;
  }
  w[last] += 1.0 - acc;
  return w;
}

Pomdp generate(std::size_t ns, std::size_t na, std::size_t nz, std::size_t support, double accuracy,
               double discount, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> t, o, r;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t s = 0; s < ns; ++s) {
      std::vector<double> row(ns, 0.0);
      for (std::size_t k = 0; k < support; ++k) row[rng.below(ns)] += 0.25 + rng.uniform();
      row = dyadic_row(std::move(row));
      t.insert(t.end(), row.begin(), row.end());
    }
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t s = 0; s < ns; ++s) {
      std::vector<double> row(nz, (1.0 - accuracy) / static_cast<double>(nz - 1));
      row[s % nz] = accuracy;
      o.insert(o.end(), row.begin(), row.end());
    }
  for (std::size_t i = 0; i < ns * na; ++i) r.push_back(std::round(rng.uniform() * 40.0) / 4.0);
  return Pomdp(ns, na, nz, std::move(t), std::move(o), std::move(r), discount);
}

Pomdp generate_chain(std::size_t ns, double accuracy, double discount, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t na = 3, nz = 2;
  std::vector<double> t(na * ns * ns, 0.0), o(na * ns * nz, 0.0), r(ns * na, 0.0);
  auto tr = [&](std::size_t a, std::size_t s, std::size_t s2) -> double& { return t[(a * ns + s) * ns + s2]; };
  auto ob = [&](std::size_t a, std::size_t s2, std::size_t z) -> double& { return o[(a * ns + s2) * nz + z]; };
  // Output per level falls from about 10 towards 0.
  std::vector<double> output(ns);
  double level = 10.0;
  for (std::size_t s = 0; s < ns; ++s) {
    output[s] = std::round(level * 4.0) / 4.0;
    level -= (0.5 + rng.uniform()) * 10.0 / static_cast<double>(ns);
    level = std::max(level, 0.0);
  }
  const double repair_cost = std::round((4.0 + rng.uniform() * 4.0) * 4.0) / 4.0;
  const double inspect_cost = std::round((0.5 + rng.uniform()) * 4.0) / 4.0;
  for (std::size_t s = 0; s < ns; ++s) {
    const double p = s + 1 < ns ? std::round((0.15 + 0.3 * rng.uniform()) * 64.0) / 64.0 : 0.0;
    const double alarm = std::round((0.1 + 0.5 * static_cast<double>(s) / static_cast<double>(ns)) * 64.0) / 64.0;
    for (std::size_t a = 0; a < 2; ++a) {
      tr(a, s, s) = 1.0 - p;
      if (p > 0.0) tr(a, s, s + 1) = p;
    }
    tr(2, s, 0) = 1.0;
    const bool bad = 2 * s >= ns;
    ob(0, s, 1) = alarm;
    ob(0, s, 0) = 1.0 - alarm;
    ob(1, s, bad ? 1 : 0) = accuracy;
    ob(1, s, bad ? 0 : 1) = 1.0 - accuracy;
    ob(2, s, 0) = 1.0;
    r[s * na + 0] = output[s];
    r[s * na + 1] = output[s] - inspect_cost;
    r[s * na + 2] = -repair_cost;
  }
  Labels labels;
  for (std::size_t s = 0; s < ns; ++s) labels.states.push_back("level" + std::to_string(s));
  labels.actions = {"run", "inspect", "repair"};
  labels.observations = {"ok", "alarm"};
  return Pomdp(ns, na, nz, std::move(t), std::move(o), std::move(r), discount, std::move(labels));
}

Pomdp generate_sensing(std::size_t ns, double discount, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t na = 3, nz = 2;
  std::vector<double> t(na * ns * ns, 0.0), o(na * ns * nz, 0.0), r(ns * na, 0.0);
  std::vector<double> reset(ns);
  for (auto& x : reset) x = 0.5 + rng.uniform();
  reset = dyadic_row(std::move(reset));
  for (std::size_t s = 0; s < ns; ++s) {
    t[(0 * ns + s) * ns + s] = 1.0;
    for (std::size_t a = 1; a < na; ++a)
      for (std::size_t s2 = 0; s2 < ns; ++s2) t[(a * ns + s) * ns + s2] = reset[s2];
    // Types in the upper half tend to signal high; the lower half low.
    const bool upper = 2 * s >= ns;
    const double q = std::round((upper ? 0.75 + 0.1 * rng.uniform() : 0.15 + 0.1 * rng.uniform()) * 64.0) / 64.0;
    o[(0 * ns + s) * nz + 0] = 1.0 - q;
    o[(0 * ns + s) * nz + 1] = q;
    for (std::size_t a = 1; a < na; ++a) o[(a * ns + s) * nz + 0] = o[(a * ns + s) * nz + 1] = 0.5;
    r[s * na + 0] = -1.0;
    // commit-a pays off on the lower half, commit-b on the upper half.
    const double gain = 5.0 + 10.0 * rng.uniform(), loss = -(20.0 + 30.0 * rng.uniform());
    r[s * na + 1] = std::round((upper ? loss : gain) * 4.0) / 4.0;
    r[s * na + 2] = std::round((upper ? gain : loss) * 4.0) / 4.0;
  }
  Labels labels;
  for (std::size_t s = 0; s < ns; ++s) labels.states.push_back("type" + std::to_string(s));
  labels.actions = {"sense", "commit-a", "commit-b"};
  labels.observations = {"low", "high"};
  return Pomdp(ns, na, nz, std::move(t), std::move(o), std::move(r), discount, std::move(labels));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic POMDP fixture generator"};
  std::size_t ns = 8, na = 3, nz = 2, support = 2;
  double accuracy = 0.75, discount = 0.9;
  std::uint64_t seed = 1;
  std::string out, kind = "chain";
  app.add_option("--template", kind)->check(CLI::IsMember({"chain", "random", "sensing"}));
  app.add_option("--states", ns);
  app.add_option("--actions", na);
  app.add_option("--observations", nz)->check(CLI::Range(2, 1000));
  app.add_option("--support", support);
  app.add_option("--accuracy", accuracy);
  app.add_option("--discount", discount);
  app.add_option("--seed", seed);
  app.add_option("-o,--out", out);
  CLI11_PARSE(app, argc, argv);
  try {
    const std::string text = "# synthetic model, seed " + std::to_string(seed) + "\n" +
                             write_pomdp(kind == "chain"     ? generate_chain(ns, accuracy, discount, seed)
                                       : kind == "sensing" ? generate_sensing(ns, discount, seed)
                                                           : generate(ns, na, nz, support, accuracy, discount, seed));
    if (out.empty()) std::cout << text;
    else write_file(out, text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
