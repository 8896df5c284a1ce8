// Acceptance checks. Prints one PASS/FAIL line per criterion (indented detail
// lines follow it) and exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "test_support.hpp"
#include "vdpf/bounds.hpp"
#include "vdpf/filter.hpp"
#include "vdpf/harness.hpp"
#include "vdpf/text.hpp"
#include "vdpf/valuefn.hpp"
#include "vdpf/vds.hpp"

using namespace vdpf;
using vdpf::testing::fixture;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("failed: " + what);
    }
  }
  void note(const std::string& what) { details.push_back(what); }
};

template <class... T>
std::string cat(const T&... parts) {
  std::ostringstream out;
  out.precision(6);
  (out << ... << parts);
  return out.str();
}

int failures = 0;

void criterion(const std::string& id, const std::string& title, double limit_seconds,
               const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0.0) out.require(seconds < limit_seconds, cat("runtime ", seconds, " s < ", limit_seconds, " s"));
  failures += !out.pass;
  std::cout << (out.pass ? "PASS " : "FAIL ") << id << ' ' << title << " (" << cat(seconds) << " s)\n";
  for (const auto& d : out.details) std::cout << "    " << d << '\n';
  std::cout.flush();
}

// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(std::size_t k, std::size_t n, double p) {
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return k >= n ? 1.0 : 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                           static_cast<double>(i) * std::log(p) + static_cast<double>(n - i) * std::log1p(-p);
    total += std::exp(log_pmf);
  }
  return std::min(total, 1.0);
}

// One-sided Clopper-Pearson upper bound on a rate after k events in n trials.
double binomial_upper(std::size_t k, std::size_t n, double confidence) {
  if (k >= n) return 1.0;
  double lo = static_cast<double>(k) / static_cast<double>(n), hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (binomial_cdf(k, n, mid) > 1.0 - confidence ? lo : hi) = mid;
  }
  return hi;
}

// Standard normal upper quantile z with P(Z > z) = tail.
double normal_upper_quantile(double tail) {
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > tail ? lo : hi) = mid;
  }
  return hi;
}

struct PairedStat {
  double mean;
  double se;
};

PairedStat paired_stat(const std::vector<double>& d) {
  const double n = static_cast<double>(d.size());
  double sum = 0.0;
  for (double x : d) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::size_t worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

void c1_exact_filter(Outcome& out) {
  Rng rng(101);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t ns = 1 + rng.below(8), na = 1 + rng.below(3), nz = 1 + rng.below(4);
    const Pomdp m = vdpf::testing::random_model(rng, ns, na, nz);
    const auto b = vdpf::testing::random_distribution(ns, rng);
    const std::size_t a = rng.below(na);
    std::size_t o = rng.below(nz);
    while (vdpf::testing::brute_force_evidence(m, b, a, o) <= 0.0) o = (o + 1) % nz;
    const Belief got = belief_update(m, Belief(b), a, o);
    const auto want = vdpf::testing::brute_force_update(m, b, a, o);
    for (std::size_t s = 0; s < ns; ++s) worst = std::max(worst, std::abs(got[s] - want[s]));
  }
  out.note(cat("max coordinate error ", worst, " over 100 models"));
  out.require(worst <= 1e-12, "every coordinate within 1e-12");
}

void c2_solver(Outcome& out) {
  const Pomdp m = load_pomdp(fixture("tiger.pomdp"));
  const AlphaSet one = solve(m, {.horizon = 1});
  bool rows_ok = one.size() == m.num_actions();
  for (const auto& v : one)
    for (std::size_t s = 0; s < m.num_states(); ++s) rows_ok = rows_ok && v.values[s] == m.reward(s, v.action);
  out.require(rows_ok, "horizon-1 vectors equal the reward rows");
  Rng rng(102);
  double worst = 0.0;
  for (std::size_t h = 1; h <= 4; ++h) {
    const AlphaSet none = solve(m, {.horizon = h, .prune = Prune::none});
    const AlphaSet point = solve(m, {.horizon = h, .prune = Prune::pointwise});
    const AlphaSet lp = solve(m, {.horizon = h, .prune = Prune::lp});
    out.note(cat("horizon ", h, ": sizes none ", none.size(), ", pointwise ", point.size(), ", lp ", lp.size()));
    for (int i = 0; i < 1000; ++i) {
      const Belief b = sample_uniform_belief(2, rng);
      const double v = value_and_ma(none, b).value;
      worst = std::max({worst, std::abs(v - value_and_ma(point, b).value), std::abs(v - value_and_ma(lp, b).value)});
    }
  }
  out.note(cat("max value difference ", worst));
  out.require(worst <= 1e-9, "values agree within 1e-9");
}

void c3_unbiased(Outcome& out) {
  Rng rng(103);
  const int runs = 1000;
  const std::size_t n_out = 100;
  double max_z = 0.0;
  std::size_t coords = 0, outside = 0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t ns = 2 + rng.below(7), na = 1 + rng.below(3), nz = 2 + rng.below(3);
    const Pomdp m = vdpf::testing::random_model(rng, ns, na, nz);
    const auto prior = vdpf::testing::random_distribution(ns, rng);
    const std::size_t a = rng.below(na);
    std::size_t o = rng.below(nz);
    while (vdpf::testing::brute_force_evidence(m, prior, a, o) <= 0.0) o = (o + 1) % nz;
    const auto exact = vdpf::testing::brute_force_update(m, prior, a, o);
    std::vector<double> mean(ns, 0.0);
    const ParticleSet p = ParticleSet::exact(Belief(prior));
    for (int r = 0; r < runs; ++r) {
      const Belief b = to_belief(ei_step(m, p, a, o, n_out, rng), ns);
      for (std::size_t s = 0; s < ns; ++s) mean[s] += b[s];
    }
    for (std::size_t s = 0; s < ns; ++s) {
      mean[s] /= runs;
      // Each run's coordinate is a multinomial frequency over n_out posterior draws.
      const double se = std::sqrt(exact[s] * (1.0 - exact[s]) / static_cast<double>(n_out * runs));
      const double err = std::abs(mean[s] - exact[s]);
      ++coords;
      if (se == 0.0) {
        outside += err > 1e-12;
        continue;
      }
      max_z = std::max(max_z, err / se);
      outside += err > 3.0 * se;
    }
  }
  out.note(cat(coords, " coordinates, max |error| / SE = ", max_z, ", beyond 3 SE: ", outside));
  out.require(outside == 0, "every coordinate within 3 standard errors");
}

void c4_hoeffding(Outcome& out) {
  Rng rng(104);
  const std::size_t reps = 10'000;
  // Bernoulli(0.5) on [0, 1] and a skewed three-point law on [0, 4].
  struct Law {
    const char* name;
    double range;
    double mean;
    std::function<double(Rng&)> draw;
  };
  const std::vector<Law> laws = {
      {"bernoulli(0.5)", 1.0, 0.5, [](Rng& r) { return r.uniform() < 0.5 ? 1.0 : 0.0; }},
      {"three-point", 4.0, 0.1 * 4.0 + 0.3 * 1.0,
       [](Rng& r) {
         const double u = r.uniform();
         return u < 0.1 ? 4.0 : (u < 0.4 ? 1.0 : 0.0);
       }},
  };
  for (const auto& law : laws)
    for (double delta : {0.05, 0.1})
      for (std::size_t n : {std::size_t{10}, std::size_t{100}}) {
        const double eps = epsilon_bound(law.range, delta, n);
        std::size_t over = 0, under = 0;
        for (std::size_t i = 0; i < reps; ++i) {
          double sum = 0.0;
          for (std::size_t j = 0; j < n; ++j) sum += law.draw(rng);
          const double est = sum / static_cast<double>(n);
          over += est - law.mean > eps;
          under += law.mean - est > eps;
        }
        const std::size_t worst = std::max(over, under);
        const double upper = binomial_upper(worst, reps, 0.99);
        out.note(cat(law.name, " delta ", delta, " n ", n, ": violation rate ", static_cast<double>(worst) / reps,
                     ", 99% upper bound ", upper));
        out.require(upper <= delta, cat(law.name, " delta ", delta, " n ", n, " upper bound <= delta"));
      }
}

void c5_formulas(Outcome& out) {
  const double closed = multistage_bound(1.0, 0.5, 0.1);
  out.note(cat("multistage_bound(1, 0.5, 0.1) - 1/11 = ", closed - 1.0 / 11.0));
  out.require(std::abs(closed - 1.0 / 11.0) <= 1e-12, "1/11 within 1e-12");
  double worst = 0.0;
  for (double h : {1.0, 37.5})
    for (double beta : {0.5, 0.9, 0.95})
      for (double delta : {0.01, 0.1, 0.5}) {
        double series = 0.0, geo = 1.0, disc = 1.0;
        for (int t = 1; t <= 10'000; ++t) {
          disc *= beta;
          series += delta * geo * disc * h;
          geo *= 1.0 - delta;
        }
        worst = std::max(worst, std::abs(series - multistage_bound(h, beta, delta)));
      }
  out.note(cat("max |closed form - series| ", worst));
  out.require(worst <= 1e-9, "series agreement within 1e-9");
  const std::size_t m = formula_batch_size(2.0, 0.5, 4, 10, 0.1);
  out.note(cat("batch size (B=4, R=2, eps=0.5, |set|=10, delta=0.1) = ", m));
  out.require(m == 12, "batch size 12");
}

void c6_dynamic_confidence(Outcome& out) {
  const Pomdp m = load_pomdp(fixture("separation.pomdp"));
  const AlphaSet set = solve(m, {.horizon = 1});
  const Belief b = *m.start();
  const std::size_t best = value_and_ma(set, b).id;
  SamplingPlan plan;
  plan.epsilon = 1.0;
  plan.delta = 0.1;
  plan.max_batches = 10;
  plan.validate();
  const ParticleSet prior = ParticleSet::exact(b);
  const ParticleSampler sampler(prior);
  std::size_t separated = 0, wrong = 0;
  const std::size_t seeds = 2000;
  for (std::size_t seed = 0; seed < seeds; ++seed) {
    Rng rng = Rng::stream(106, seed, 0);
    const Selection sel = dynamic_select([&](Rng& r) { return sampler.draw_state(r); }, set, plan, rng);
    if (!sel.report.separated) continue;
    ++separated;
    wrong += set[sel.report.chosen].values != set[best].values;
  }
  const double upper = separated ? binomial_upper(wrong, separated, 0.99) : 1.0;
  out.note(cat(separated, " of ", seeds, " runs separated, ", wrong, " chose a non-maximizer, 99% upper miss rate ",
               upper));
  out.require(separated >= 1000, "at least 1000 separated runs");
  out.require(upper <= plan.delta, "miss rate upper bound <= delta");
}

// Paired nonincrease test for losses over growing particle counts.
void trend_on(Outcome& out, const std::string& name, const Pomdp& model, const Schedules& schedules,
              double z_crit) {
  ExperimentConfig c;
  c.model_path = name;
  c.policies = {Policy::pf_ei};
  c.particles = {20, 40, 80, 160};
  c.trials = 2000;
  c.threads = worker_threads();
  const AlphaSet& first = schedules.values.at(schedules.values.horizon());
  for (bool single : {true, false}) {
    c.single_stage = single;
    const ExperimentResult r = run_experiment(model, schedules, c);
    const std::string mode = single ? "single-stage" : "cumulative";
    std::string means;
    for (const auto& s : r.summaries) means += cat(" n", s.particles, "=", s.mean_loss, "+-", s.loss_stderr);
    out.note(name + " " + mode + ":" + means);
    for (std::size_t i = 0; i + 1 < r.records.size(); ++i) {
      std::vector<double> d;
      for (std::size_t t = 0; t < c.trials; ++t) d.push_back(r.records[i + 1][t].loss - r.records[i][t].loss);
      const PairedStat p = paired_stat(d);
      const double z = p.se > 0.0 ? p.mean / p.se : (p.mean > 0.0 ? INFINITY : 0.0);
      out.note(cat("  ", mode, " n", c.particles[i + 1], " - n", c.particles[i], ": mean ", p.mean, " se ", p.se,
                   " z ", z));
      out.require(z <= z_crit, cat(name, " ", mode, " loss does not rise from n=", c.particles[i], " to n=",
                                   c.particles[i + 1]));
    }
    if (single) {
      for (const auto& s : r.summaries) {
        const double bound = report_2epsilon(first, s.particles, c.plan.delta);
        out.require(bound >= s.mean_loss, cat(name, " 2 epsilon ", bound, " >= mean loss at n=", s.particles));
      }
    }
  }
}

void c7_trend(Outcome& out) {
  // Two models x two modes x three adjacent steps, one-sided, family-wise 5%.
  const double z_crit = normal_upper_quantile(0.05 / 12.0);
  out.note(cat("one-sided critical z ", z_crit));
  for (const char* file : {"tiger.pomdp", "synthetic8.pomdp"}) {
    const Pomdp model = load_pomdp(fixture(file));
    ExperimentConfig c;
    const auto start = std::chrono::steady_clock::now();
    const Schedules schedules = prepare_schedules(model, c);
    out.note(cat(file, ": 15-stage schedule solved in ",
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), " s, ",
                 schedules.values.at(15).size(), " vectors at the first stage"));
    trend_on(out, file, model, schedules, z_crit);
  }
}

void c8_batches(Outcome& out) {
  ExperimentConfig c;
  c.model_path = fixture("separation.pomdp");
  c.policies = {Policy::pf_dynamic};
  c.batches.clear();
  for (std::size_t b = 1; b <= 10; ++b) c.batches.push_back(b);
  c.plan.epsilon = 1.0;
  c.plan.delta = 0.1;
  c.stop_at_two_epsilon = true;
  c.single_stage = true;
  c.stages = 1;
  c.initial = InitialBelief::start;
  c.trials = 2000;
  c.threads = worker_threads();
  const Pomdp model = load_pomdp(c.model_path);
  const ExperimentResult r = run_experiment(model, prepare_schedules(model, c), c);
  if (r.records.size() != 10) {
    out.require(false, "ten batch limits");
    return;
  }
  const double z_crit = normal_upper_quantile(0.05 / 9.0);
  const auto& base = r.records[0];
  out.note(cat("B=1 mean samples ", r.summaries[0].mean_samples));
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    std::vector<double> d;
    for (std::size_t t = 0; t < c.trials; ++t)
      d.push_back(static_cast<double>(r.records[i][t].samples_total) - static_cast<double>(base[t].samples_total));
    const PairedStat p = paired_stat(d);
    const double z = p.se > 0.0 ? p.mean / p.se : (p.mean > 0.0 ? INFINITY : 0.0);
    out.note(cat("B=", i + 1, " mean samples ", r.summaries[i].mean_samples, ", mean batches ",
                 r.summaries[i].mean_batches, ", paired difference ", p.mean, " z ", z));
    out.require(z <= z_crit, cat("B=", i + 1, " needs no more samples than B=1"));
  }
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + VDPF_CLI_PATH + "' " + args;
  const int raw = std::system(cmd.c_str());
  if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) throw std::runtime_error("CLI failed: " + args);
  return cmd;
}

void c9_determinism(Outcome& out) {
  const auto dir = std::filesystem::temp_directory_path() / "vdpf_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string base = "experiment --model '" + fixture("tiger.pomdp") +
                           "' --policies exact,pf_sis,pf_ei,pf_dynamic,random --particles 20,80 --batches 1,3 --epsilon 20 "
                           "--trials 200 --seed 42";
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string(), c = (dir / "c.csv").string(),
                    other = (dir / "other.csv").string();
  run_cli(base + " --output '" + a + "' > /dev/null 2>&1");
  run_cli(base + " --output '" + b + "' > /dev/null 2>&1");
  run_cli(base + " --threads 4 --output '" + c + "' > /dev/null 2>&1");
  run_cli("experiment --model '" + fixture("tiger.pomdp") +
          "' --policies exact,pf_sis,pf_ei,pf_dynamic,random --particles 20,80 --batches 1,3 --epsilon 20 --trials 200 --seed 43 "
          "--output '" + other + "' > /dev/null 2>&1");
  const std::string ta = read_file(a), tb = read_file(b), tc = read_file(c), to = read_file(other);
  out.note(cat("CSV size ", ta.size(), " bytes"));
  out.require(!ta.empty() && ta == tb, "repeated run is byte-identical");
  out.require(ta == tc, "thread count does not change the bytes");
  out.require(ta != to, "a different seed changes the output");
  const std::string mon = "monitor --model '" + fixture("synthetic8.pomdp") +
                          "' --horizon 6 --stages 6 --policies pf_dynamic --batches 3 --trial 5 --seed 8";
  run_cli(mon + " > '" + (dir / "m1.txt").string() + "' 2>&1");
  run_cli(mon + " > '" + (dir / "m2.txt").string() + "' 2>&1");
  out.require(read_file((dir / "m1.txt").string()) == read_file((dir / "m2.txt").string()),
              "repeated monitor trace is byte-identical");
  std::filesystem::remove_all(dir);
}

}  // namespace

int main() {
  criterion("C1", "exact filter matches brute-force Bayes", 1.0, c1_exact_filter);
  criterion("C2", "pruning levels agree on tiger", 10.0, c2_solver);
  criterion("C3", "evidence integration is unbiased", 30.0, c3_unbiased);
  criterion("C4", "Hoeffding coverage", 30.0, c4_hoeffding);
  criterion("C5", "bound formula spot checks", 1.0, c5_formulas);
  criterion("C6", "separated dynamic selections are correct", 60.0, c6_dynamic_confidence);
  criterion("C7", "losses do not rise with particle count", 300.0, c7_trend);
  criterion("C8", "batching reduces samples to 2-epsilon separation", 300.0, c8_batches);
  criterion("C9", "CLI output is deterministic", 0.0, c9_determinism);
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " of 9 criteria failed\n";
  return failures ? 1 : 0;
}
