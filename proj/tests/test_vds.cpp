#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "test_support.hpp"
#include "vdpf/errors.hpp"
#include "vdpf/vds.hpp"

using namespace vdpf;
using vdpf::testing::tiger;

namespace {

// Recomputes every look of a selection from the pooled samples, without the library's selector.
struct Replay {
  std::vector<BatchLook> looks;
  double tau;
};

Replay replay(const Selection& sel, const AlphaSet& set, const SamplingPlan& plan) {
  Replay out;
  const std::size_t k = set.size();
  for (std::size_t j = 0; j < sel.report.looks.size(); ++j) {
    const std::size_t n = sel.report.looks[j].samples;
    const double dj = plan.schedule == DeltaSchedule::uniform ? plan.delta / *plan.max_batches
                                                              : plan.delta / ((j + 1.0) * (j + 2.0));
    std::vector<double> est(k, 0.0), eps(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t q = 0; q < n; ++q) est[i] += set[i].values[sel.particles[q].state];
      est[i] /= n;
      const double r = alpha_range(set[i]);
      eps[i] = std::sqrt(r * r * std::log(k / dj) / (2.0 * n));
    }
    std::size_t lead = 0;
    for (std::size_t i = 1; i < k; ++i)
      if (est[i] > est[lead]) lead = i;
    // Near-ties may resolve differently under another summation order.
    const std::size_t logged = sel.report.looks[j].leader;
    if (est[logged] >= est[lead] - 1e-9) lead = logged;
    double tau = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i)
      if (i != lead) tau = std::max(tau, est[i] + eps[i] - est[lead] + eps[lead]);
    out.looks.push_back({n, dj, lead, tau});
  }
  const std::size_t final_leader = out.looks.back().leader;
  out.tau = std::numeric_limits<double>::infinity();
  for (const auto& l : out.looks)
    if (l.leader == final_leader) out.tau = std::min(out.tau, l.tau);
  return out;
}

}  // namespace

TEST_CASE("plan validation") {
  SamplingPlan p;
  CHECK_THROWS_AS(p.validate(), DomainError);  // uniform without B
  p.max_batches = 4;
  CHECK_NOTHROW(p.validate());
  p.schedule = DeltaSchedule::harmonic;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.max_batches.reset();
  CHECK_THROWS_AS(p.validate(), DomainError);  // formula needs B
  p.batch_size = 10;
  CHECK_NOTHROW(p.validate());
  p.delta = 1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("harmonic schedule sums to delta") {
  SamplingPlan p{.delta = 0.1, .batch_size = 5, .schedule = DeltaSchedule::harmonic};
  double sum = 0.0;
  for (std::size_t j = 1; j <= 100000; ++j) {
    sum += p.look_delta(j);
    CHECK(sum <= p.delta * (1 + 1e-12));
    if (j == 1 || j == 10 || j == 1000 || j == 100000)
      CHECK(sum == doctest::Approx(p.delta * j / (j + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("batch formula example") {
  SamplingPlan p{.epsilon = 0.5, .delta = 0.1, .max_batches = 4};
  CHECK(p.batch_samples(10, 2.0) == 12);
}

TEST_CASE("single vector set stops after one look") {
  const AlphaSet one({{{1, 2}, 0, 0}});
  SamplingPlan p{.epsilon = 0.5, .delta = 0.1, .max_batches = 5};
  Rng rng(1);
  const Selection s = dynamic_select([](Rng& r) { return r.below(2); }, one, p, rng);
  CHECK(s.report.batches_used == 1);
  CHECK(s.report.separated);
  CHECK(s.report.tau == -std::numeric_limits<double>::infinity());
  CHECK(s.report.confidence_spent == doctest::Approx(0.02));
  CHECK(s.particles.size() == s.report.samples_used);
  CHECK(s.report.samples_used == p.batch_samples(1, one.max_range()));
}

TEST_CASE("selection log replays independently") {
  const Pomdp m = tiger();
  const AlphaSet set = solve(m, {.horizon = 3});
  for (int variant = 0; variant < 2; ++variant) {
    SamplingPlan plan{.epsilon = 0.5, .delta = 0.1};
    if (variant == 0) {
      plan.max_batches = 6;
      plan.stop_threshold = 1.0;
    } else {
      plan.schedule = DeltaSchedule::harmonic;
      plan.batch_size = 25;
      plan.look_limit = 50;
    }
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng = Rng::stream(seed, 5, variant);
      const Belief prior = sample_uniform_belief(2, rng);
      const ParticleSet p = ParticleSet::sample(prior, 30, rng);
      const std::size_t o = rng.below(2);
      const Selection sel = dynamic_select(m, p, 0, o, set, plan, rng);
      const auto& rep = sel.report;
      const Replay r = replay(sel, set, plan);
      REQUIRE(r.looks.size() == rep.looks.size());
      double spent = 0.0;
      std::size_t expected_samples = 0;
      for (std::size_t j = 0; j < r.looks.size(); ++j) {
        expected_samples += plan.batch_samples(set.size(), set.max_range());
        CHECK(rep.looks[j].samples == expected_samples);
        CHECK(rep.looks[j].leader == r.looks[j].leader);
        CHECK(std::abs(rep.looks[j].tau - r.looks[j].tau) <= 1e-9);
        spent += r.looks[j].delta;
      }
      CHECK(std::abs(rep.tau - r.tau) <= 1e-9);
      CHECK(rep.confidence_spent == doctest::Approx(spent).epsilon(1e-12));
      CHECK(rep.confidence_spent <= plan.delta * (1 + 1e-12));
      CHECK(rep.samples_used == expected_samples);
      CHECK(rep.chosen == r.looks.back().leader);
      CHECK(rep.separated == (rep.tau <= plan.stop_threshold));
      for (const auto& q : sel.particles.particles()) CHECK(q.weight == 1.0);
    }
  }
}

TEST_CASE("separated selections pick the exact maximizer with frequency at least 1 - delta") {
  const Pomdp m = tiger();
  const AlphaSet set = solve(m, {.horizon = 3});
  const SamplingPlan plan{.epsilon = 0.5, .delta = 0.1, .batch_size = 20, .schedule = DeltaSchedule::harmonic,
                          .look_limit = 200};
  int separated = 0, correct = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng rng = Rng::stream(seed, 9, 0);
    const ParticleSet p = ParticleSet::sample(sample_uniform_belief(2, rng), 40, rng);
    const std::size_t o = rng.below(2);
    const Selection sel = dynamic_select(m, p, 0, o, set, plan, rng);
    if (!sel.report.separated) continue;
    ++separated;
    const Belief exact = belief_update(m, to_belief(p, 2), 0, o);
    const double best = value_and_ma(set, exact).value;
    correct += dot(set[sel.report.chosen].values, exact.probs()) >= best - 1e-12;
  }
  REQUIRE(separated >= 400);
  const double rate = static_cast<double>(correct) / separated;
  // One-sided 99% lower confidence bound on the success rate.
  const double lower = rate - 2.326 * std::sqrt(rate * (1 - rate) / separated);
  MESSAGE("separated " << separated << ", correct " << correct);
  CHECK(lower >= 1 - plan.delta - 1e-12);
}
