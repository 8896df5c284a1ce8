#include "doctest.h"

#include <algorithm>

#include "test_support.hpp"
#include "vdpf/errors.hpp"
#include "vdpf/filter.hpp"

using namespace vdpf;
using vdpf::testing::tiger;

TEST_CASE("particle set invariants") {
  CHECK_THROWS_AS(ParticleSet({}), DomainError);
  CHECK_THROWS_AS(ParticleSet({{0, -1.0}}), DomainError);
  CHECK_THROWS_AS(ParticleSet({{0, 0.0}, {1, 0.0}}), DomainError);
  const ParticleSet p({{0, 1}, {1, 1}, {1, 2}});
  CHECK(p.total_weight() == 4.0);
}

TEST_CASE("to_belief") {
  CHECK(to_belief(ParticleSet({{2, 1}, {2, 3}}), 3) == Belief::point(3, 2));
  const Belief b = to_belief(ParticleSet({{0, 1}, {1, 1}, {1, 2}}), 2);
  CHECK(b[0] == 0.25);
  CHECK(b[1] == 0.75);
}

TEST_CASE("sis_step") {
  const Pomdp chain = vdpf::testing::deterministic_chain(4);
  Rng rng(1);
  const ParticleSet out = sis_step(chain, ParticleSet({{0, 1}, {0, 1}}), 0, 1, 5, rng);
  CHECK(out.size() == 5);
  for (const auto& q : out.particles()) CHECK(q == Particle{1, 1.0});
  CHECK_THROWS_AS(sis_step(chain, ParticleSet({{0, 1}}), 0, 3, 5, rng), ParticleDepletion);
}

TEST_CASE("reweight") {
  const Pomdp m = tiger();
  // Open actions emit uniform observations: weights unchanged up to normalization.
  const ParticleSet p({{0, 2}, {1, 6}});
  const ParticleSet r = reweight(m, p, 1, 0);
  CHECK(r[0].weight == doctest::Approx(0.25));
  CHECK(r[1].weight == doctest::Approx(0.75));
  // Listening: likelihoods 0.85 and 0.15.
  const ParticleSet l = reweight(m, ParticleSet({{0, 1}, {1, 1}}), 0, 0);
  CHECK(l[0].weight == doctest::Approx(0.85).epsilon(1e-14));
  CHECK(l[1].weight == doctest::Approx(0.15).epsilon(1e-14));
  const Pomdp chain = vdpf::testing::deterministic_chain(3);
  CHECK_THROWS_AS(reweight(chain, ParticleSet({{0, 1}}), 0, 0), ImpossibleEvidence);
}

TEST_CASE("reweight matches a 0.9/0.1 likelihood pair") {
  // Two states, identity dynamics, observation 0 with likelihoods 0.9 and 0.1.
  const Pomdp m(2, 1, 2, {1, 0, 0, 1}, {0.9, 0.1, 0.1, 0.9}, {0, 0}, 0.9);
  const ParticleSet r = reweight(m, ParticleSet({{0, 1}, {1, 1}}), 0, 0);
  CHECK(r[0].weight == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(r[1].weight == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("ei_step") {
  const Pomdp chain = vdpf::testing::deterministic_chain(4);
  Rng rng(2);
  const ParticleSet out = ei_step(chain, ParticleSet({{3, 1}}), 0, 0, 7, rng);
  CHECK(out.size() == 7);
  for (const auto& q : out.particles()) CHECK(q == Particle{0, 1.0});

  const Pomdp m = tiger();
  const ParticleSet prior = ParticleSet::sample(Belief({0.3, 0.7}), 50, rng);
  for (auto mode : {Resampling::multinomial, Resampling::systematic}) {
    const ParticleSet e = ei_step(m, prior, 0, 1, 64, rng, mode);
    for (const auto& q : e.particles()) CHECK(q.weight == 1.0);
  }
}

TEST_CASE("filters are bit-reproducible") {
  const Pomdp m = tiger();
  auto run = [&](bool ei) {
    Rng rng(77);
    ParticleSet p = ParticleSet::sample(Belief::uniform(2), 100, rng);
    for (int t = 0; t < 5; ++t) p = ei ? ei_step(m, p, 0, t % 2, 100, rng) : sis_step(m, p, 0, t % 2, 100, rng);
    return p;
  };
  CHECK(run(true) == run(true));
  CHECK(run(false) == run(false));
}

TEST_CASE("ei_step is unbiased for the exact update") {
  Rng mrng(3);
  const Pomdp m = vdpf::testing::random_model(mrng, 4, 2, 3);
  const Belief prior({0.1, 0.2, 0.3, 0.4});
  std::size_t a = 1, o = 0;
  while (obs_probability(m, prior, a, o) == 0.0) ++o;
  const Belief exact = belief_update(m, prior, a, o);
  Rng rng(5);
  std::vector<double> mean(4, 0.0);
  const int runs = 2000;
  for (int i = 0; i < runs; ++i) {
    const Belief b = to_belief(ei_step(m, ParticleSet::exact(prior), a, o, 50, rng), 4);
    for (std::size_t s = 0; s < 4; ++s) mean[s] += b[s] / runs;
  }
  // Standard error of each coordinate is at most 0.5 / sqrt(50 * 2000).
  for (std::size_t s = 0; s < 4; ++s) CHECK(std::abs(mean[s] - exact[s]) <= 5 * 0.5 / std::sqrt(50.0 * runs));
}

TEST_CASE("both filters track the exact update on tiger") {
  const Pomdp m = tiger();
  int sis_ok = 0, ei_ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = Rng::stream(seed, 0, 0);
    const Belief prior = sample_uniform_belief(2, rng);
    const ParticleSet p = ParticleSet::sample(prior, 10000, rng);
    const Belief exact = belief_update(m, to_belief(p, 2), 0, 0);
    sis_ok += total_variation(to_belief(sis_step(m, p, 0, 0, 10000, rng), 2).probs(), exact.probs()) <= 0.05;
    ei_ok += total_variation(to_belief(ei_step(m, p, 0, 0, 10000, rng), 2).probs(), exact.probs()) <= 0.05;
  }
  CHECK(sis_ok >= 95);
  CHECK(ei_ok >= 95);
}

TEST_CASE("ei error shrinks with more particles on 5-step tiger rollouts") {
  const Pomdp m = tiger();
  auto median_tv = [&](std::size_t n) {
    std::vector<double> tv;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng env = Rng::stream(seed, 1, 0), rng = Rng::stream(seed, 1, 1);
      std::size_t s = sample_state(Belief::uniform(2), env);
      Belief exact = Belief::uniform(2);
      ParticleSet p = ParticleSet::sample(exact, n, rng);
      for (int t = 0; t < 5; ++t) {
        const auto step = simulate_step(m, s, 0, env);
        s = step.next_state;
        exact = belief_update(m, exact, 0, step.observation);
        p = ei_step(m, p, 0, step.observation, n, rng);
      }
      tv.push_back(total_variation(to_belief(p, 2).probs(), exact.probs()));
    }
    std::nth_element(tv.begin(), tv.begin() + 50, tv.end());
    return tv[50];
  };
  CHECK(median_tv(10000) < median_tv(100));
}

TEST_CASE("effective sample size") {
  CHECK(effective_sample_size(ParticleSet({{0, 1}, {1, 1}, {0, 1}})) == doctest::Approx(3.0));
  CHECK(effective_sample_size(ParticleSet({{0, 1}, {1, 0}})) == 1.0);
  CHECK(effective_sample_size(ParticleSet({{0, 3}, {1, 1}})) == doctest::Approx(1.6));
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    std::vector<Particle> v;
    const std::size_t n = 1 + rng.below(20);
    for (std::size_t k = 0; k < n; ++k) v.push_back({0, rng.uniform() + (k == 0)});
    const double ess = effective_sample_size(ParticleSet(v));
    CHECK(ess >= 1.0 - 1e-12);
    CHECK(ess <= n + 1e-9);
  }
}

TEST_CASE("sampling from a particle set follows the weights") {
  const ParticleSet p({{0, 1}, {1, 0}, {2, 3}});
  const ParticleSampler sampler(p);
  Rng rng(10);
  std::vector<double> hist(3, 0.0);
  for (int i = 0; i < 40000; ++i) hist[sampler.draw_state(rng)] += 1.0 / 40000;
  CHECK(hist[1] == 0.0);
  CHECK(hist[0] == doctest::Approx(0.25).epsilon(0.05));
}
