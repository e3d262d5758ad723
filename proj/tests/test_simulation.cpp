#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "recapc/errors.hpp"
#include "recapc/rng.hpp"
#include "recapc/simulation.hpp"

#include "support.hpp"

using namespace recapc;
using testsupport::example1;
using testsupport::make;

TEST_CASE("sessions are reproducible and order-independent") {
  Instance instance = example1();
  Policy tail_k2{{}, 1};

  SimulationSummary a = simulate_many(instance, tail_k2, 500, 42);
  SimulationSummary b = simulate_many(instance, tail_k2, 500, 42);
  CHECK(a.mean_likes == b.mean_likes);
  CHECK(a.std_error == b.std_error);
  CHECK(a.ci95_low == b.ci95_low);

  // Session i is pinned by derive_seed(seed, i), so replaying one session in
  // isolation reproduces what the batch saw.
  std::vector<SessionOutcome> seen;
  simulate_many(instance, tail_k2, 10, 42,
                [&](std::uint64_t, const SessionOutcome& outcome) { seen.push_back(outcome); });
  REQUIRE(seen.size() == 10);
  for (std::uint64_t i = 0; i < 10; ++i) {
    SessionOutcome solo = simulate_session(instance, tail_k2, derive_seed(42, i));
    CHECK(solo.sampled_type == seen[i].sampled_type);
    CHECK(solo.likes == seen[i].likes);
  }

  CHECK(simulate_many(instance, tail_k2, 500, 43).mean_likes != a.mean_likes);
}

TEST_CASE("session outcome accounting") {
  Instance instance = example1();
  Policy tail_k1{{}, 0};
  SessionOutcome outcome = simulate_session(instance, tail_k1, 7);
  CHECK(outcome.rounds_survived == outcome.likes);
  CHECK(outcome.sampled_type < 2);
}

TEST_CASE("single-type session lengths are geometric") {
  // P(like) = 0.5 each round: the number of likes before the first dislike
  // has mean 1 and variance 2.
  Instance instance = make({"k1"}, {"m1"}, {{0.5}}, {1.0});
  Policy tail{{}, 0};
  SimulationSummary summary = simulate_many(instance, tail, 100000, 11);
  CHECK(std::abs(summary.mean_likes - 1.0) < 0.02);  // 4+ standard errors wide
  CHECK(summary.ci95_low <= 1.0);
  CHECK(summary.ci95_high >= 1.0);
  CHECK(summary.std_error == doctest::Approx(std::sqrt(2.0 / 100000.0)).epsilon(0.05));
}

TEST_CASE("simulated means agree with the analytic policy value") {
  Instance instance = example1();
  Belief q(instance.prior());

  Policy tail_k2{{}, 1};
  SimulationSummary summary = simulate_many(instance, tail_k2, 100000, 7);
  CHECK(std::abs(summary.mean_likes - value_policy(instance, q, tail_k2)) < 0.06);

  Policy mixed{{1, 1}, 0};  // two k2 rounds, then k1 forever
  SimulationSummary mixed_summary = simulate_many(instance, mixed, 100000, 7);
  CHECK(std::abs(mixed_summary.mean_likes - value_policy(instance, q, mixed)) < 0.12);
}

TEST_CASE("type draws follow the prior and conditional sessions follow the type") {
  Instance instance = example1();
  Policy tail_k1{{}, 0};
  std::uint64_t type_m1 = 0;
  double likes_m1 = 0.0, likes_m2 = 0.0;
  std::uint64_t n_m1 = 0, n_m2 = 0;
  simulate_many(instance, tail_k1, 20000, 3,
                [&](std::uint64_t, const SessionOutcome& outcome) {
                  if (outcome.sampled_type == 0) {
                    ++type_m1;
                    likes_m1 += double(outcome.likes);
                    ++n_m1;
                  } else {
                    likes_m2 += double(outcome.likes);
                    ++n_m2;
                  }
                });
  CHECK(std::abs(double(type_m1) / 20000.0 - 0.5) < 0.015);
  // Conditioned on the type, session length is geometric with the type's
  // like-probability for k1: means 19 and 1/9.
  CHECK(std::abs(likes_m1 / double(n_m1) - 19.0) < 1.2);
  CHECK(std::abs(likes_m2 / double(n_m2) - 1.0 / 9.0) < 0.02);
}

TEST_CASE("confidence intervals tighten with more sessions") {
  Instance instance = example1();
  Policy tail_k2{{}, 1};
  SimulationSummary small = simulate_many(instance, tail_k2, 1000, 5);
  SimulationSummary large = simulate_many(instance, tail_k2, 16000, 5);
  CHECK(large.ci95_high - large.ci95_low < (small.ci95_high - small.ci95_low) / 2.0);
  CHECK(small.ci95_low <= small.mean_likes);
  CHECK(small.mean_likes <= small.ci95_high);
}

TEST_CASE("zero sessions are rejected") {
  Instance instance = example1();
  Policy tail{{}, 0};
  CHECK_THROWS_AS(simulate_many(instance, tail, 0, 1), ValidationError);
}

TEST_CASE("runaway sessions hit the round cap") {
  // Mean session length 1e9 dwarfs the 1e7-round cap, so the first session
  // blows it with overwhelming probability.
  Instance instance = make({"k1"}, {"m1"}, {{1.0 - 1e-9}}, {1.0});
  Policy tail{{}, 0};
  CHECK_THROWS_AS(simulate_session(instance, tail, 1), RoundCapExceededError);
}
