#include <doctest.h>

#include <cmath>
#include <vector>

#include "recapc/errors.hpp"
#include "recapc/valuation.hpp"

#include "support.hpp"

using namespace recapc;
using testsupport::example1;
using testsupport::make;

TEST_CASE("fixed-category values on the reference instance") {
  Instance instance = example1();
  Belief q(instance.prior());
  // 0.5 * 0.95/0.05 + 0.5 * 0.1/0.9 = 86/9
  CHECK(value_fixed(instance, q, 0) == doctest::Approx(86.0 / 9.0).epsilon(1e-12));
  // 0.5 * (0.79/0.21 + 0.81/0.19)
  CHECK(value_fixed(instance, q, 1) == doctest::Approx(4.012531328320802).epsilon(1e-12));
}

TEST_CASE("policy value with a prefix") {
  Instance instance = example1();
  Belief q(instance.prior());

  Policy fixed_k1{{}, 0};
  CHECK(value_policy(instance, q, fixed_k1) == doctest::Approx(86.0 / 9.0).epsilon(1e-12));

  // Two rounds of k2, then k1 forever, accounted per type by hand:
  //   m1: 0.79 + 0.79^2 + 0.79^2 * 19      = 13.272
  //   m2: 0.81 + 0.81^2 + 0.81^2 * (1/9)   = 1.539
  Policy two_then_one{{1, 1}, 0};
  std::vector<double> per_type = value_policy_per_type(instance, two_then_one);
  REQUIRE(per_type.size() == 2);
  CHECK(per_type[0] == doctest::Approx(13.272).epsilon(1e-12));
  CHECK(per_type[1] == doctest::Approx(1.539).epsilon(1e-12));
  CHECK(value_policy(instance, q, two_then_one) == doctest::Approx(7.4055).epsilon(1e-12));

  CHECK(two_then_one.at(0) == 1);
  CHECK(two_then_one.at(1) == 1);
  CHECK(two_then_one.at(2) == 0);
  CHECK(two_then_one.at(100) == 0);
}

TEST_CASE("finite-horizon value walks the belief") {
  Instance instance = example1();
  Belief q(instance.prior());
  std::vector<std::size_t> prefix{1, 1};
  // 0.8 + 0.8 * 0.800125
  CHECK(value_finite_horizon(instance, q, prefix, 2) == doctest::Approx(1.4401).epsilon(1e-12));
  CHECK(value_finite_horizon(instance, q, prefix, 1) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(value_finite_horizon(instance, q, prefix, 3), ValidationError);
}

TEST_CASE("truncation horizon for a value tolerance") {
  Instance p08 = make({"k1"}, {"m1"}, {{0.8}}, {1.0});
  CHECK(horizon_for_epsilon(p08, 0.01) == 27);

  CHECK(example1().p_max() == 0.95);
  CHECK(horizon_for_epsilon(example1(), 1e-6) == 327);

  // Generous tolerance clamps to a single round.
  CHECK(horizon_for_epsilon(make({"k1"}, {"m1"}, {{0.1}}, {1.0}), 0.5) == 1);

  Instance near_one = make({"k1"}, {"m1"}, {{0.9999999}}, {1.0});
  CHECK_THROWS_AS(horizon_for_epsilon(near_one, 1e-9), HorizonOverflowError);
}

TEST_CASE("bounds sandwich the attainable values") {
  Instance instance = example1();
  Belief q(instance.prior());

  LowerBound lower = lower_bound(instance, q);
  CHECK(lower.value == doctest::Approx(86.0 / 9.0).epsilon(1e-12));
  CHECK(lower.category == 0);
  CHECK(upper_bound(instance, q) ==
        doctest::Approx(0.5 * (19.0 + 0.81 / 0.19)).epsilon(1e-12));
  CHECK(lower.value <= upper_bound(instance, q));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Instance random = testsupport::random_instance(3, 3, seed);
    Belief prior(random.prior());
    LowerBound lb = lower_bound(random, prior);
    CHECK(lb.value <= upper_bound(random, prior) + 1e-12);
    CHECK(lb.value == doctest::Approx(value_fixed(random, prior, lb.category)).epsilon(1e-12));
    for (std::size_t k = 0; k < random.n_categories(); ++k)
      CHECK(value_fixed(random, prior, k) <= lb.value + 1e-12);
  }
}

TEST_CASE("prefix evaluation matches the closed-form policy value") {
  Instance instance = example1();
  std::vector<std::size_t> prefix{1, 1, 0};
  PrefixEvaluation eval = prefix_bounds(instance, prefix);

  CHECK(eval.depth() == 3);
  // survival = 0.8 * 0.800125 * p_k1 after two k2 likes
  Belief q(instance.prior());
  Policy policy{prefix, eval.best_tail()};
  CHECK(eval.lower() == doctest::Approx(value_policy(instance, q, policy)).epsilon(1e-12));
  CHECK(eval.upper() >= eval.lower() - 1e-12);

  // Upper bound decomposition: accrued + survival * ceiling at the end.
  double tail_ceiling = upper_bound(instance, eval.belief());
  CHECK(eval.upper() ==
        doctest::Approx(eval.accrued() + eval.survival() * tail_ceiling).epsilon(1e-12));
}

TEST_CASE("incremental prefix extension equals batch evaluation") {
  Instance instance = testsupport::random_instance(4, 3, 77);
  PrefixEvaluation eval = PrefixEvaluation::root(instance, Belief(instance.prior()));
  std::vector<std::size_t> prefix;
  for (std::size_t k : {1u, 3u, 0u, 2u, 1u}) {
    eval = eval.extend(instance, k);
    prefix.push_back(k);
    PrefixEvaluation batch = prefix_bounds(instance, prefix);
    CHECK(eval.accrued() == doctest::Approx(batch.accrued()).epsilon(1e-12));
    CHECK(eval.survival() == doctest::Approx(batch.survival()).epsilon(1e-12));
    CHECK(eval.lower() == doctest::Approx(batch.lower()).epsilon(1e-12));
    CHECK(eval.upper() == doctest::Approx(batch.upper()).epsilon(1e-12));
    CHECK(eval.best_tail() == batch.best_tail());
  }
}

TEST_CASE("upper bounds only tighten along a prefix") {
  // The pruning logic leans on this: a child's ceiling never exceeds its
  // parent's, so a pruned subtree is bounded by the bound recorded at the cut.
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Instance instance = testsupport::random_instance(3, 3, seed + 500);
    PrefixEvaluation eval = PrefixEvaluation::root(instance, Belief(instance.prior()));
    for (std::size_t step = 0; step < 10; ++step) {
      std::size_t k = (seed + step) % 3;
      PrefixEvaluation child = eval.extend(instance, k);
      CHECK(child.upper() <= eval.upper() + 1e-9);
      CHECK(child.lower() <= child.upper() + 1e-12);
      eval = child;
    }
  }
}

TEST_CASE("a dead extension keeps its accrued value as both bounds") {
  Instance instance = make({"k1", "k2"}, {"m1", "m2"}, {{0.0, 0.0}, {0.6, 0.6}}, {0.5, 0.5});
  PrefixEvaluation root = PrefixEvaluation::root(instance, Belief(instance.prior()));
  PrefixEvaluation dead = root.extend(instance, 0);
  CHECK(dead.survival() == 0.0);
  CHECK(dead.lower() == doctest::Approx(dead.accrued()));
  CHECK(dead.upper() == doctest::Approx(dead.accrued()));
}
