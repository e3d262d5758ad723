#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "recapc/analysis.hpp"
#include "recapc/errors.hpp"
#include "recapc/rng.hpp"

#include "support.hpp"

using namespace recapc;
using testsupport::example1;
using testsupport::make;

TEST_CASE("separation constants on the reference instance") {
  InstanceConstants c = compute_constants(example1());
  CHECK(c.p_max == doctest::Approx(0.95));
  CHECK(c.c1 == doctest::Approx(0.05));
  CHECK(c.c2 == doctest::Approx(0.02));   // |0.79 - 0.81|
  CHECK(c.c3 == doctest::Approx(0.16));   // 0.95 - 0.79 on m1
  CHECK(c.c4 == doctest::Approx(0.5));
  CHECK(c.c == doctest::Approx(0.02));
  CHECK(c.delta_default == doctest::Approx(1e-4));
}

TEST_CASE("identical types collapse the row gap") {
  Instance twin = make({"k1", "k2"}, {"m1", "m2"}, {{0.6, 0.6}, {0.3, 0.3}}, {0.5, 0.5});
  InstanceConstants c = compute_constants(twin);
  CHECK(c.c2 == 0.0);
  CHECK(c.c == 0.0);
}

TEST_CASE("degenerate dimensions impose no constraint") {
  InstanceConstants single_type = compute_constants(make({"k1", "k2"}, {"m1"}, {{0.5}, {0.3}}, {1.0}));
  CHECK(single_type.c2 == 1.0);
  CHECK(single_type.c3 == doctest::Approx(0.2));

  InstanceConstants single_cat = compute_constants(make({"k1"}, {"m1", "m2"}, {{0.5, 0.3}}, {0.5, 0.5}));
  CHECK(single_cat.c3 == 1.0);
  CHECK(single_cat.c2 == doctest::Approx(0.2));
}

TEST_CASE("belief classification") {
  CHECK(classify_belief(Belief::vertex(3, 1), 1e-9).concentrated);
  CHECK(classify_belief(Belief::vertex(3, 1), 1e-9).type == 1);
  CHECK_FALSE(classify_belief(Belief::uniform(3), 0.1).concentrated);
  CHECK_THROWS_AS(classify_belief(Belief::uniform(3), 1.0), ValidationError);
  CHECK_THROWS_AS(classify_belief(Belief::uniform(3), -0.1), ValidationError);

  // Two likes of k1 on the reference instance reach 0.98904, still short of
  // the 1 - 1e-4 threshold.
  Instance instance = example1();
  Belief b = bayes_update(instance, bayes_update(instance, Belief(instance.prior()), 0), 0);
  CHECK_FALSE(classify_belief(b, 1e-4).concentrated);
}

TEST_CASE("convergence detection on the reference instance") {
  Instance instance = example1();
  ConvergenceReport report = detect_convergence(instance, 1e-6, 500);
  CHECK(report.converged);
  CHECK(report.fixation_round == 1);
  CHECK(report.final_category == 0);
  CHECK(report.final_type == 0);
  CHECK(report.rounds_run == 50);  // breaks as soon as the window is full
  CHECK(report.theory_available);
  CHECK(report.delta == doctest::Approx(1e-4));
  // The belief passes 1 - 1e-4 on m1 at round 6, so exactly rounds 1..5
  // count as unconcentrated.
  CHECK(report.unconcentrated_count == 5);
  CHECK(double(report.unconcentrated_count) <= report.theoretical_bound);
}

TEST_CASE("the planner can abandon its opening recommendation") {
  // Near the m2 vertex the planner opens with k2, but every k2 like pushes
  // mass toward m1; the plan flips to k1 and stays there.
  Instance instance = make({"k1", "k2"}, {"m1", "m2"}, {{0.8, 0.5}, {0.7, 0.6}}, {0.02, 0.98});
  SolveResult at_prior = solve_bnb(instance, 1e-6);
  std::size_t opening = at_prior.extended_policy.at(0);
  CHECK(opening == 1);

  ConvergenceReport report = detect_convergence(instance, 1e-6, 500);
  CHECK(report.converged);
  CHECK(report.final_category == 0);
  CHECK(report.final_type == 0);
  CHECK(report.fixation_round > 1);
}

TEST_CASE("single-type instances fixate immediately") {
  Instance instance = make({"k1", "k2"}, {"m1"}, {{0.4}, {0.6}}, {1.0});
  ConvergenceReport report = detect_convergence(instance, 1e-6, 500);
  CHECK(report.converged);
  CHECK(report.fixation_round == 1);
  CHECK(report.final_category == 1);
  CHECK(report.final_type == 0);
}

TEST_CASE("an exhausted round budget is an error unless opted out") {
  Instance instance = example1();
  ConvergenceOptions options;
  options.max_rounds = 3;  // cannot fit a 50-round streak
  CHECK_THROWS_AS(detect_convergence(instance, options), NotConvergedError);

  options.require_convergence = false;
  ConvergenceReport report = detect_convergence(instance, options);
  CHECK_FALSE(report.converged);
  CHECK(report.rounds_run == 3);
}

TEST_CASE("uncertainty curve on the reference instance") {
  Instance instance = example1();
  UncertaintyCurve curve = uncertainty_curve(instance, 1e-6, 30);
  REQUIRE(curve.points.size() == 30);
  CHECK(curve.terminal_type == 0);
  CHECK(curve.converged);
  CHECK(curve.points[0].l1 == doctest::Approx(1.0));  // ||q - e_m1||_1
  CHECK(curve.points[0].round == 1);
  CHECK(curve.points[0].category == 0);
  for (std::size_t t = 1; t < curve.points.size(); ++t)
    CHECK(curve.points[t].l1 < curve.points[t - 1].l1);
}

TEST_CASE("uncertainty curve from a vertex is flat zero") {
  Instance instance = make({"k1", "k2"}, {"m1"}, {{0.4}, {0.6}}, {1.0});
  UncertaintyCurve curve = uncertainty_curve(instance, 1e-6, 10);
  for (const auto& point : curve.points) CHECK(point.l1 == 0.0);
}

TEST_CASE("uncertainty CSV layout") {
  Instance instance = example1();
  UncertaintyCurve curve = uncertainty_curve(instance, 1e-6, 2);
  std::ostringstream out;
  write_uncertainty_csv(curve, instance, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "round,l1_uncertainty,chosen_category,belief_m1,belief_m2");
  std::getline(in, line);
  CHECK(line == "1,1,k1,0.5,0.5");
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "2,");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("per-opening value brackets on the reference instance") {
  Instance instance = example1();
  FirstActionValues values = first_action_values(instance, Belief(instance.prior()), 1e-9);
  REQUIRE(values.lower.size() == 2);
  CHECK(values.best == 0);
  CHECK(values.lower[0] == doctest::Approx(86.0 / 9.0).epsilon(1e-12));
  // Opening with k2 and then playing k1 forever is the best k2 start:
  // 0.8 * (1 + 9.4375) = 8.35.
  CHECK(values.lower[1] == doctest::Approx(8.35).epsilon(1e-9));
  CHECK(values.upper[1] - values.lower[1] <= 1e-9);
  CHECK(values.certified_margin == doctest::Approx(86.0 / 9.0 - 8.35).epsilon(1e-6));

  FirstActionValues lone =
      first_action_values(make({"k1"}, {"m1"}, {{0.5}}, {1.0}), Belief::uniform(1), 1e-9);
  CHECK(lone.certified_margin == 1e308);
}

TEST_CASE("guaranteed improvement of one optimal step") {
  Instance instance = example1();
  Belief q(instance.prior());
  GapCheck check = verify_gap_theorem(instance, q, 0.4, 1e-7);
  CHECK(check.action == 0);
  CHECK(check.theoretical == doctest::Approx(0.4 * 0.6 * 0.0004 / 0.98).epsilon(1e-12));
  // One k1 like moves the value from 9.5556 to 17.2011.
  CHECK(check.measured == doctest::Approx(7.645502645502646).epsilon(1e-6));
  CHECK(check.holds);

  SUBCASE("preconditions") {
    Instance flat = make({"k1", "k2"}, {"m1", "m2"}, {{0.6, 0.6}, {0.3, 0.3}}, {0.5, 0.5});
    CHECK_THROWS_AS(verify_gap_theorem(flat, Belief::uniform(2), 0.5, 1e-7), ValidationError);
    CHECK_THROWS_AS(verify_gap_theorem(instance, Belief::vertex(2, 0), 0.5, 1e-7),
                    ValidationError);
    CHECK_THROWS_AS(verify_gap_theorem(instance, q, 0.0, 1e-7), ValidationError);
    CHECK_THROWS_AS(verify_gap_theorem(instance, q, 1.0, 1e-7), ValidationError);
  }
}

TEST_CASE("near a vertex the greedy and optimal openings agree") {
  std::size_t tested = 0;
  for (std::uint64_t seed = 0; tested < 8 && seed < 200; ++seed) {
    Instance instance = testsupport::random_instance(3, 3, seed + 3000, 0.15);
    InstanceConstants constants = compute_constants(instance);
    if (!(constants.c > 0.0)) continue;
    double delta = constants.delta_default;

    bool usable = true;
    for (std::size_t m = 0; m < instance.n_types() && usable; ++m) {
      std::vector<double> w(instance.n_types(), delta / 2.0 / double(instance.n_types() - 1));
      w[m] = 1.0 - delta / 2.0;
      Belief b{w};
      FirstActionValues values = first_action_values(instance, b, 1e-9);
      if (values.certified_margin <= 1e-6) {
        usable = false;  // opening not decided sharply enough to test against
        break;
      }
      std::size_t favorite = 0;
      for (std::size_t k = 1; k < instance.n_categories(); ++k)
        if (instance.p(k, m) > instance.p(favorite, m)) favorite = k;
      CHECK(values.best == favorite);

      // One optimal step from a concentrated belief cannot land concentrated
      // on a different type.
      Belief next = bayes_update(instance, b, values.best);
      BeliefClass after = classify_belief(next, delta);
      if (after.concentrated) CHECK(after.type == m);
    }
    if (usable) ++tested;
  }
  CHECK(tested == 8);
}

TEST_CASE("value ceiling and Lipschitz bound") {
  SplitMix64 rng(99);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Instance instance = testsupport::random_instance(3, 3, seed + 4000, 0.15);
    InstanceConstants constants = compute_constants(instance);
    if (!(constants.c > 0.0)) continue;
    double ceiling = (1.0 - constants.c) / constants.c;

    std::vector<double> w1(3), w2(3);
    for (auto& v : w1) v = rng.uniform() + 1e-3;
    for (auto& v : w2) v = rng.uniform() + 1e-3;
    Belief b1{w1}, b2{w2};

    SolveOptions options;
    options.epsilon = 1e-6;
    double v1 = solve_bnb(instance, b1, options).value;
    double v2 = solve_bnb(instance, b2, options).value;
    CHECK(v1 <= ceiling + 1e-9);
    CHECK(v2 <= ceiling + 1e-9);
    CHECK(std::abs(v1 - v2) <= b1.l1_distance(b2) * ceiling + 2e-6);
  }
}
