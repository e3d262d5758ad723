#include "recapc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace recapc {

InstanceConstants compute_constants(const Instance& instance) {
  const std::size_t K = instance.n_categories();
  const std::size_t M = instance.n_types();
  InstanceConstants c;
  c.p_max = instance.p_max();
  c.c1 = 1.0 - c.p_max;

  c.c2 = 1.0;
  if (M >= 2) {
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t m = 0; m < M; ++m)
        for (std::size_t m2 = m + 1; m2 < M; ++m2)
          c.c2 = std::min(c.c2, std::abs(instance.p(k, m) - instance.p(k, m2)));
  }

  c.c3 = 1.0;
  if (K >= 2) {
    for (std::size_t m = 0; m < M; ++m) {
      double best = -1.0, second = -1.0;
      for (std::size_t k = 0; k < K; ++k) {
        double v = instance.p(k, m);
        if (v > best) {
          second = best;
          best = v;
        } else if (v > second) {
          second = v;
        }
      }
      c.c3 = std::min(c.c3, best - second);
    }
  }

  c.c4 = 1.0;
  for (double v : instance.prior()) c.c4 = std::min(c.c4, v);

  c.c = std::min(std::min(c.c1, c.c2), std::min(c.c3, c.c4));
  c.delta_default = c.c * c.c / 4.0;
  return c;
}

BeliefClass classify_belief(const Belief& belief, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw ValidationError("delta must lie in [0, 1)");
  std::size_t top = belief.argmax();
  if (belief[top] >= 1.0 - delta) return {true, top};
  return {false, std::nullopt};
}

namespace {

std::size_t first_action(const SolveResult& result) {
  return result.prefix.empty() ? result.extended_policy.tail : result.prefix.front();
}

/// The type a fixed category drives the belief toward: among types with
/// positive mass, the one with the largest like-probability (lowest index on
/// ties). Repeated likes multiply each type's mass by its like-probability,
/// so this type's share grows geometrically past every rival's.
std::size_t limit_type(const Instance& instance, const Belief& belief, std::size_t category) {
  std::size_t best = 0;
  double best_p = -1.0;
  for (std::size_t m = 0; m < belief.size(); ++m) {
    if (belief[m] <= 0.0) continue;
    double v = instance.p(category, m);
    if (v > best_p) {
      best_p = v;
      best = m;
    }
  }
  return best;
}

}  // namespace

ConvergenceReport detect_convergence(const Instance& instance, const ConvergenceOptions& options) {
  if (options.max_rounds == 0) throw ValidationError("max_rounds must be at least 1");
  if (options.stability_window == 0) throw ValidationError("stability window must be at least 1");

  InstanceConstants constants = compute_constants(instance);
  ConvergenceReport report;
  report.theory_available = constants.c > 0.0;
  report.delta = constants.delta_default;
  if (report.theory_available) {
    double d = report.delta;
    report.theoretical_bound =
        std::ceil((1.0 - constants.c) * (1.0 - constants.c) /
                  (d * (1.0 - d) * constants.c * constants.c * constants.c));
  }

  SolveOptions solve_options;
  solve_options.epsilon = options.epsilon;

  Belief belief(instance.prior());
  std::size_t streak_start = 1;
  std::size_t previous = instance.n_categories();  // sentinel: matches nothing
  for (std::size_t t = 1; t <= options.max_rounds; ++t) {
    report.rounds_run = t;
    std::size_t action = first_action(solve_bnb(instance, belief, solve_options));
    if (action != previous) {
      streak_start = t;
      previous = action;
    }
    if (report.theory_available && !classify_belief(belief, report.delta).concentrated)
      ++report.unconcentrated_count;
    if (t - streak_start + 1 >= options.stability_window) {
      report.converged = true;
      break;
    }
    belief = bayes_update(instance, belief, action);
  }

  report.final_category = previous;
  report.fixation_round = streak_start;
  report.final_type = limit_type(instance, belief, previous);
  if (!report.converged && options.require_convergence)
    throw NotConvergedError("recommendation did not stabilize for " +
                            std::to_string(options.stability_window) + " rounds within " +
                            std::to_string(options.max_rounds) + " rounds");
  return report;
}

ConvergenceReport detect_convergence(const Instance& instance, double epsilon,
                                     std::size_t max_rounds) {
  ConvergenceOptions options;
  options.epsilon = epsilon;
  options.max_rounds = max_rounds;
  return detect_convergence(instance, options);
}

namespace {

UncertaintyCurve replay_curve(const Instance& instance, double epsilon, std::size_t rounds,
                              std::size_t settle_rounds) {
  if (rounds == 0) throw ValidationError("rounds must be at least 1");
  const std::size_t total = std::max(rounds, settle_rounds);
  const std::size_t window = 50;

  SolveOptions solve_options;
  solve_options.epsilon = epsilon;

  std::vector<std::vector<double>> beliefs;
  std::vector<std::size_t> actions;
  beliefs.reserve(total);
  Belief belief(instance.prior());
  std::size_t streak = 0;
  std::size_t previous = instance.n_categories();
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t action = first_action(solve_bnb(instance, belief, solve_options));
    streak = (action == previous) ? streak + 1 : 1;
    previous = action;
    beliefs.push_back(belief.weights());
    actions.push_back(action);
    belief = bayes_update(instance, belief, action);
  }

  UncertaintyCurve curve;
  curve.terminal_type = limit_type(instance, belief, previous);
  curve.converged = streak >= window;
  curve.points.reserve(rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    Belief b(beliefs[t]);
    curve.points.push_back(
        UncertaintyPoint{t + 1, b.l1_to_vertex(curve.terminal_type), actions[t], beliefs[t]});
  }
  return curve;
}

}  // namespace

UncertaintyCurve uncertainty_curve(const Instance& instance, double epsilon, std::size_t rounds) {
  return replay_curve(instance, epsilon, rounds, 120);
}

void write_uncertainty_csv(const UncertaintyCurve& curve, const Instance& instance,
                           std::ostream& out) {
  out << "round,l1_uncertainty,chosen_category";
  for (const auto& name : instance.types()) out << ",belief_" << name;
  out << "\n";
  char buffer[64];
  for (const auto& point : curve.points) {
    out << point.round;
    std::snprintf(buffer, sizeof buffer, "%.12g", point.l1);
    out << ',' << buffer << ',' << instance.categories()[point.category];
    for (double v : point.belief) {
      std::snprintf(buffer, sizeof buffer, "%.12g", v);
      out << ',' << buffer;
    }
    out << "\n";
  }
}

FirstActionValues first_action_values(const Instance& instance, const Belief& belief,
                                      double epsilon) {
  SolveOptions options;
  options.epsilon = epsilon;
  FirstActionValues values;
  const std::size_t K = instance.n_categories();
  values.lower.resize(K);
  values.upper.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t root[1] = {k};
    SolveResult result = solve_bnb_rooted(instance, belief, root, options);
    values.lower[k] = result.value;
    values.upper[k] = result.upper_certificate;
  }
  values.best = static_cast<std::size_t>(
      std::max_element(values.lower.begin(), values.lower.end()) - values.lower.begin());
  double rival = -1.0;
  for (std::size_t k = 0; k < K; ++k)
    if (k != values.best) rival = std::max(rival, values.upper[k]);
  values.certified_margin = (K >= 2) ? values.lower[values.best] - rival : 1e308;
  return values;
}

GapCheck verify_gap_theorem(const Instance& instance, const Belief& belief, double delta,
                            double epsilon) {
  InstanceConstants constants = compute_constants(instance);
  if (!(constants.c > 0.0))
    throw ValidationError("separation constant c is zero; the gap statement does not apply");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  for (std::size_t m = 0; m < belief.size(); ++m)
    if (belief[m] >= 1.0 - delta)
      throw ValidationError("belief is not delta-unconcentrated for the supplied delta");

  SolveOptions options;
  options.epsilon = epsilon;
  SolveResult at_belief = solve_bnb(instance, belief, options);
  GapCheck check;
  check.action = first_action(at_belief);
  Belief next = bayes_update(instance, belief, check.action);
  SolveResult after = solve_bnb(instance, next, options);
  check.measured = after.value - at_belief.value;
  check.theoretical = delta * (1.0 - delta) * constants.c * constants.c / (1.0 - constants.c);
  check.holds = check.measured >= check.theoretical - 2.0 * epsilon;
  return check;
}

}  // namespace recapc
