#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "recapc/belief.hpp"
#include "recapc/instance.hpp"
#include "recapc/solvers.hpp"

namespace recapc {

/// The separation constants that drive every convergence statement:
///   c1: churn floor, 1 - p_max
///   c2: smallest |p(k,m) - p(k,m')| over categories and type pairs
///   c3: smallest margin, over types, between the type's best and
///       second-best category
///   c4: smallest prior entry
///   c:  min of the four
/// A degenerate dimension (single type / single category) leaves c2 / c3
/// without pairs to compare; such terms are reported as 1 and impose no
/// constraint. c > 0 is what makes the separation machinery applicable.
struct InstanceConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c = 0.0;
  double p_max = 0.0;
  /// The natural concentration threshold c^2 / 4.
  double delta_default = 0.0;
};

InstanceConstants compute_constants(const Instance& instance);

/// delta-concentration: the belief puts at least 1 - delta on one type.
/// `type` is empty when no entry reaches the threshold.
struct BeliefClass {
  bool concentrated = false;
  std::optional<std::size_t> type;
};

BeliefClass classify_belief(const Belief& belief, double delta);

struct ConvergenceOptions {
  double epsilon = 1e-6;
  std::size_t max_rounds = 500;
  /// Rounds of identical recommendations required to declare fixation.
  std::size_t stability_window = 50;
  /// When true (default), exhausting max_rounds throws NotConvergedError;
  /// sweeps that prefer a report with converged=false can turn this off.
  bool require_convergence = true;
};

struct ConvergenceReport {
  bool converged = false;
  /// First round (1-based) of the terminal streak of identical
  /// recommendations.
  std::size_t fixation_round = 0;
  std::size_t final_category = 0;
  /// The type whose vertex the walk is headed to: among types still carrying
  /// mass, the one the fixed category reinforces most.
  std::size_t final_type = 0;
  std::size_t rounds_run = 0;
  /// Rounds whose belief was delta-unconcentrated, delta = c^2/4.
  std::size_t unconcentrated_count = 0;
  double delta = 0.0;
  /// Ceiling on unconcentrated rounds implied by the separation constants;
  /// meaningful only when theory_available (c > 0).
  double theoretical_bound = 0.0;
  bool theory_available = false;
};

/// Replays the planner against its own belief trail: at every round the
/// epsilon-optimal first action is recomputed at the current belief, the
/// belief is updated as if the recommendation was liked, and fixation is
/// declared once the recommendation has been stable for a full window.
ConvergenceReport detect_convergence(const Instance& instance, const ConvergenceOptions& options);
ConvergenceReport detect_convergence(const Instance& instance, double epsilon,
                                     std::size_t max_rounds);

struct UncertaintyPoint {
  std::size_t round = 0;  ///< 1-based
  double l1 = 0.0;        ///< L1 distance to the terminal vertex
  std::size_t category = 0;
  std::vector<double> belief;
};

struct UncertaintyCurve {
  std::vector<UncertaintyPoint> points;
  std::size_t terminal_type = 0;
  bool converged = false;
};

/// The L1 uncertainty trajectory of the replayed optimal policy. The walk is
/// run past `rounds` (at least 120 rounds) so the terminal vertex is read off
/// a settled belief; the first `rounds` points are returned. Emitted even
/// when c = 0.
UncertaintyCurve uncertainty_curve(const Instance& instance, double epsilon, std::size_t rounds);

/// CSV with header round,l1_uncertainty,chosen_category,belief_<type>...
void write_uncertainty_csv(const UncertaintyCurve& curve, const Instance& instance,
                           std::ostream& out);

/// Per-first-action certified value intervals: entry k brackets the best
/// value among policies that start with category k. `best` maximizes the
/// attainable lower ends; certified_margin = lower[best] minus the largest
/// rival upper bound, so a positive margin proves best is the unique optimal
/// first action.
struct FirstActionValues {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t best = 0;
  double certified_margin = 0.0;
};

FirstActionValues first_action_values(const Instance& instance, const Belief& belief,
                                      double epsilon);

struct GapCheck {
  std::size_t action = 0;       ///< the epsilon-optimal first action used
  double measured = 0.0;        ///< V(after liking `action`) - V(at belief)
  double theoretical = 0.0;     ///< delta * (1-delta) * c^2 / (1-c)
  bool holds = false;           ///< measured >= theoretical - 2 * epsilon
};

/// Checks the guaranteed value improvement of one optimal step at a
/// delta-unconcentrated belief. Requires c > 0 and the belief actually
/// delta-unconcentrated; throws ValidationError otherwise.
GapCheck verify_gap_theorem(const Instance& instance, const Belief& belief, double delta,
                            double epsilon);

}  // namespace recapc
