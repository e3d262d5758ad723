#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recapc/belief.hpp"
#include "recapc/instance.hpp"
#include "recapc/valuation.hpp"

namespace recapc {

enum class QueueDiscipline {
  BestFirst,  ///< pop the open prefix with the largest upper bound (default)
  Fifo,       ///< literal queue order; useful for cross-checking
};

struct SolveOptions {
  double epsilon = 1e-6;
  QueueDiscipline queue = QueueDiscipline::BestFirst;
  /// 0 means unlimited. When positive, exceeding it throws
  /// NodeBudgetExceededError.
  std::uint64_t node_budget = 0;
  /// Prefixes are never grown past horizon_for_epsilon(epsilon) plus this
  /// safety margin; the bounding argument makes deeper nodes unreachable, so
  /// the cap only guards against float-boundary loops.
  std::size_t depth_margin = 8;
};

struct SolveResult {
  std::vector<std::size_t> prefix;  ///< incumbent prefix (may be empty)
  double value = 0.0;               ///< attainable: prefix + best fixed tail
  double upper_certificate = 0.0;   ///< optimum is <= this; gap <= epsilon
  std::uint64_t nodes_expanded = 0;
  double wall_time_ms = 0.0;
  Policy extended_policy;           ///< prefix plus best fixed tail at its end
};

/// Epsilon-optimal planner. Explores recommendation prefixes best-first,
/// keeps the best attainable prefix-plus-tail value as incumbent, and prunes
/// any extension whose upper bound cannot beat the incumbent by more than
/// epsilon. On return: value <= optimum <= upper_certificate and
/// upper_certificate - value <= epsilon.
SolveResult solve_bnb(const Instance& instance, const Belief& start, const SolveOptions& options);
SolveResult solve_bnb(const Instance& instance, const SolveOptions& options);
SolveResult solve_bnb(const Instance& instance, double epsilon = 1e-6);

/// Same search restricted to policies that begin with `root_prefix`; used to
/// certify which first actions are optimal.
SolveResult solve_bnb_rooted(const Instance& instance, const Belief& start,
                             std::span<const std::size_t> root_prefix, const SolveOptions& options);

struct HorizonSolve {
  double value = 0.0;
  std::vector<std::size_t> prefix;  ///< an optimal length-H sequence
};

/// Exact H-horizon optimum by backward induction over category count
/// vectors: the belief after a prefix depends only on how many times each
/// category appears, so all orderings share one state. Returns the first
/// lexicographic optimizer. Throws StateBudgetExceededError when the state
/// space (H + |K| choose |K|) would top 5e6.
HorizonSolve solve_dp(const Instance& instance, std::size_t horizon);
HorizonSolve solve_dp(const Instance& instance, const Belief& start, std::size_t horizon);

/// Exhaustive maximum over all |K|^H sequences; test oracle only.
/// Guarded at 1e7 sequences.
HorizonSolve solve_bruteforce(const Instance& instance, std::size_t horizon);
HorizonSolve solve_bruteforce(const Instance& instance, const Belief& start, std::size_t horizon);

/// Greedy baseline: recommend the category with the highest immediate
/// like-probability, update, repeat. Lowest index on ties.
std::vector<std::size_t> policy_myopic(const Instance& instance, const Belief& start,
                                       std::size_t steps);
std::vector<std::size_t> policy_myopic(const Instance& instance, std::size_t steps);

/// Best fixed action: the category a policy would repeat forever.
std::size_t policy_bfa(const Instance& instance, const Belief& belief);
std::size_t policy_bfa(const Instance& instance);

}  // namespace recapc
