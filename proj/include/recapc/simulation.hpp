#pragma once

#include <cstdint>
#include <functional>

#include "recapc/instance.hpp"
#include "recapc/valuation.hpp"

namespace recapc {

struct SessionOutcome {
  std::size_t sampled_type = 0;
  std::uint64_t likes = 0;
  std::uint64_t rounds_survived = 0;  ///< equals likes: churn ends the session
};

/// One Monte-Carlo session: draws a type from the prior, then follows the
/// policy round by round; each recommendation is liked with the type's
/// probability and a dislike ends the session. Fully determined by
/// `session_seed`. Throws RoundCapExceededError past 1e7 rounds.
SessionOutcome simulate_session(const Instance& instance, const Policy& policy,
                                std::uint64_t session_seed);

struct SimulationSummary {
  std::uint64_t sessions = 0;
  double mean_likes = 0.0;
  double std_error = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
};

/// Runs `sessions` independent sessions. Session i uses
/// derive_seed(seed, i), so results do not depend on execution order and any
/// subset can be reproduced in isolation. The confidence interval is the
/// normal approximation at 95%.
SimulationSummary simulate_many(
    const Instance& instance, const Policy& policy, std::uint64_t sessions, std::uint64_t seed,
    const std::function<void(std::uint64_t, const SessionOutcome&)>& on_session = nullptr);

}  // namespace recapc
