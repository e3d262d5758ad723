#include "recapc/simulation.hpp"

#include <cmath>

#include "recapc/rng.hpp"

namespace recapc {

SessionOutcome simulate_session(const Instance& instance, const Policy& policy,
                                std::uint64_t session_seed) {
  if (policy.tail >= instance.n_categories())
    throw ValidationError("policy tail category out of range");
  for (std::size_t k : policy.prefix)
    if (k >= instance.n_categories()) throw ValidationError("policy category out of range");

  SplitMix64 g(session_seed);

  // Inverse-CDF draw of the user type.
  double u = g.uniform();
  const std::vector<double>& q = instance.prior();
  std::size_t type = q.size() - 1;
  double cumulative = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    cumulative += q[m];
    if (u < cumulative) {
      type = m;
      break;
    }
  }

  constexpr std::uint64_t kRoundCap = 10'000'000;
  SessionOutcome outcome;
  outcome.sampled_type = type;
  for (std::uint64_t t = 0;; ++t) {
    if (t >= kRoundCap)
      throw RoundCapExceededError("session exceeded 1e7 rounds; like-probabilities too close to 1");
    std::size_t k = policy.at(t);
    if (g.uniform() >= instance.p(k, type)) break;
    ++outcome.likes;
  }
  outcome.rounds_survived = outcome.likes;
  return outcome;
}

SimulationSummary simulate_many(
    const Instance& instance, const Policy& policy, std::uint64_t sessions, std::uint64_t seed,
    const std::function<void(std::uint64_t, const SessionOutcome&)>& on_session) {
  if (sessions == 0) throw ValidationError("simulation needs at least one session");

  // Welford's running mean/variance; numerically stable at 1e6+ sessions.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < sessions; ++i) {
    SessionOutcome outcome = simulate_session(instance, policy, derive_seed(seed, i));
    if (on_session) on_session(i, outcome);
    double x = static_cast<double>(outcome.likes);
    double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }

  SimulationSummary summary;
  summary.sessions = sessions;
  summary.mean_likes = mean;
  if (sessions > 1) {
    double variance = m2 / static_cast<double>(sessions - 1);
    summary.std_error = std::sqrt(variance / static_cast<double>(sessions));
  }
  constexpr double kZ95 = 1.959963984540054;
  summary.ci95_low = summary.mean_likes - kZ95 * summary.std_error;
  summary.ci95_high = summary.mean_likes + kZ95 * summary.std_error;
  return summary;
}

}  // namespace recapc
