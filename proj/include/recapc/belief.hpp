#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recapc/instance.hpp"

namespace recapc {

/// A probability distribution over the user types of some instance.
/// Always normalized: entries are non-negative, finite, and sum to 1 within
/// 1e-9 (renormalized on every construction, so in practice much tighter).
class Belief {
 public:
  /// Normalizes the given non-negative weights. Throws ValidationError on
  /// negative or non-finite entries or an all-zero vector.
  explicit Belief(std::vector<double> weights);

  static Belief uniform(std::size_t n);
  /// Point mass on one type.
  static Belief vertex(std::size_t n, std::size_t m);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t m) const { return w_[m]; }
  const std::vector<double>& weights() const { return w_; }

  /// Index of the largest entry (lowest index on ties).
  std::size_t argmax() const;

  /// L1 distance to the point mass on type m; 0 at the vertex, up to 2.
  double l1_to_vertex(std::size_t m) const;

  double l1_distance(const Belief& other) const;

 private:
  std::vector<double> w_;
};

/// Probability that a user drawn from `belief` likes category k:
///   p_k(b) = sum_m b(m) * P(k, m).
double immediate_reward(const Instance& instance, const Belief& belief, std::size_t k);

/// Posterior over types after observing a like of category k:
///   b'(m) = b(m) * P(k, m) / p_k(b).
/// Throws ZeroLikelihoodError when p_k(b) underflows (below 1e-300); a like
/// of an impossible category carries no usable information.
Belief bayes_update(const Instance& instance, const Belief& belief, std::size_t k);

struct WalkStep {
  Belief belief;      ///< belief before the recommendation
  std::size_t category;
  double reward;      ///< like-probability of the recommendation at `belief`
};

/// The deterministic belief trajectory induced by a recommendation sequence,
/// assuming every recommendation is liked. steps[t+1].belief is the posterior
/// of steps[t]; end_belief is the posterior of the final step.
struct BeliefWalk {
  std::vector<WalkStep> steps;
  Belief end_belief;
};

/// Runs bayes_update along `prefix` starting from `start`.
/// The prefix must be non-empty.
BeliefWalk walk(const Instance& instance, const Belief& start, std::span<const std::size_t> prefix);

/// Same, starting from the instance prior.
BeliefWalk walk(const Instance& instance, std::span<const std::size_t> prefix);

}  // namespace recapc
