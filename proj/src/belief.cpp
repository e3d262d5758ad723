#include "recapc/belief.hpp"

#include <cmath>
#include <stdexcept>

namespace recapc {

Belief::Belief(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw ValidationError("belief cannot be empty");
  double total = 0.0;
  for (double v : w_) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("belief weights must be finite and non-negative");
    total += v;
  }
  if (total <= 0.0) throw ValidationError("belief weights must not all be zero");
  for (double& v : w_) v /= total;
}

Belief Belief::uniform(std::size_t n) {
  return Belief(std::vector<double>(n, 1.0));
}

Belief Belief::vertex(std::size_t n, std::size_t m) {
  std::vector<double> w(n, 0.0);
  w.at(m) = 1.0;
  return Belief(std::move(w));
}

std::size_t Belief::argmax() const {
  std::size_t best = 0;
  for (std::size_t m = 1; m < w_.size(); ++m)
    if (w_[m] > w_[best]) best = m;
  return best;
}

double Belief::l1_to_vertex(std::size_t m) const {
  double d = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i)
    d += (i == m) ? (1.0 - w_[i]) : w_[i];
  return d;
}

double Belief::l1_distance(const Belief& other) const {
  if (other.size() != size()) throw ValidationError("belief size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) d += std::abs(w_[i] - other.w_[i]);
  return d;
}

double immediate_reward(const Instance& instance, const Belief& belief, std::size_t k) {
  if (k >= instance.n_categories()) throw std::out_of_range("category index out of range");
  if (belief.size() != instance.n_types()) throw ValidationError("belief size mismatch");
  double p = 0.0;
  for (std::size_t m = 0; m < belief.size(); ++m) p += belief[m] * instance.p(k, m);
  return p;
}

Belief bayes_update(const Instance& instance, const Belief& belief, std::size_t k) {
  if (k >= instance.n_categories()) throw std::out_of_range("category index out of range");
  if (belief.size() != instance.n_types()) throw ValidationError("belief size mismatch");
  std::vector<double> w(belief.size());
  double denom = 0.0;
  for (std::size_t m = 0; m < belief.size(); ++m) {
    w[m] = belief[m] * instance.p(k, m);
    denom += w[m];
  }
  if (denom <= 1e-300)
    throw ZeroLikelihoodError("posterior undefined: like-probability underflows for category " +
                              instance.categories()[k]);
  return Belief(std::move(w));
}

BeliefWalk walk(const Instance& instance, const Belief& start, std::span<const std::size_t> prefix) {
  if (prefix.empty()) throw ValidationError("walk needs a non-empty prefix");
  BeliefWalk result{{}, start};
  result.steps.reserve(prefix.size());
  Belief current = start;
  for (std::size_t k : prefix) {
    double p = immediate_reward(instance, current, k);
    Belief next = bayes_update(instance, current, k);
    result.steps.push_back(WalkStep{current, k, p});
    current = std::move(next);
  }
  result.end_belief = std::move(current);
  return result;
}

BeliefWalk walk(const Instance& instance, std::span<const std::size_t> prefix) {
  return walk(instance, Belief(instance.prior()), prefix);
}

}  // namespace recapc
