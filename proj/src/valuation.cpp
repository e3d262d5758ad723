#include "recapc/valuation.hpp"

#include <cmath>
#include <stdexcept>

namespace recapc {

double value_fixed(const Instance& instance, const Belief& belief, std::size_t k) {
  if (k >= instance.n_categories()) throw std::out_of_range("category index out of range");
  if (belief.size() != instance.n_types()) throw ValidationError("belief size mismatch");
  double v = 0.0;
  for (std::size_t m = 0; m < belief.size(); ++m) v += belief[m] * instance.ratio(k, m);
  return v;
}

std::vector<double> value_policy_per_type(const Instance& instance, const Policy& policy) {
  if (policy.tail >= instance.n_categories())
    throw std::out_of_range("tail category index out of range");
  std::vector<double> values(instance.n_types());
  for (std::size_t m = 0; m < instance.n_types(); ++m) {
    double survival = 1.0;
    double total = 0.0;
    for (std::size_t k : policy.prefix) {
      if (k >= instance.n_categories()) throw std::out_of_range("category index out of range");
      survival *= instance.p(k, m);
      total += survival;
    }
    total += survival * instance.ratio(policy.tail, m);
    values[m] = total;
  }
  return values;
}

double value_policy(const Instance& instance, const Belief& belief, const Policy& policy) {
  if (belief.size() != instance.n_types()) throw ValidationError("belief size mismatch");
  std::vector<double> per_type = value_policy_per_type(instance, policy);
  double v = 0.0;
  for (std::size_t m = 0; m < belief.size(); ++m) v += belief[m] * per_type[m];
  return v;
}

double value_finite_horizon(const Instance& instance, const Belief& belief,
                            std::span<const std::size_t> prefix, std::size_t horizon) {
  if (prefix.size() < horizon)
    throw ValidationError("finite-horizon value needs a sequence at least horizon long");
  Belief current = belief;
  double survival = 1.0;
  double total = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    double p = immediate_reward(instance, current, prefix[t]);
    survival *= p;
    total += survival;
    if (t + 1 < horizon) current = bayes_update(instance, current, prefix[t]);
  }
  return total;
}

std::size_t horizon_for_epsilon(const Instance& instance, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  double p = instance.p_max();
  if (p <= 0.0) return 1;  // sessions end immediately; any horizon is exact
  double x = epsilon * (1.0 - p) / p;
  if (x >= 1.0) return 1;
  double h = std::ceil(std::log(x) / std::log(p));
  if (!(h <= 1e7))
    throw HorizonOverflowError("required horizon exceeds 1e7; p_max too close to 1 for this epsilon");
  return static_cast<std::size_t>(std::max(1.0, h));
}

double upper_bound(const Instance& instance, const Belief& belief) {
  if (belief.size() != instance.n_types()) throw ValidationError("belief size mismatch");
  const std::vector<double>& best = instance.best_ratio();
  double v = 0.0;
  for (std::size_t m = 0; m < belief.size(); ++m) v += belief[m] * best[m];
  return v;
}

LowerBound lower_bound(const Instance& instance, const Belief& belief) {
  if (belief.size() != instance.n_types()) throw ValidationError("belief size mismatch");
  LowerBound result{-1.0, 0};
  for (std::size_t k = 0; k < instance.n_categories(); ++k) {
    double v = value_fixed(instance, belief, k);
    if (v > result.value) {
      result.value = v;
      result.category = k;
    }
  }
  return result;
}

void PrefixEvaluation::finish(const Instance& instance) {
  LowerBound lb = lower_bound(instance, belief_);
  lower_ = accrued_ + survival_ * lb.value;
  upper_ = accrued_ + survival_ * upper_bound(instance, belief_);
  tail_ = lb.category;
}

PrefixEvaluation PrefixEvaluation::root(const Instance& instance, const Belief& start) {
  PrefixEvaluation e(start, 1.0, 0.0, 0);
  e.finish(instance);
  return e;
}

PrefixEvaluation PrefixEvaluation::extend(const Instance& instance, std::size_t k) const {
  double p = immediate_reward(instance, belief_, k);
  if (p <= 1e-300) {
    // Certain churn: the continuation is worthless and the posterior is
    // undefined. Freeze the evaluation at the accumulated reward.
    PrefixEvaluation e(belief_, 0.0, accrued_, depth_ + 1);
    e.lower_ = accrued_;
    e.upper_ = accrued_;
    e.tail_ = 0;
    return e;
  }
  std::vector<double> w(belief_.size());
  for (std::size_t m = 0; m < belief_.size(); ++m) w[m] = belief_[m] * instance.p(k, m);
  PrefixEvaluation e(Belief(std::move(w)), survival_ * p, accrued_ + survival_ * p, depth_ + 1);
  e.finish(instance);
  return e;
}

PrefixEvaluation prefix_bounds(const Instance& instance, const Belief& start,
                               std::span<const std::size_t> prefix) {
  PrefixEvaluation e = PrefixEvaluation::root(instance, start);
  for (std::size_t k : prefix) {
    if (k >= instance.n_categories()) throw std::out_of_range("category index out of range");
    e = e.extend(instance, k);
  }
  return e;
}

PrefixEvaluation prefix_bounds(const Instance& instance, std::span<const std::size_t> prefix) {
  return prefix_bounds(instance, Belief(instance.prior()), prefix);
}

}  // namespace recapc
