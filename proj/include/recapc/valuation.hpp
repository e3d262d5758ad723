#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recapc/belief.hpp"
#include "recapc/instance.hpp"

namespace recapc {

/// A recommendation policy in the only shape an optimal policy ever needs:
/// a finite prefix of categories followed by one category repeated forever.
struct Policy {
  std::vector<std::size_t> prefix;
  std::size_t tail = 0;

  std::size_t at(std::size_t t) const {  // 0-based round index
    return t < prefix.size() ? prefix[t] : tail;
  }
};

struct BoundedValue {
  double lower = 0.0;
  double upper = 0.0;
};

struct LowerBound {
  double value = 0.0;
  std::size_t category = 0;  ///< the fixed category attaining it
};

/// Expected total likes when category k is recommended forever:
///   sum_m b(m) * p(k,m) / (1 - p(k,m)).
double value_fixed(const Instance& instance, const Belief& belief, std::size_t k);

/// Expected total likes of a prefix-plus-tail policy, evaluated per type and
/// mixed by the belief. Exact (geometric tail in closed form).
double value_policy(const Instance& instance, const Belief& belief, const Policy& policy);

/// Per-type expected total likes of a policy: entry m conditions on the user
/// being of type m. value_policy is the belief-weighted mean of this vector.
std::vector<double> value_policy_per_type(const Instance& instance, const Policy& policy);

/// Expected likes from the first `horizon` rounds of the given sequence,
/// walking the belief forward one like at a time. Requires
/// prefix.size() >= horizon.
double value_finite_horizon(const Instance& instance, const Belief& belief,
                            std::span<const std::size_t> prefix, std::size_t horizon);

/// Smallest horizon H with tail mass p_max^H * p_max / (1 - p_max) <= epsilon:
/// truncating any policy after H rounds costs at most epsilon.
/// Clamped to at least 1; throws HorizonOverflowError above 1e7.
std::size_t horizon_for_epsilon(const Instance& instance, double epsilon);

/// Full-information upper bound: every type is served its best category,
///   sum_m b(m) * max_k p(k,m)/(1-p(k,m)).
double upper_bound(const Instance& instance, const Belief& belief);

/// Best fixed-category value and its category (lowest index on ties); this is
/// an attainable policy, hence a lower bound on the optimum.
LowerBound lower_bound(const Instance& instance, const Belief& belief);

/// Running evaluation of a recommendation prefix: accumulated expected likes,
/// survival probability (the product of like-probabilities so far), the
/// posterior at the end of the prefix, and bounds on the total value of any
/// policy that starts with this prefix.
///
/// extend() is O(|K| * |M|) which is what makes the search affordable: a
/// child node never re-walks its prefix.
class PrefixEvaluation {
 public:
  /// The empty prefix at the given start belief.
  static PrefixEvaluation root(const Instance& instance, const Belief& start);

  /// This prefix followed by category k.
  PrefixEvaluation extend(const Instance& instance, std::size_t k) const;

  const Belief& belief() const { return belief_; }
  double survival() const { return survival_; }
  double accrued() const { return accrued_; }
  /// Value of this prefix followed by the best fixed tail (attainable).
  double lower() const { return lower_; }
  /// Value ceiling over all continuations of this prefix.
  double upper() const { return upper_; }
  std::size_t best_tail() const { return tail_; }
  std::size_t depth() const { return depth_; }

  BoundedValue bounds() const { return {lower_, upper_}; }

 private:
  PrefixEvaluation(Belief belief, double survival, double accrued, std::size_t depth)
      : belief_(std::move(belief)), survival_(survival), accrued_(accrued), depth_(depth) {}
  void finish(const Instance& instance);

  Belief belief_;
  double survival_;
  double accrued_;
  std::size_t depth_;
  double lower_ = 0.0;
  double upper_ = 0.0;
  std::size_t tail_ = 0;
};

/// Evaluates a whole prefix from the instance prior in one call.
PrefixEvaluation prefix_bounds(const Instance& instance, std::span<const std::size_t> prefix);
PrefixEvaluation prefix_bounds(const Instance& instance, const Belief& start,
                               std::span<const std::size_t> prefix);

}  // namespace recapc
