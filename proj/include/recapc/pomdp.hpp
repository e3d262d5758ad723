#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "recapc/instance.hpp"
#include "recapc/valuation.hpp"

namespace recapc {

/// A discounted POMDP equivalent to an instance, in the classic tabular
/// form: discount, start distribution, and dense T/O/R tables.
///
/// The construction doubles each user type into a session state <type>_s
/// (first round pending) and a flow state <type>_f (already liked once),
/// plus one absorbing churn state named ABSORB. Discounting at
/// gamma = p_max is traded against rescaled flow probabilities
/// p(k,m)/p_max, so the discounted reward stream of any recommendation
/// sequence reproduces the undiscounted expected likes of the original
/// instance exactly.
struct PomdpModel {
  double discount = 0.0;
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> observations;  ///< {"like", "dislike"}
  std::vector<double> start;
  /// transition[a][s][s'], observation[a][s'][o], reward[a][s][s'].
  std::vector<std::vector<std::vector<double>>> transition;
  std::vector<std::vector<std::vector<double>>> observation;
  std::vector<std::vector<std::vector<double>>> reward;
};

PomdpModel build_pomdp(const Instance& instance);

/// Emits the model in the plain-text tabular dialect: preamble lines
/// (discount, values, states, actions, observations, start), then one line
/// per non-zero T/O/R entry. Probabilities carry 12 significant digits.
void write_pomdp(const PomdpModel& model, std::ostream& out);
void write_pomdp_file(const PomdpModel& model, const std::string& path);

/// Reads back the dialect emitted by write_pomdp. Unlisted entries are zero.
PomdpModel read_pomdp(std::istream& in);
PomdpModel read_pomdp_file(const std::string& path);

/// Discounted expected reward of a prefix-plus-tail policy executed on the
/// model, computed only from the model's own tables (per-state linear solve
/// for the fixed tail, then backward induction over the prefix). Agrees
/// with value_policy on the source instance.
double discounted_policy_value(const PomdpModel& model, const Policy& policy);

/// Largest deviation of any transition row sum from 1.
double max_transition_row_error(const PomdpModel& model);

}  // namespace recapc
