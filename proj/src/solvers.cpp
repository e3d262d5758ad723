#include "recapc/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <queue>
#include <stdexcept>

namespace recapc {

namespace {

struct Node {
  std::vector<std::size_t> prefix;
  PrefixEvaluation eval;
  std::uint64_t order;  ///< insertion counter; breaks priority ties FIFO
};

struct NodeCompare {
  // std::priority_queue is a max-heap under "less-than"; order by upper
  // bound, then prefer the earlier insertion.
  bool operator()(const Node& a, const Node& b) const {
    if (a.eval.upper() != b.eval.upper()) return a.eval.upper() < b.eval.upper();
    return a.order > b.order;
  }
};

}  // namespace

SolveResult solve_bnb_rooted(const Instance& instance, const Belief& start,
                             std::span<const std::size_t> root_prefix,
                             const SolveOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  if (!(options.epsilon > 0.0)) throw ValidationError("epsilon must be positive");

  const std::size_t n_categories = instance.n_categories();
  const std::size_t depth_cap = horizon_for_epsilon(instance, options.epsilon) + options.depth_margin;

  PrefixEvaluation root_eval = prefix_bounds(instance, start, root_prefix);
  std::vector<std::size_t> incumbent_prefix(root_prefix.begin(), root_prefix.end());
  double incumbent = root_eval.lower();
  std::size_t incumbent_tail = root_eval.best_tail();
  double frontier_ub = -1.0;  // largest upper bound among pruned extensions

  std::priority_queue<Node, std::vector<Node>, NodeCompare> best_first;
  std::deque<Node> fifo;
  std::uint64_t counter = 0;
  auto push = [&](Node&& node) {
    if (options.queue == QueueDiscipline::BestFirst)
      best_first.push(std::move(node));
    else
      fifo.push_back(std::move(node));
  };
  auto empty = [&] {
    return options.queue == QueueDiscipline::BestFirst ? best_first.empty() : fifo.empty();
  };
  auto pop = [&] {
    if (options.queue == QueueDiscipline::BestFirst) {
      Node node = best_first.top();
      best_first.pop();
      return node;
    }
    Node node = std::move(fifo.front());
    fifo.pop_front();
    return node;
  };

  push(Node{incumbent_prefix, root_eval, counter++});
  std::uint64_t expanded = 0;

  while (!empty()) {
    Node node = pop();
    if (options.node_budget != 0 && expanded >= options.node_budget)
      throw NodeBudgetExceededError("node budget exhausted before certifying epsilon-optimality");
    ++expanded;

    if (node.eval.lower() > incumbent) {
      incumbent = node.eval.lower();
      incumbent_prefix = node.prefix;
      incumbent_tail = node.eval.best_tail();
    }

    for (std::size_t k = 0; k < n_categories; ++k) {
      PrefixEvaluation child = node.eval.extend(instance, k);
      bool open = child.upper() - incumbent > options.epsilon && child.depth() < depth_cap &&
                  child.survival() > 0.0;
      if (!open) {
        frontier_ub = std::max(frontier_ub, child.upper());
        continue;
      }
      std::vector<std::size_t> prefix = node.prefix;
      prefix.push_back(k);
      push(Node{std::move(prefix), child, counter++});
    }
  }

  SolveResult result;
  result.prefix = std::move(incumbent_prefix);
  result.value = incumbent;
  result.upper_certificate = std::max(incumbent, frontier_ub);
  result.nodes_expanded = expanded;
  result.extended_policy = Policy{result.prefix, incumbent_tail};
  result.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

SolveResult solve_bnb(const Instance& instance, const Belief& start, const SolveOptions& options) {
  return solve_bnb_rooted(instance, start, {}, options);
}

SolveResult solve_bnb(const Instance& instance, const SolveOptions& options) {
  return solve_bnb(instance, Belief(instance.prior()), options);
}

SolveResult solve_bnb(const Instance& instance, double epsilon) {
  SolveOptions options;
  options.epsilon = epsilon;
  return solve_bnb(instance, options);
}

namespace {

// Count-vector state space for the horizon DP. States of one layer are the
// vectors of category counts with a fixed total; ranked lexicographically via
// the combinatorial number system so lookups are O(|K|).
class LayerIndex {
 public:
  LayerIndex(std::size_t n_categories, std::size_t horizon) : k_(n_categories) {
    // compositions(s, parts) = C(s + parts - 1, parts - 1); table covers
    // C(n, r) for n <= horizon + k.
    binom_.assign(horizon + k_ + 1, std::vector<std::uint64_t>(k_ + 1, 0));
    for (std::size_t n = 0; n <= horizon + k_; ++n) {
      binom_[n][0] = 1;
      for (std::size_t r = 1; r <= std::min(n, k_); ++r)
        binom_[n][r] = binom_[n - 1][r - 1] + (n - 1 >= r ? binom_[n - 1][r] : 0);
    }
  }

  std::uint64_t layer_size(std::size_t total) const { return compositions(total, k_); }

  /// Lexicographic rank of a count vector within its layer.
  std::uint64_t rank(const std::vector<std::size_t>& counts) const {
    std::uint64_t r = 0;
    std::size_t rem = 0;
    for (std::size_t c : counts) rem += c;
    for (std::size_t i = 0; i + 1 < k_; ++i) {
      // States with a smaller count at position i, any remainder behind it:
      // hockey-stick sum of compositions.
      std::size_t parts = k_ - i - 1;
      r += compositions_up_to(rem, parts) - compositions_up_to(rem - counts[i], parts);
      rem -= counts[i];
    }
    return r;
  }

  /// First count vector of a layer (everything in the last coordinate).
  std::vector<std::size_t> first(std::size_t total) const {
    std::vector<std::size_t> counts(k_, 0);
    counts[k_ - 1] = total;
    return counts;
  }

  /// Advances to the next count vector in lexicographic order; returns false
  /// after the last one.
  bool next(std::vector<std::size_t>& counts) const {
    if (k_ == 1) return false;
    // Move one unit from the tail pool into the rightmost position that can
    // take it, resetting everything behind.
    std::size_t tail = counts[k_ - 1];
    for (std::size_t i = k_ - 1; i-- > 0;) {
      if (tail > 0) {
        ++counts[i];
        counts[k_ - 1] = tail - 1;
        for (std::size_t j = i + 1; j + 1 < k_; ++j) counts[j] = 0;
        return true;
      }
      tail += counts[i];
      counts[i] = 0;
    }
    return false;
  }

 private:
  std::uint64_t compositions(std::size_t total, std::size_t parts) const {
    return binom_[total + parts - 1][parts - 1];
  }
  // sum_{v=0}^{total} compositions(v, parts) = C(total + parts, parts)
  std::uint64_t compositions_up_to(std::size_t total, std::size_t parts) const {
    return binom_[total + parts][parts];
  }

  std::size_t k_;
  std::vector<std::vector<std::uint64_t>> binom_;
};

double log_guarded(double v) { return v > 0.0 ? std::log(v) : -1e308; }

}  // namespace

HorizonSolve solve_dp(const Instance& instance, const Belief& start, std::size_t horizon) {
  if (horizon == 0) throw ValidationError("horizon must be at least 1");
  if (start.size() != instance.n_types()) throw ValidationError("belief size mismatch");
  const std::size_t K = instance.n_categories();
  const std::size_t M = instance.n_types();

  {
    // Guard the total state count, C(H + K, K), before allocating anything.
    double states = 1.0;
    for (std::size_t i = 1; i <= K; ++i) states *= double(horizon + i) / double(i);
    if (states > 5e6)
      throw StateBudgetExceededError("horizon DP would need " + std::to_string(states) +
                                     " states; cap is 5e6");
  }

  LayerIndex index(K, horizon);

  // P(k,m)^n tables so per-state posteriors cost K*M multiplies, plus log
  // tables to rebuild a posterior when the direct product underflows.
  std::vector<double> pow_table(K * M * (horizon + 1));
  std::vector<double> log_p(K * M);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t m = 0; m < M; ++m) {
      double* cell = &pow_table[(k * M + m) * (horizon + 1)];
      cell[0] = 1.0;
      for (std::size_t n = 1; n <= horizon; ++n) cell[n] = cell[n - 1] * instance.p(k, m);
      log_p[k * M + m] = log_guarded(instance.p(k, m));
    }

  std::vector<std::vector<std::uint8_t>> best_action(horizon);
  std::vector<double> next_values(index.layer_size(horizon), 0.0);
  std::vector<double> values;
  std::vector<double> w(M);
  std::vector<std::size_t> child(K);

  for (std::size_t h = horizon; h-- > 0;) {
    const std::uint64_t layer = index.layer_size(h);
    values.assign(layer, 0.0);
    best_action[h].assign(layer, 0);

    std::vector<std::size_t> counts = index.first(h);
    std::uint64_t r = 0;
    do {
      // Posterior weights after this count vector of likes.
      double total = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        double v = start[m];
        for (std::size_t k = 0; k < K; ++k)
          v *= pow_table[(k * M + m) * (horizon + 1) + counts[k]];
        w[m] = v;
        total += v;
      }
      if (total <= 1e-280) {
        // Deep product underflow: rebuild the posterior in log space. Only
        // the ratios matter, so shift by the max before exponentiating.
        double max_log = -1e308;
        for (std::size_t m = 0; m < M; ++m) {
          double lv = log_guarded(start[m]);
          for (std::size_t k = 0; k < K; ++k) lv += double(counts[k]) * log_p[k * M + m];
          w[m] = lv;
          max_log = std::max(max_log, lv);
        }
        total = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
          w[m] = (max_log <= -1e307) ? 0.0 : std::exp(w[m] - max_log);
          total += w[m];
        }
        if (total <= 0.0) {
          // The prefix itself is unreachable (some count hits a zero
          // probability for every type); its value is irrelevant.
          values[r] = 0.0;
          continue;
        }
      }

      for (std::size_t k = 0; k < K; ++k) {
        ++counts[k];
        child[k] = index.rank(counts);
        --counts[k];
      }

      double best = -1.0;
      std::uint8_t best_k = 0;
      for (std::size_t k = 0; k < K; ++k) {
        double p = 0.0;
        for (std::size_t m = 0; m < M; ++m) p += w[m] * instance.p(k, m);
        p /= total;
        double candidate = p * (1.0 + next_values[child[k]]);
        if (candidate > best) {
          best = candidate;
          best_k = static_cast<std::uint8_t>(k);
        }
      }
      values[r] = best;
      best_action[h][r] = best_k;
    } while (++r, index.next(counts));

    next_values.swap(values);
  }

  HorizonSolve result;
  result.value = next_values[0];
  std::vector<std::size_t> counts(K, 0);
  for (std::size_t h = 0; h < horizon; ++h) {
    std::size_t k = best_action[h][index.rank(counts)];
    result.prefix.push_back(k);
    ++counts[k];
  }
  return result;
}

HorizonSolve solve_dp(const Instance& instance, std::size_t horizon) {
  return solve_dp(instance, Belief(instance.prior()), horizon);
}

namespace {

void brute_rec(const Instance& instance, const Belief& belief, double survival, double accrued,
               std::size_t remaining, std::vector<std::size_t>& stack, HorizonSolve& best) {
  if (remaining == 0) {
    if (accrued > best.value) {
      best.value = accrued;
      best.prefix = stack;
    }
    return;
  }
  for (std::size_t k = 0; k < instance.n_categories(); ++k) {
    double p = immediate_reward(instance, belief, k);
    double survival2 = survival * p;
    stack.push_back(k);
    if (survival2 <= 1e-300) {
      // Dead branch: every completion scores the same; try the shortest.
      std::size_t pad = remaining - 1;
      for (std::size_t i = 0; i < pad; ++i) stack.push_back(0);
      if (accrued > best.value) {
        best.value = accrued;
        best.prefix = stack;
      }
      for (std::size_t i = 0; i < pad; ++i) stack.pop_back();
    } else {
      brute_rec(instance, bayes_update(instance, belief, k), survival2, accrued + survival2,
                remaining - 1, stack, best);
    }
    stack.pop_back();
  }
}

}  // namespace

HorizonSolve solve_bruteforce(const Instance& instance, const Belief& start, std::size_t horizon) {
  if (horizon == 0) throw ValidationError("horizon must be at least 1");
  double sequences = std::pow(double(instance.n_categories()), double(horizon));
  if (sequences > 1e7)
    throw StateBudgetExceededError("brute force would enumerate " + std::to_string(sequences) +
                                   " sequences; cap is 1e7");
  HorizonSolve best;
  best.value = -1.0;
  std::vector<std::size_t> stack;
  brute_rec(instance, start, 1.0, 0.0, horizon, stack, best);
  return best;
}

HorizonSolve solve_bruteforce(const Instance& instance, std::size_t horizon) {
  return solve_bruteforce(instance, Belief(instance.prior()), horizon);
}

std::vector<std::size_t> policy_myopic(const Instance& instance, const Belief& start,
                                       std::size_t steps) {
  std::vector<std::size_t> prefix;
  prefix.reserve(steps);
  Belief current = start;
  for (std::size_t t = 0; t < steps; ++t) {
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t k = 0; k < instance.n_categories(); ++k) {
      double p = immediate_reward(instance, current, k);
      if (p > best_p) {
        best_p = p;
        best = k;
      }
    }
    prefix.push_back(best);
    if (best_p <= 1e-300) break;  // certain churn; the walk cannot continue
    if (t + 1 < steps) current = bayes_update(instance, current, best);
  }
  return prefix;
}

std::vector<std::size_t> policy_myopic(const Instance& instance, std::size_t steps) {
  return policy_myopic(instance, Belief(instance.prior()), steps);
}

std::size_t policy_bfa(const Instance& instance, const Belief& belief) {
  return lower_bound(instance, belief).category;
}

std::size_t policy_bfa(const Instance& instance) {
  return policy_bfa(instance, Belief(instance.prior()));
}

}  // namespace recapc
