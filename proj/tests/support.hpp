#pragma once

// Shared fixtures for the test suites.

#include <cstdint>
#include <string>
#include <vector>

#include "recapc/generator.hpp"
#include "recapc/instance.hpp"

namespace testsupport {

inline recapc::Instance make(std::vector<std::string> categories, std::vector<std::string> types,
                             const std::vector<std::vector<double>>& rows, std::vector<double> q) {
  recapc::PrefMatrix p(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t m = 0; m < rows[k].size(); ++m) p(k, m) = rows[k][m];
  return recapc::Instance(std::move(categories), std::move(types), std::move(p), std::move(q));
}

/// Two categories, two types, uniform prior. k2 wins the first rounds but the
/// optimal policy is constant k1: value 86/9 versus 4.0125 for fixed k2.
inline recapc::Instance example1() {
  return make({"k1", "k2"}, {"m1", "m2"}, {{0.95, 0.10}, {0.79, 0.81}}, {0.5, 0.5});
}

/// Family with an unbounded planning-versus-greedy gap. The greedy policy
/// keeps the flat second row forever (value 4) while committing to the first
/// row pays 4*d.
inline recapc::Instance greedy_trap(double d) {
  double top = 8.0 * d / (1.0 + 8.0 * d);
  return make({"k1", "k2"}, {"m1", "m2"}, {{top, 0.0}, {0.8, 0.8}}, {0.5, 0.5});
}

// Four hand-picked 3x3 instances with known walk destinations, used as golden
// tests for the planner, the greedy baseline, and the best-fixed-action rule.

/// Optimal and best-fixed-action walks end at m3; the greedy walk ends at m1.
inline recapc::Instance golden1() {
  return make({"k1", "k2", "k3"}, {"m1", "m2", "m3"},
              {{0.8611, 0.4591, 0.6862}, {0.0969, 0.5531, 0.8604}, {0.5055, 0.1430, 0.8879}},
              {0.1713, 0.4465, 0.3822});
}

/// All three walks end at m2.
inline recapc::Instance golden2() {
  return make({"k1", "k2", "k3"}, {"m1", "m2", "m3"},
              {{0.6848, 0.9100, 0.5457}, {0.7741, 0.8284, 0.5833}, {0.1931, 0.9127, 0.5273}},
              {0.3844, 0.1197, 0.4959});
}

/// Best fixed action deviates immediately (and ends at m3); the optimal walk
/// starts like the greedy one and ends at m2.
inline recapc::Instance golden3() {
  return make({"k1", "k2", "k3"}, {"m1", "m2", "m3"},
              {{0.5492, 0.0560, 0.8878}, {0.2195, 0.8576, 0.2072}, {0.7674, 0.7992, 0.4051}},
              {0.2972, 0.4001, 0.3027});
}

/// Greedy and best fixed action coincide and end at m3; the optimal walk ends
/// at m2, with b(m2) falling for about fourteen rounds before it rises.
inline recapc::Instance golden4() {
  return make({"k1", "k2", "k3"}, {"m1", "m2", "m3"},
              {{0.4011, 0.8521, 0.8301}, {0.7683, 0.7837, 0.8314}, {0.7674, 0.7832, 0.4051}},
              {0.3755, 0.3921, 0.2324});
}

inline recapc::Instance random_instance(std::size_t n_categories, std::size_t n_types,
                                        std::uint64_t seed, double clip = 0.01) {
  recapc::GeneratorConfig config;
  config.n_categories = n_categories;
  config.n_types = n_types;
  config.clip_threshold = clip;
  config.seed = seed;
  return recapc::generate_instance(config);
}

}  // namespace testsupport
