#include "recapc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>

#include "recapc/errors.hpp"
#include "recapc/generator.hpp"
#include "recapc/rng.hpp"
#include "recapc/solvers.hpp"

namespace recapc {

BootstrapCI percentile_bootstrap_ci(std::span<const double> values, std::size_t resamples,
                                    std::uint64_t seed) {
  if (values.empty()) throw ValidationError("bootstrap needs at least one value");
  if (resamples == 0) throw ValidationError("bootstrap needs at least one resample");
  SplitMix64 g(seed);
  std::vector<double> means(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      total += values[g.next() % values.size()];
    means[b] = total / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  auto percentile = [&](double p) {
    double pos = p * static_cast<double>(resamples - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, resamples - 1);
    double frac = pos - static_cast<double>(lo);
    return means[lo] * (1.0 - frac) + means[hi] * frac;
  };
  return {percentile(0.025), percentile(0.975)};
}

std::vector<BenchRow> bench_run(const BenchConfig& config) {
  if (config.sizes.empty()) throw ValidationError("bench needs at least one size");
  if (config.reps == 0) throw ValidationError("bench needs at least one repetition");

  std::vector<BenchRow> rows;
  rows.reserve(config.sizes.size());
  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    const BenchSize& size = config.sizes[s];
    std::vector<double> runtimes(config.reps);
    double node_total = 0.0;
    for (std::size_t rep = 0; rep < config.reps; ++rep) {
      GeneratorConfig gen;
      gen.n_categories = size.n_categories;
      gen.n_types = size.n_types;
      gen.clip_threshold = config.clip_threshold;
      gen.seed = derive_seed(derive_seed(config.seed, s), rep);
      Instance instance = generate_instance(gen);

      SolveOptions options;
      options.epsilon = config.epsilon;
      auto t0 = std::chrono::steady_clock::now();
      SolveResult result = solve_bnb(instance, options);
      auto t1 = std::chrono::steady_clock::now();
      runtimes[rep] = std::chrono::duration<double, std::milli>(t1 - t0).count();
      node_total += static_cast<double>(result.nodes_expanded);
    }

    BenchRow row;
    row.n_types = size.n_types;
    row.n_categories = size.n_categories;
    row.reps = config.reps;
    double total = 0.0;
    for (double v : runtimes) total += v;
    row.mean_runtime_ms = total / static_cast<double>(config.reps);
    BootstrapCI ci = percentile_bootstrap_ci(runtimes, config.bootstrap_resamples,
                                             derive_seed(config.seed, 0xB007 + s));
    row.ci95_low_ms = ci.low;
    row.ci95_high_ms = ci.high;
    row.mean_nodes = node_total / static_cast<double>(config.reps);
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "n_types,n_categories,reps,mean_runtime_ms,ci95_low_ms,ci95_high_ms,mean_nodes\n";
  char buffer[64];
  for (const auto& row : rows) {
    out << row.n_types << ',' << row.n_categories << ',' << row.reps;
    for (double v : {row.mean_runtime_ms, row.ci95_low_ms, row.ci95_high_ms, row.mean_nodes}) {
      std::snprintf(buffer, sizeof buffer, "%.12g", v);
      out << ',' << buffer;
    }
    out << '\n';
  }
}

}  // namespace recapc
