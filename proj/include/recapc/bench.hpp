#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace recapc {

struct BenchSize {
  std::size_t n_categories = 0;
  std::size_t n_types = 0;
};

struct BenchConfig {
  std::vector<BenchSize> sizes;
  std::size_t reps = 50;
  double epsilon = 1e-6;
  std::size_t bootstrap_resamples = 1000;
  std::uint64_t seed = 0;
  /// Clip threshold passed through to the instance generator.
  double clip_threshold = 0.01;
};

struct BenchRow {
  std::size_t n_types = 0;
  std::size_t n_categories = 0;
  std::size_t reps = 0;
  double mean_runtime_ms = 0.0;
  double ci95_low_ms = 0.0;
  double ci95_high_ms = 0.0;
  double mean_nodes = 0.0;
};

struct BootstrapCI {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap CI for the mean: resample the values with
/// replacement, take each resample's mean, report the 2.5th and 97.5th
/// percentiles. Deterministic for a given seed; zero width on a constant
/// sample.
BootstrapCI percentile_bootstrap_ci(std::span<const double> values, std::size_t resamples,
                                    std::uint64_t seed);

/// For each size: generates `reps` instances with derived seeds, times the
/// planner on each (monotonic clock), and summarizes runtime and node
/// counts. Timing columns naturally vary between runs; everything else is
/// seed-determined.
std::vector<BenchRow> bench_run(const BenchConfig& config);

/// CSV with header
/// n_types,n_categories,reps,mean_runtime_ms,ci95_low_ms,ci95_high_ms,mean_nodes
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace recapc
