#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "recapc/instance.hpp"

namespace recapc {

/// A sparse table of explicit ratings.
struct RatingsTable {
  struct Row {
    std::string user;
    std::string item;
    double rating = 0.0;
  };
  std::vector<Row> rows;
  double rating_max = 5.0;
};

/// Reads CSV with header user_id,item_id,rating. Ratings must lie in
/// [1, rating_max]. Duplicate (user, item) pairs are rejected.
RatingsTable load_ratings_csv(std::istream& in, double rating_max = 5.0);
RatingsTable load_ratings_csv_file(const std::string& path, double rating_max = 5.0);

/// Reads CSV with header id,cluster mapping users (or items) to cluster
/// labels.
std::map<std::string, std::string> load_assignments_csv_file(const std::string& path);

enum class IngestMode {
  /// Cluster assignments are supplied in files; the faithful path when an
  /// external co-clustering is available.
  ExternalAssignments,
  /// Seeded alternating block k-means over the table itself.
  AlternatingKMeans,
};

struct IngestOptions {
  IngestMode mode = IngestMode::AlternatingKMeans;
  std::size_t n_user_clusters = 0;  ///< k-means mode only
  std::size_t n_item_clusters = 0;  ///< k-means mode only
  /// External mode: user-id -> cluster label and item-id -> cluster label.
  std::map<std::string, std::string> user_assignments;
  std::map<std::string, std::string> item_assignments;
  /// Optional Gaussian noise added to the probability estimates.
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 100;
};

struct IngestResult {
  /// Categories are item clusters, types are user clusters. Probabilities
  /// are block mean ratings over rating_max, noised if requested, always
  /// clipped into [0.01, 0.99]; the prior is user-cluster sizes over the
  /// user count.
  Instance instance;
  /// Blocks with no ratings, filled with the global mean ratio.
  std::size_t imputed_cells = 0;
  double impute_value = 0.0;
  /// k-means mode: block-residual objective after each iteration.
  std::vector<double> objective;
  /// k-means mode: empty clusters refilled mid-run (objective may tick up
  /// at such an iteration).
  std::size_t reseed_events = 0;
};

/// Aggregates a ratings table into an instance. Deterministic given the
/// table, the options, and the seed.
IngestResult ingest_ratings(const RatingsTable& table, const IngestOptions& options);

}  // namespace recapc
