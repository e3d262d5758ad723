#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "recapc/errors.hpp"

namespace recapc {

/// Dense row-major matrix of like-probabilities.
/// Rows are content categories, columns are user types; this orientation is
/// fixed across the whole codebase and is never transposed.
class PrefMatrix {
 public:
  PrefMatrix() = default;
  PrefMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t k, std::size_t m) { return data_[k * cols_ + m]; }
  double operator()(std::size_t k, std::size_t m) const { return data_[k * cols_ + m]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A complete problem definition: named categories and user types, the
/// category-by-type like-probability matrix P, and the prior q over types.
///
/// Construction validates everything a downstream algorithm relies on:
///  - P entries lie in [0, 1] and q entries in [0, 1], all finite;
///  - q sums to 1 within 1e-6 (then gets renormalized exactly);
///  - types with zero prior mass are dropped, so stored priors are > 0;
///  - after dropping, max P entry is < 1, otherwise the expected session
///    length diverges and InfiniteWelfareError is thrown.
///
/// Geometric-series ratios p/(1-p) and their per-type maxima are cached at
/// construction because the bound computations on the search hot path need
/// them for every node.
class Instance {
 public:
  Instance(std::vector<std::string> categories, std::vector<std::string> types,
           PrefMatrix p, std::vector<double> q);

  std::size_t n_categories() const { return categories_.size(); }
  std::size_t n_types() const { return types_.size(); }

  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<std::string>& types() const { return types_; }

  const PrefMatrix& pref() const { return p_; }
  double p(std::size_t k, std::size_t m) const { return p_(k, m); }

  /// Prior over types; strictly positive entries summing to 1.
  const std::vector<double>& prior() const { return q_; }

  double p_max() const { return p_max_; }

  /// Cached p(k,m) / (1 - p(k,m)): expected future likes from type m if
  /// category k is recommended forever and the type is known.
  double ratio(std::size_t k, std::size_t m) const { return ratio_(k, m); }

  /// max_k ratio(k, m) for each type; the full-information ceiling.
  const std::vector<double>& best_ratio() const { return best_ratio_; }

  /// Index of a category name, or throws ValidationError.
  std::size_t category_index(const std::string& name) const;

 private:
  std::vector<std::string> categories_;
  std::vector<std::string> types_;
  PrefMatrix p_;
  std::vector<double> q_;
  double p_max_ = 0.0;
  PrefMatrix ratio_;
  std::vector<double> best_ratio_;
};

/// Parses the canonical JSON instance document:
///   {"categories": [...], "types": [...], "P": [[row per category]], "q": [...]}
/// Unknown keys are rejected rather than ignored.
Instance load_instance(const std::string& json_text);

/// Same, reading the document from a file.
Instance load_instance_file(const std::string& path);

/// Serializes an instance back to the canonical document (stable key order,
/// two-space indentation). load_instance(instance_to_json(i)) round-trips.
std::string instance_to_json(const Instance& instance);

}  // namespace recapc
