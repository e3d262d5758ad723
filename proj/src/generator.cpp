#include "recapc/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "recapc/rng.hpp"

namespace recapc {

Instance generate_instance(const GeneratorConfig& config) {
  if (config.n_categories == 0 || config.n_types == 0)
    throw ValidationError("generator needs positive category and type counts");
  if (!(config.clip_threshold > 0.0 && config.clip_threshold < 0.5))
    throw ValidationError("clip threshold must lie in (0, 0.5)");
  if (!(config.prior_logit_std >= 0.0) || !std::isfinite(config.prior_logit_std))
    throw ValidationError("prior logit std must be finite and non-negative");

  const std::size_t K = config.n_categories;
  const std::size_t M = config.n_types;
  const std::size_t dim = K;
  SplitMix64 g(config.seed);

  std::vector<std::vector<double>> category_vectors(K, std::vector<double>(dim));
  for (auto& row : category_vectors)
    for (double& v : row) v = g.normal();
  std::vector<std::vector<double>> type_vectors(M, std::vector<double>(dim));
  for (auto& row : type_vectors)
    for (double& v : row) v = g.normal();

  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::max(std::sqrt(s), 1e-300);
  };

  const double lo = config.clip_threshold;
  const double hi = 1.0 - config.clip_threshold;
  PrefMatrix p(K, M);
  for (std::size_t k = 0; k < K; ++k) {
    double nk = norm(category_vectors[k]);
    for (std::size_t m = 0; m < M; ++m) {
      double dot = 0.0;
      for (std::size_t d = 0; d < dim; ++d) dot += category_vectors[k][d] * type_vectors[m][d];
      double cosine = dot / (nk * norm(type_vectors[m]));
      p(k, m) = std::clamp((cosine + 1.0) / 2.0, lo, hi);
    }
  }

  std::vector<double> q(M);
  double total = 0.0;
  for (double& v : q) {
    v = std::exp(g.normal() * config.prior_logit_std);
    total += v;
  }
  for (double& v : q) v /= total;
  double q_lo = config.clip_threshold / static_cast<double>(M);
  for (double& v : q) v = std::clamp(v, q_lo, hi);
  total = 0.0;
  for (double v : q) total += v;
  for (double& v : q) v /= total;

  std::vector<std::string> categories(K), types(M);
  for (std::size_t k = 0; k < K; ++k) categories[k] = "k" + std::to_string(k + 1);
  for (std::size_t m = 0; m < M; ++m) types[m] = "m" + std::to_string(m + 1);

  // The constructor renormalizes q again; after the explicit renormalization
  // above its sum is 1 to machine precision, so that is a no-op.
  return Instance(std::move(categories), std::move(types), std::move(p), std::move(q));
}

}  // namespace recapc
