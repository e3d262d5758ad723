#pragma once

#include <cstdint>

#include "recapc/instance.hpp"

namespace recapc {

/// Knobs for the latent-vector instance generator.
struct GeneratorConfig {
  std::size_t n_categories = 0;
  std::size_t n_types = 0;
  /// P entries are clipped into [clip_threshold, 1 - clip_threshold];
  /// prior entries into [clip_threshold / n_types, 1 - clip_threshold].
  double clip_threshold = 0.01;
  /// Std-dev of the prior logits before the softmax.
  double prior_logit_std = 0.5;
  std::uint64_t seed = 0;
};

/// Draws an instance from the latent-preference ensemble: each category and
/// each type gets an i.i.d. standard-normal latent vector of dimension
/// n_categories; like-probabilities are cosine similarities mapped from
/// [-1, 1] to [0, 1] and clipped; the prior is a softmax of normal logits,
/// clipped and renormalized. Categories are named k1..kK, types m1..mM.
///
/// Draw order is fixed (category vectors row by row, then type vectors, then
/// prior logits, one SplitMix64 stream from `seed`), so a seed pins the
/// instance bit-for-bit.
Instance generate_instance(const GeneratorConfig& config);

}  // namespace recapc
