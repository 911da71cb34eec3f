#pragma once

#include "fta/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace fta {

/// Recipe for one synthetic sequence: a fixed set of unit-norm posture
/// prototypes visited in a given order, each held for a block of frames with
/// optional additive Gaussian noise.
struct SynthSpec {
  std::uint64_t seed = 0;
  Index d = 1;
  std::uint32_t num_postures = 1;
  std::vector<std::uint32_t> posture_order;
  std::uint32_t frames_per_posture = 1;
  Real noise_sigma = 0.0;
  /// Noise stream seed; defaults to `seed`. Letting it differ keeps the
  /// prototypes shared while varying the noise between sequences of a corpus.
  std::optional<std::uint64_t> noise_seed;
};

/// The d x count matrix of posture prototypes for a seed: unit-norm Gaussian
/// directions, redrawn until pairwise |cos| <= 0.99 so posture order stays
/// identifiable.
Matrix posture_prototypes(std::uint64_t seed, Index d, std::uint32_t count);

/// Deterministic synthetic sequence per the spec above. Noise for each block
/// is keyed by (posture id, occurrence index), so reordering the blocks
/// permutes frames instead of redrawing them.
VideoSequence make_synthetic(const SynthSpec& spec);

/// Pads the sequence with all-zero frames.
VideoSequence transform_translate(const VideoSequence& v, Index pad_front,
                                  Index pad_back);

/// Multiplies every frame by c > 0.
VideoSequence transform_scale(const VideoSequence& v, Real c);

/// Repeats each frame r >= 1 consecutive times.
VideoSequence transform_rate(const VideoSequence& v, std::uint32_t r);

/// Recipe for a synthetic labeled corpus: one posture order per class over a
/// shared prototype set. Used by the order-reversal benchmark.
struct SynthDatasetSpec {
  std::uint64_t seed = 0;
  Index d = 16;
  std::uint32_t num_postures = 2;
  std::vector<std::vector<std::uint32_t>> class_orders;
  std::vector<std::uint32_t> fpp_choices = {6};
  Real noise_sigma = 0.0;
  std::uint32_t train_per_class = 4;
  std::uint32_t test_per_class = 4;
  Index pad_max = 0;
};

/// Builds the corpus: every sequence shares the prototype set of `seed`;
/// frames-per-posture, zero padding and the noise stream vary per sequence.
/// Class names are "order-a-b-c" strings derived from the orders.
Dataset make_synthetic_dataset(const SynthDatasetSpec& spec);

}  // namespace fta
