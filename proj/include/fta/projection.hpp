#pragma once

#include "fta/rng.hpp"
#include "fta/types.hpp"

#include <cstdint>
#include <stdexcept>

namespace fta {

/// m Gaussian projection directions over d-dimensional frames, one per row.
/// Regenerable bit-identically from (seed, m, d, sigma); see make_bank.
struct ProjectionBank {
  std::uint32_t m = 0;
  Index d = 0;
  Real sigma = 1.0;
  std::uint64_t seed = 0;
  Matrix vectors;  // m x d
};

/// Draws the bank deterministically: DetRng(mix_seed(seed, kStreamBank))
/// produces standard normals row by row (row-major order), each scaled by
/// sigma. Same arguments, same matrix, on every platform.
ProjectionBank make_bank(std::uint64_t seed, std::uint32_t m, Index d,
                         Real sigma);

/// Confidence scores of every posture on every frame; row l is posture l's
/// curve over time.
using ScoreMatrix = Matrix;

/// scores(l, i) = <bank row l, frame column i>. Accepts any d x n Eigen
/// expression of frames.
template <class Derived>
ScoreMatrix score_frames(const ProjectionBank& bank,
                         const Eigen::MatrixBase<Derived>& frames) {
  if (frames.rows() != bank.d) {
    throw std::invalid_argument(
        "score: frame dimension does not match bank dimension");
  }
  return bank.vectors * frames;
}

ScoreMatrix score(const ProjectionBank& bank, const VideoSequence& v);

}  // namespace fta
