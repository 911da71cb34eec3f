#include "fta/projection.hpp"

#include <cmath>

namespace fta {

ProjectionBank make_bank(std::uint64_t seed, std::uint32_t m, Index d,
                         Real sigma) {
  if (m < 1 || d < 1) {
    throw std::invalid_argument("make_bank: need m >= 1 and d >= 1");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("make_bank: sigma must be positive");
  }
  ProjectionBank bank;
  bank.m = m;
  bank.d = d;
  bank.sigma = sigma;
  bank.seed = seed;
  bank.vectors.resize(static_cast<Index>(m), d);
  DetRng rng(mix_seed(seed, kStreamBank));
  // Row-major draw order: vector l is the l-th run of d standard normals,
  // scaled by sigma. Fixed order makes the bank part of the format contract.
  for (Index l = 0; l < bank.vectors.rows(); ++l) {
    for (Index j = 0; j < d; ++j) {
      bank.vectors(l, j) = sigma * rng.normal();
    }
  }
  return bank;
}

ScoreMatrix score(const ProjectionBank& bank, const VideoSequence& v) {
  return score_frames(bank, v.frames);
}

}  // namespace fta
