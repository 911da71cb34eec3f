#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fta {

/// Outcome of one self-check suite. `detail` explains the first failure (or
/// summarizes the corpus on success) so `verify` output is actionable.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  std::string detail;
};

/// Each check builds its own randomized corpus from `seed` (varied lengths,
/// dimensions, modes, thresholds drawn from the AUTO quantile grid) and
/// demands exact code equality across `cases` instances.

/// Zero-frame padding before/after the video leaves codes unchanged for any
/// theta > 0.
CheckResult check_translation_invariance(std::uint64_t seed,
                                         std::size_t cases);

/// Repeating every frame r times (r in {2,3,5}) leaves codes unchanged.
CheckResult check_rate_invariance(std::uint64_t seed, std::size_t cases);

/// Scaling features by c in {0.1, 2, 10} with threshold c*theta gives the
/// code of the original video at theta; and on instances built so every
/// selected row passes theta both before and after scaling, the same theta
/// also gives identical peak-mode codes.
CheckResult check_scale_invariance(std::uint64_t seed, std::size_t cases);

/// Randomly duplicating frames (a monotone re-indexing of time) leaves
/// peak-mode codes unchanged.
CheckResult check_warp_invariance(std::uint64_t seed, std::size_t cases);

/// The production encoder (shared first-act table) agrees exactly with the
/// naive per-group rescan encoder on random (video, spec) pairs, both the
/// peak and thresholding modes.
CheckResult check_oracle_equivalence(std::uint64_t seed, std::size_t cases);

/// All of the above with a common corpus size.
std::vector<CheckResult> run_all_checks(std::uint64_t seed,
                                        std::size_t cases);

/// Wall-time linearity probe for one axis of {n, m, p}: times hash() at a
/// base size and at 16x along that axis (other sizes chosen so the probed
/// term dominates), taking the best of `trials` repetitions. `ratio` is
/// measured 16x time over 16 * base time; `passed` means it lies within
/// [1/tolerance, tolerance].
struct LinearityResult {
  char axis = 'n';
  double base_seconds = 0.0;
  double scaled_seconds = 0.0;
  double ratio = 0.0;
  bool passed = false;
};

LinearityResult check_hash_linearity(char axis, std::uint64_t seed,
                                     int trials = 5,
                                     double tolerance = 1.5);

}  // namespace fta
