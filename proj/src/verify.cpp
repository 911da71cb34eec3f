#include "fta/verify.hpp"

#include "fta/eval.hpp"
#include "fta/reference.hpp"
#include "fta/rng.hpp"
#include "fta/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace fta {

namespace {

constexpr Real kThetaFloor = 1e-12;

VideoSequence random_video(DetRng& rng, Index d, Index n) {
  Matrix frames(d, n);
  for (Index i = 0; i < n; ++i) {
    for (Index r = 0; r < d; ++r) {
      frames(r, i) = rng.normal();
    }
  }
  return make_video(std::move(frames));
}

/// One randomized hashing setup: video, bank and spec with varied sizes and
/// a threshold drawn from the AUTO quantile grid.
struct CaseSetup {
  VideoSequence video;
  HashSpec spec;
};

CaseSetup random_case(DetRng& rng, std::size_t index, bool include_bow) {
  const Index d = (index % 2 == 0) ? 8 : 64;
  const Index n = 10 + static_cast<Index>(rng.below(191));  // 10..200
  const std::uint32_t m = (index % 3 == 0) ? 16 : 48;
  const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng.below(3));
  const std::uint32_t p = (index % 2 == 0) ? 32 : 128;
  Mode mode = (index % 2 == 0) ? Mode::peak : Mode::thresholding;
  if (include_bow && index % 5 == 4) mode = Mode::bow;

  CaseSetup setup;
  setup.video = random_video(rng, d, n);
  const ProjectionBank bank = make_bank(rng.next_u64(), m, d, 1.0);
  const auto& grid = theta_grid_quantiles();
  const Real q = grid[rng.below(grid.size())];
  const Real theta =
      std::max(pooled_score_quantile(bank, {setup.video}, q), kThetaFloor);
  setup.spec = make_hash_spec(bank, k, p, theta, mode, rng.next_u64());
  return setup;
}

std::string describe(const CaseSetup& setup, std::size_t index) {
  std::ostringstream out;
  out << "case " << index << " (d=" << setup.video.dim()
      << ", n=" << setup.video.length() << ", m=" << setup.spec.bank.m
      << ", k=" << setup.spec.k << ", p=" << setup.spec.p
      << ", mode=" << to_string(setup.spec.mode)
      << ", theta=" << setup.spec.theta << ")";
  return out.str();
}

CheckResult pass(std::string name, std::size_t cases, std::string detail) {
  return CheckResult{std::move(name), true, cases, std::move(detail)};
}

CheckResult fail(std::string name, std::size_t cases, std::string detail) {
  return CheckResult{std::move(name), false, cases, std::move(detail)};
}

}  // namespace

CheckResult check_translation_invariance(std::uint64_t seed,
                                         std::size_t cases) {
  const std::string name = "translation-invariance";
  DetRng rng(mix_seed(seed, 1));
  for (std::size_t i = 0; i < cases; ++i) {
    const CaseSetup setup = random_case(rng, i, /*include_bow=*/true);
    const Index front = static_cast<Index>(rng.below(51));
    const Index back = static_cast<Index>(rng.below(51));
    const VideoSequence padded =
        transform_translate(setup.video, front, back);
    if (!(hash(setup.spec, setup.video) == hash(setup.spec, padded))) {
      return fail(name, cases,
                  describe(setup, i) + ": padded code differs (pads " +
                      std::to_string(front) + "+" + std::to_string(back) +
                      ")");
    }
  }
  return pass(name, cases,
              std::to_string(cases) + " cases, zero pads up to 50 frames");
}

CheckResult check_rate_invariance(std::uint64_t seed, std::size_t cases) {
  const std::string name = "rate-invariance";
  DetRng rng(mix_seed(seed, 2));
  constexpr std::uint32_t kRates[] = {2, 3, 5};
  for (std::size_t i = 0; i < cases; ++i) {
    const CaseSetup setup = random_case(rng, i, /*include_bow=*/true);
    const std::uint32_t r = kRates[i % 3];
    const VideoSequence slowed = transform_rate(setup.video, r);
    if (!(hash(setup.spec, setup.video) == hash(setup.spec, slowed))) {
      return fail(name, cases,
                  describe(setup, i) + ": code differs at rate " +
                      std::to_string(r));
    }
  }
  return pass(name, cases,
              std::to_string(cases) + " cases, frame repetition x2/x3/x5");
}

CheckResult check_scale_invariance(std::uint64_t seed, std::size_t cases) {
  const std::string name = "scale-invariance";
  DetRng rng(mix_seed(seed, 3));
  constexpr Real kFactors[] = {0.1, 2.0, 10.0};
  for (std::size_t i = 0; i < cases; ++i) {
    const CaseSetup setup = random_case(rng, i, /*include_bow=*/true);
    const Real c = kFactors[i % 3];
    const VideoSequence scaled = transform_scale(setup.video, c);

    // Joint scaling: features by c, threshold by c.
    HashSpec rescaled = setup.spec;
    rescaled.theta = c * setup.spec.theta;
    if (!(hash(setup.spec, setup.video) == hash(rescaled, scaled))) {
      return fail(name, cases,
                  describe(setup, i) + ": joint (c*features, c*theta) code "
                                       "differs at c=" +
                      std::to_string(c));
    }

    // Unchanged threshold, peak mode: holds once every selected row clears
    // theta before and after scaling, so construct such a theta. Rows whose
    // maximum is not positive cannot clear any positive theta; those draws
    // carry no constructible instance and are skipped.
    if (setup.spec.mode == Mode::bow) continue;
    const ScoreMatrix scores = score(setup.spec.bank, setup.video);
    Real min_selected_max = std::numeric_limits<Real>::infinity();
    for (std::uint32_t row : setup.spec.groups) {
      min_selected_max = std::min(
          min_selected_max, scores.row(static_cast<Index>(row)).maxCoeff());
    }
    min_selected_max *= std::min(c, 1.0);  // scaled scores are c * scores
    if (min_selected_max > 0.0) {
      HashSpec same_theta = setup.spec;
      same_theta.mode = Mode::peak;
      same_theta.theta = 0.5 * min_selected_max;
      if (!(hash(same_theta, setup.video) == hash(same_theta, scaled))) {
        return fail(name, cases,
                    describe(setup, i) +
                        ": same-theta peak code differs at c=" +
                        std::to_string(c));
      }
    }
  }
  return pass(name, cases,
              std::to_string(cases) +
                  " cases, c in {0.1, 2, 10}, joint and same-theta forms");
}

CheckResult check_warp_invariance(std::uint64_t seed, std::size_t cases) {
  const std::string name = "time-warp-invariance";
  DetRng rng(mix_seed(seed, 4));
  for (std::size_t i = 0; i < cases; ++i) {
    CaseSetup setup = random_case(rng, i, /*include_bow=*/false);
    setup.spec.mode = Mode::peak;  // ordering by peak position only
    // Random monotone re-indexing: every frame repeated 1..3 times.
    std::vector<Index> copies(static_cast<std::size_t>(setup.video.length()));
    Index total = 0;
    for (Index& c : copies) {
      c = 1 + static_cast<Index>(rng.below(3));
      total += c;
    }
    Matrix warped(setup.video.dim(), total);
    Index at = 0;
    for (Index col = 0; col < setup.video.length(); ++col) {
      const Index reps = copies[static_cast<std::size_t>(col)];
      warped.middleCols(at, reps).colwise() = setup.video.frames.col(col);
      at += reps;
    }
    const VideoSequence stretched = make_video(std::move(warped));
    if (!(hash(setup.spec, setup.video) == hash(setup.spec, stretched))) {
      return fail(name, cases, describe(setup, i) + ": warped code differs");
    }
  }
  return pass(name, cases,
              std::to_string(cases) + " cases, random 1-3x frame duplication");
}

CheckResult check_oracle_equivalence(std::uint64_t seed, std::size_t cases) {
  const std::string name = "oracle-equivalence";
  DetRng rng(mix_seed(seed, 5));
  for (std::size_t i = 0; i < cases; ++i) {
    const CaseSetup setup = random_case(rng, i, /*include_bow=*/true);
    const ScoreMatrix scores = score(setup.spec.bank, setup.video);
    if (!(hash_scores(setup.spec, scores) ==
          encode_by_rescan(setup.spec, scores))) {
      return fail(name, cases,
                  describe(setup, i) + ": shared-table and rescan encoders "
                                       "disagree");
    }
  }
  return pass(name, cases,
              std::to_string(cases) +
                  " random (video, spec) pairs, all modes, exact agreement");
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed,
                                        std::size_t cases) {
  return {check_translation_invariance(seed, cases),
          check_rate_invariance(seed, cases),
          check_scale_invariance(seed, cases),
          check_warp_invariance(seed, cases),
          check_oracle_equivalence(seed, cases)};
}

namespace {

/// Best-of-trials seconds per hash() call, with enough repetitions per trial
/// to blur allocator and clock noise.
double time_hash(const HashSpec& spec, const VideoSequence& video,
                 int trials) {
  using clock = std::chrono::steady_clock;
  volatile std::uint8_t sink = 0;

  const auto run_once = [&] {
    const FtaCode code = hash(spec, video);
    sink = sink + code.symbols[0];
  };

  // Calibrate repetitions so one trial spans ~20 ms.
  const auto t0 = clock::now();
  run_once();
  const double estimate =
      std::chrono::duration<double>(clock::now() - t0).count();
  const int reps = std::max(1, static_cast<int>(0.02 / std::max(estimate, 1e-9)));

  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const auto start = clock::now();
    for (int i = 0; i < reps; ++i) run_once();
    const double elapsed =
        std::chrono::duration<double>(clock::now() - start).count();
    best = std::min(best, elapsed / reps);
  }
  return best;
}

}  // namespace

LinearityResult check_hash_linearity(char axis, std::uint64_t seed,
                                     int trials, double tolerance) {
  // Base shapes chosen so the probed axis dominates the running time and
  // the fixed per-call overhead stays negligible.
  std::uint32_t m = 64, p = 64;
  Index d = 32, n = 256;
  switch (axis) {
    case 'n': break;
    case 'm': n = 64; break;
    case 'p': m = 8; d = 4; n = 16; p = 8192; break;
    default:
      throw std::invalid_argument(
          "check_hash_linearity: axis must be one of n, m, p");
  }

  DetRng rng(mix_seed(seed, 6));
  const auto build = [&](std::uint32_t mm, Index nn, std::uint32_t pp) {
    VideoSequence video = random_video(rng, d, nn);
    HashSpec spec = make_hash_spec(make_bank(rng.next_u64(), mm, d, 1.0), 2,
                                   pp, 0.0, Mode::peak, rng.next_u64());
    return std::pair<VideoSequence, HashSpec>(std::move(video),
                                              std::move(spec));
  };

  const auto [video_base, spec_base] = build(m, n, p);
  const auto [video_big, spec_big] =
      build(axis == 'm' ? 16 * m : m, axis == 'n' ? 16 * n : n,
            axis == 'p' ? 16 * p : p);

  LinearityResult result;
  result.axis = axis;
  result.base_seconds = time_hash(spec_base, video_base, trials);
  result.scaled_seconds = time_hash(spec_big, video_big, trials);
  result.ratio = result.scaled_seconds / (16.0 * result.base_seconds);
  result.passed =
      result.ratio >= 1.0 / tolerance && result.ratio <= tolerance;
  return result;
}

}  // namespace fta
