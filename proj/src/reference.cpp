#include "fta/reference.hpp"

#include <stdexcept>
#include <vector>

namespace fta {

namespace {

/// Independent reading of one posture's first-act time, straight from its
/// score row. Written as a two-pass scan on purpose — it shares no structure
/// with the production single-pass implementation it is checking.
FrameTime rescan_first_act(const ScoreMatrix& scores, std::uint32_t row,
                           Real theta, Mode mode) {
  const Index l = static_cast<Index>(row);
  std::vector<Index> qualifying;
  for (Index i = 0; i < scores.cols(); ++i) {
    if (scores(l, i) >= theta) qualifying.push_back(i);
  }
  if (qualifying.empty()) return kNever;
  if (mode == Mode::thresholding) return qualifying.front() + 1;
  Index best = qualifying.front();
  for (Index i : qualifying) {
    if (scores(l, i) > scores(l, best)) best = i;
  }
  return best + 1;
}

}  // namespace

FtaCode encode_by_rescan(const HashSpec& spec, const ScoreMatrix& scores) {
  if (scores.rows() != static_cast<Index>(spec.bank.m)) {
    throw std::invalid_argument(
        "encode_by_rescan: score matrix does not match bank");
  }
  FtaCode code;
  code.k = spec.k;
  code.p = spec.p;
  code.symbols.resize(spec.p);
  for (std::uint32_t w = 0; w < spec.p; ++w) {
    const std::uint32_t* group =
        spec.groups.data() + static_cast<std::size_t>(w) * spec.k;
    if (spec.mode == Mode::bow) {
      Real row_max = scores(static_cast<Index>(group[0]), 0);
      for (Index i = 1; i < scores.cols(); ++i) {
        row_max = std::max(row_max, scores(static_cast<Index>(group[0]), i));
      }
      code.symbols[w] = row_max >= spec.theta ? 1 : 0;
      continue;
    }
    std::uint8_t winner = 0;
    FrameTime winning_time = kNever;
    for (std::uint32_t j = 0; j < spec.k; ++j) {
      const FrameTime t =
          rescan_first_act(scores, group[j], spec.theta, spec.mode);
      if (t == kNever) continue;
      if (winner == 0 || t < winning_time) {
        winner = static_cast<std::uint8_t>(j + 1);
        winning_time = t;
      }
    }
    code.symbols[w] = winner;
  }
  return code;
}

}  // namespace fta
