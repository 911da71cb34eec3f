#pragma once

#include "fta/projection.hpp"
#include "fta/rng.hpp"
#include "fta/types.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fta {

/// How a posture's first-act time is read off its score curve.
///   peak         — frame of the highest score among those reaching theta
///   thresholding — first frame whose score reaches theta
///   bow          — order-free baseline: one bit per posture, "did its max
///                  reach theta at all"; group size is forced to 1
enum class Mode : std::uint8_t { peak, thresholding, bow };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

/// 1-based frame index of a posture's first activation; kNever when the
/// posture's score never reaches the threshold. kNever compares greater
/// than every real frame index, so argmin logic needs no special casing.
using FrameTime = std::int64_t;
inline constexpr FrameTime kNever = std::numeric_limits<FrameTime>::max();

/// First-act times for all m postures of one video under one (theta, mode).
/// Computed once per video and shared by every group during encoding.
struct FirstActTable {
  std::vector<FrameTime> times;
};

/// Per row: the frame of the maximum score among frames with score >= theta
/// (ties -> earliest such frame); kNever when no frame reaches theta.
///
/// Both scans walk frame-by-frame (column-outer) and carry per-row running
/// state: scores are column-major, so this order stays contiguous in memory
/// where a row-by-row sweep would stride by the bank size. The updates are
/// conditional selects rather than branches, so whether a score clears the
/// threshold — unpredictable by design — never stalls the pipeline.
template <class Derived>
FirstActTable first_act_peak(const Eigen::MatrixBase<Derived>& scores,
                             Real theta) {
  FirstActTable table;
  const auto rows = static_cast<std::size_t>(scores.rows());
  table.times.assign(rows, kNever);
  // Running maximum per row; -inf until the row first clears theta, so the
  // first clearing score always wins the comparison below.
  std::vector<Real> best(rows, -std::numeric_limits<Real>::infinity());
  for (Index i = 0; i < scores.cols(); ++i) {
    for (Index l = 0; l < scores.rows(); ++l) {
      const Real s = scores(l, i);
      const auto row = static_cast<std::size_t>(l);
      // Strict > keeps the earliest frame when the maximum repeats.
      const bool act = (s >= theta) & (s > best[row]);
      best[row] = act ? s : best[row];
      table.times[row] = act ? static_cast<FrameTime>(i + 1) : table.times[row];
    }
  }
  return table;
}

/// Per row: the smallest frame index whose score reaches theta; kNever when
/// none does.
template <class Derived>
FirstActTable first_act_threshold(const Eigen::MatrixBase<Derived>& scores,
                                  Real theta) {
  FirstActTable table;
  const auto rows = static_cast<std::size_t>(scores.rows());
  table.times.assign(rows, kNever);
  std::size_t waiting = rows;
  for (Index i = 0; i < scores.cols() && waiting > 0; ++i) {
    for (Index l = 0; l < scores.rows(); ++l) {
      const auto row = static_cast<std::size_t>(l);
      const bool act =
          (table.times[row] == kNever) & (scores(l, i) >= theta);
      table.times[row] = act ? static_cast<FrameTime>(i + 1) : table.times[row];
      waiting -= static_cast<std::size_t>(act);
    }
  }
  return table;
}

FirstActTable first_act(const ScoreMatrix& scores, Real theta, Mode mode);

/// A complete hash function: which postures exist (bank), how activation is
/// detected (theta, mode), and which p groups of k postures race each other.
/// Immutable once built; safe to share across threads.
struct HashSpec {
  ProjectionBank bank;
  std::uint32_t k = 2;   // postures per group (1 in bow mode)
  std::uint32_t p = 1;   // number of groups, i.e. symbols per code
  Real theta = 0.0;
  Mode mode = Mode::peak;
  std::uint64_t selection_seed = 0;
  // Flattened p x k row indices into the bank; group w occupies
  // [w*k, (w+1)*k). Each group holds k distinct indices; distinct groups
  // may overlap or repeat.
  std::vector<std::uint32_t> groups;
};

/// Draws p independent groups of k distinct indices from 0..m-1, uniformly,
/// via DetRng(mix_seed(seed, kStreamGroups)) — regenerable from the seed.
std::vector<std::uint32_t> sample_groups(std::uint64_t seed, std::uint32_t m,
                                         std::uint32_t k, std::uint32_t p);

/// Assembles bank + groups. bow mode overrides k to 1 (existence bits have
/// no within-group race). Throws on k < 1, k > m, p < 1, and on k < 2 for
/// the ordering modes, where a singleton group carries no order information.
HashSpec make_hash_spec(ProjectionBank bank, std::uint32_t k, std::uint32_t p,
                        Real theta, Mode mode, std::uint64_t selection_seed);

/// 64-bit digest of everything that defines the hash function (sizes, seeds,
/// theta, mode, group list). Two specs hash the same videos identically iff
/// their fingerprints match; databases use it to refuse mismatched queries.
std::uint64_t spec_fingerprint(const HashSpec& spec);

/// A hashed video: p symbols, each in 0..k.
struct FtaCode {
  std::uint32_t k = 0;
  std::uint32_t p = 0;
  std::vector<std::uint8_t> symbols;  // size p; values 0..k
};

bool operator==(const FtaCode& a, const FtaCode& b);

/// Per group: 1-based within-group index of the posture acting first; 0 when
/// the whole group never acts. Equal finite times -> smallest within-group
/// index.
FtaCode encode(const HashSpec& spec, const FirstActTable& table);

/// Baseline posture-existence code: symbol w = 1 iff the score row of group
/// w's posture has maximum >= theta. Ignores temporal order entirely.
FtaCode encode_bow(const HashSpec& spec, const ScoreMatrix& scores);

/// Everything after scoring: first-act (per mode) -> encode, with the
/// first-act table computed once and reused across all p groups. bow mode
/// routes through encode_bow. Split out so callers that sweep thresholds can
/// reuse one score matrix.
FtaCode hash_scores(const HashSpec& spec, const ScoreMatrix& scores);

/// score -> hash_scores.
FtaCode hash(const HashSpec& spec, const VideoSequence& v);

/// Bits needed per symbol: ceil(log2(k+1)).
std::uint32_t symbol_bits(std::uint32_t k);

/// Fixed-width packed form: p fields of symbol_bits(k) bits, MSB-first
/// within each byte, zero-padded to a whole number of bytes.
struct PackedCode {
  std::uint32_t k = 0;
  std::uint32_t p = 0;
  std::uint64_t bit_count = 0;  // p * symbol_bits(k)
  std::vector<std::uint8_t> bytes;
};

PackedCode pack(const FtaCode& code);

/// Inverse of pack. Rejects byte buffers whose length is not exactly
/// ceil(p*symbol_bits(k)/8) or whose padding bits are nonzero.
FtaCode unpack(const std::vector<std::uint8_t>& bytes, std::uint32_t k,
               std::uint32_t p);

}  // namespace fta
