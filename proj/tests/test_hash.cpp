#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fta/hash.hpp"
#include "fta/projection.hpp"
#include "fta/rng.hpp"
#include "fta/synthetic.hpp"
#include "fta/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

namespace {

/// Bank whose projection matrix is given verbatim, for hand-checkable scores.
fta::ProjectionBank literal_bank(fta::Matrix vectors) {
  fta::ProjectionBank bank;
  bank.m = static_cast<std::uint32_t>(vectors.rows());
  bank.d = vectors.cols();
  bank.sigma = 1.0;
  bank.seed = 0;
  bank.vectors = std::move(vectors);
  return bank;
}

/// Spec with an explicit group list, bypassing sampling.
fta::HashSpec literal_spec(fta::ProjectionBank bank, std::uint32_t k,
                           std::uint32_t p, fta::Real theta, fta::Mode mode,
                           std::vector<std::uint32_t> groups) {
  fta::HashSpec spec;
  spec.bank = std::move(bank);
  spec.k = k;
  spec.p = p;
  spec.theta = theta;
  spec.mode = mode;
  spec.groups = std::move(groups);
  return spec;
}

/// One-row score matrix (single posture's curve over time).
fta::ScoreMatrix curve(const std::vector<double>& values) {
  fta::ScoreMatrix s(1, static_cast<fta::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    s(0, static_cast<fta::Index>(i)) = values[i];
  }
  return s;
}

}  // namespace

TEST_CASE("make_bank draws a deterministic sigma-scaled Gaussian matrix") {
  const fta::ProjectionBank bank = fta::make_bank(42, 8, 5, 1.0);
  CHECK(bank.vectors.rows() == 8);
  CHECK(bank.vectors.cols() == 5);
  CHECK(bank.vectors == fta::make_bank(42, 8, 5, 1.0).vectors);
  CHECK(bank.vectors != fta::make_bank(43, 8, 5, 1.0).vectors);

  // Scaling sigma scales the matrix, nothing else.
  const fta::ProjectionBank wide = fta::make_bank(42, 8, 5, 2.5);
  CHECK(wide.vectors == (bank.vectors * 2.5).eval());

  // Standard-normal statistics over a large bank.
  const fta::ProjectionBank big = fta::make_bank(7, 500, 100, 1.0);
  const double n = 500.0 * 100.0;
  const double mean = big.vectors.sum() / n;
  const double var = big.vectors.array().square().sum() / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));

  CHECK_THROWS_WITH(fta::make_bank(1, 0, 5, 1.0), doctest::Contains("m >= 1"));
  CHECK_THROWS_WITH(fta::make_bank(1, 5, 0, 1.0), doctest::Contains("d >= 1"));
  CHECK_THROWS_WITH(fta::make_bank(1, 5, 5, 0.0),
                    doctest::Contains("positive"));
  CHECK_THROWS_WITH(fta::make_bank(1, 5, 5, -1.0),
                    doctest::Contains("positive"));
}

TEST_CASE("score is the plain matrix product of bank and frames") {
  fta::Matrix vectors(3, 2);
  vectors << 1, 0,
             0, 1,
             1, 1;
  const fta::ProjectionBank bank = literal_bank(vectors);

  fta::Matrix frames(2, 2);
  frames << 1, 2,
            3, 4;
  const fta::ScoreMatrix s = fta::score_frames(bank, frames);
  fta::Matrix expected(3, 2);
  expected << 1, 2,
              3, 4,
              4, 6;
  CHECK(s == expected);

  CHECK(fta::score(bank, fta::make_video(frames)) == expected);
  CHECK_THROWS_WITH(fta::score_frames(bank, fta::Matrix::Zero(3, 2)),
                    doctest::Contains("does not match bank"));
}

TEST_CASE("mode names round-trip, with thresholding spelled both ways") {
  CHECK(fta::to_string(fta::Mode::peak) == "peak");
  CHECK(fta::to_string(fta::Mode::thresholding) == "threshold");
  CHECK(fta::to_string(fta::Mode::bow) == "bow");
  CHECK(fta::mode_from_string("peak") == fta::Mode::peak);
  CHECK(fta::mode_from_string("threshold") == fta::Mode::thresholding);
  CHECK(fta::mode_from_string("thresholding") == fta::Mode::thresholding);
  CHECK(fta::mode_from_string("bow") == fta::Mode::bow);
  CHECK_THROWS_WITH(fta::mode_from_string("fft"),
                    doctest::Contains("unknown mode"));
}

TEST_CASE("peak first-act picks the highest qualifying frame") {
  // Frame indices are 1-based.
  CHECK(fta::first_act_peak(curve({0.1, 0.9, 0.4, 0.2}), 0.5).times[0] == 2);
  // Nothing reaches the threshold.
  CHECK(fta::first_act_peak(curve({0.3, 0.2}), 0.5).times[0] == fta::kNever);
  // Repeated maximum: the earliest one wins.
  CHECK(fta::first_act_peak(curve({0.7, 0.9, 0.9}), 0.5).times[0] == 2);
  // The maximum need not be first to qualify.
  CHECK(fta::first_act_peak(curve({0.6, 0.2, 1.0}), 0.5).times[0] == 3);
  // Scores equal to theta qualify (the comparison is inclusive).
  CHECK(fta::first_act_peak(curve({0.5}), 0.5).times[0] == 1);
  // Negative thresholds work: every frame qualifies, max is picked.
  CHECK(fta::first_act_peak(curve({-3.0, -1.0, -2.0}), -10.0).times[0] == 2);
}

TEST_CASE("threshold first-act picks the earliest qualifying frame") {
  CHECK(fta::first_act_threshold(curve({0.1, 0.9, 0.4}), 0.5).times[0] == 2);
  CHECK(fta::first_act_threshold(curve({0.3, 0.2}), 0.5).times[0] ==
        fta::kNever);
  CHECK(fta::first_act_threshold(curve({0.5}), 0.5).times[0] == 1);
  // Where peak waits for the global maximum, thresholding fires on first
  // contact: same curve, different reading.
  const fta::ScoreMatrix s = curve({0.6, 0.2, 1.0});
  CHECK(fta::first_act_threshold(s, 0.5).times[0] == 1);
  CHECK(fta::first_act_peak(s, 0.5).times[0] == 3);
}

TEST_CASE("first_act handles all rows and rejects bow mode") {
  fta::ScoreMatrix s(2, 3);
  s << 0.1, 0.9, 0.4,
       0.0, 0.1, 0.2;
  const fta::FirstActTable peak = fta::first_act(s, 0.5, fta::Mode::peak);
  REQUIRE(peak.times.size() == 2);
  CHECK(peak.times[0] == 2);
  CHECK(peak.times[1] == fta::kNever);
  CHECK_THROWS_WITH(fta::first_act(s, 0.5, fta::Mode::bow),
                    doctest::Contains("encode_bow"));
}

TEST_CASE("encode emits the within-group index of the first actor") {
  const fta::ProjectionBank bank = fta::make_bank(1, 4, 3, 1.0);

  SUBCASE("second member acting first gives symbol 2") {
    const auto spec = literal_spec(bank, 2, 1, 0.5, fta::Mode::peak, {0, 1});
    CHECK(fta::encode(spec, {{2, 1, fta::kNever, fta::kNever}}).symbols ==
          std::vector<std::uint8_t>{2});
  }
  SUBCASE("a group in which nothing ever acts gives symbol 0") {
    const auto spec = literal_spec(bank, 2, 1, 0.5, fta::Mode::peak, {0, 1});
    CHECK(fta::encode(spec, {{fta::kNever, fta::kNever, fta::kNever,
                              fta::kNever}}).symbols ==
          std::vector<std::uint8_t>{0});
  }
  SUBCASE("a finite time always beats a never") {
    const auto spec = literal_spec(bank, 2, 1, 0.5, fta::Mode::peak, {0, 1});
    CHECK(fta::encode(spec, {{fta::kNever, 4, fta::kNever, fta::kNever}})
              .symbols == std::vector<std::uint8_t>{2});
  }
  SUBCASE("equal finite times resolve to the smallest within-group index") {
    const auto spec = literal_spec(bank, 2, 1, 0.5, fta::Mode::peak, {0, 1});
    CHECK(fta::encode(spec, {{3, 3, fta::kNever, fta::kNever}}).symbols ==
          std::vector<std::uint8_t>{1});
  }
  SUBCASE("groups are read independently off one shared table") {
    const auto spec =
        literal_spec(bank, 2, 2, 0.5, fta::Mode::peak, {0, 1, 2, 3});
    const fta::FtaCode code = fta::encode(spec, {{2, 1, fta::kNever, 4}});
    CHECK(code.symbols == std::vector<std::uint8_t>{2, 2});
    CHECK(code.k == 2);
    CHECK(code.p == 2);
  }
  SUBCASE("group members are positional, not sorted") {
    const auto spec = literal_spec(bank, 2, 1, 0.5, fta::Mode::peak, {3, 0});
    // Row 3 acts at time 1, row 0 at time 9; row 3 sits at position 1.
    CHECK(fta::encode(spec, {{9, fta::kNever, fta::kNever, 1}}).symbols ==
          std::vector<std::uint8_t>{1});
  }
  SUBCASE("a table of the wrong size is rejected") {
    const auto spec = literal_spec(bank, 2, 1, 0.5, fta::Mode::peak, {0, 1});
    CHECK_THROWS_WITH(fta::encode(spec, {{1, 2}}),
                      doctest::Contains("does not cover"));
  }
}

TEST_CASE("encode_bow emits per-posture existence bits") {
  const fta::ProjectionBank bank = fta::make_bank(2, 3, 2, 1.0);
  const auto spec = literal_spec(bank, 1, 2, 0.5, fta::Mode::bow, {0, 2});

  fta::ScoreMatrix s(3, 4);
  s << 0.1, 0.6, 0.2, 0.0,   // row 0: max 0.6 >= theta -> 1
       9.0, 9.0, 9.0, 9.0,   // row 1: unused by the groups
       0.1, 0.2, 0.3, 0.4;   // row 2: max 0.4 <  theta -> 0
  const fta::FtaCode code = fta::encode_bow(spec, s);
  CHECK(code.symbols == std::vector<std::uint8_t>{1, 0});

  // Frame order is invisible to the existence bits.
  fta::ScoreMatrix reversed = s.rowwise().reverse();
  CHECK(fta::encode_bow(spec, reversed) == code);

  auto ordered = literal_spec(bank, 2, 1, 0.5, fta::Mode::peak, {0, 1});
  CHECK_THROWS_WITH(fta::encode_bow(ordered, s),
                    doctest::Contains("not in bow mode"));
  CHECK_THROWS_WITH(fta::encode_bow(spec, fta::ScoreMatrix::Zero(2, 4)),
                    doctest::Contains("does not match bank"));
}

TEST_CASE("hash pipeline is deterministic and order-sensitive") {
  fta::SynthSpec recipe;
  recipe.seed = 5;
  recipe.d = 16;
  recipe.num_postures = 2;
  recipe.posture_order = {0, 1};
  recipe.frames_per_posture = 6;
  const fta::VideoSequence forward = fta::make_synthetic(recipe);
  recipe.posture_order = {1, 0};
  const fta::VideoSequence backward = fta::make_synthetic(recipe);

  const fta::ProjectionBank bank = fta::make_bank(99, 32, 16, 1.0);
  const fta::HashSpec spec =
      fta::make_hash_spec(bank, 2, 64, 0.1, fta::Mode::peak, 123);

  const fta::FtaCode a = fta::hash(spec, forward);
  const fta::FtaCode b = fta::hash(spec, forward);
  CHECK(a == b);  // same spec, same video, same code

  // Reversing the posture order must flip at least one race.
  CHECK_FALSE(fta::hash(spec, backward) == a);

  // hash == score + hash_scores, by construction.
  CHECK(fta::hash_scores(spec, fta::score(bank, forward)) == a);
}

TEST_CASE("make_hash_spec enforces the mode/size rules") {
  const fta::ProjectionBank bank = fta::make_bank(3, 8, 4, 1.0);

  const fta::HashSpec bow =
      fta::make_hash_spec(bank, 5, 16, 0.2, fta::Mode::bow, 1);
  CHECK(bow.k == 1);  // existence bits ignore the requested group size
  CHECK(bow.groups.size() == 16);

  const fta::HashSpec peak =
      fta::make_hash_spec(bank, 3, 10, 0.2, fta::Mode::peak, 1);
  CHECK(peak.k == 3);
  CHECK(peak.groups.size() == 30);

  CHECK_THROWS_WITH(fta::make_hash_spec(bank, 1, 4, 0.2, fta::Mode::peak, 1),
                    doctest::Contains("k >= 2"));
  CHECK_THROWS_WITH(
      fta::make_hash_spec(bank, 9, 4, 0.2, fta::Mode::thresholding, 1),
      doctest::Contains("exceeds bank size"));
  CHECK_THROWS_WITH(fta::make_hash_spec(bank, 2, 0, 0.2, fta::Mode::peak, 1),
                    doctest::Contains("p >= 1"));
  CHECK_THROWS_WITH(fta::make_hash_spec(bank, 2, 4, std::nan(""),
                                        fta::Mode::peak, 1),
                    doctest::Contains("finite"));
}

TEST_CASE("sample_groups draws distinct in-range indices per group") {
  const std::uint32_t m = 10;
  const std::uint32_t k = 4;
  const std::uint32_t p = 50;
  const auto groups = fta::sample_groups(7, m, k, p);
  REQUIRE(groups.size() == static_cast<std::size_t>(k) * p);
  for (std::uint32_t w = 0; w < p; ++w) {
    std::set<std::uint32_t> members;
    for (std::uint32_t j = 0; j < k; ++j) {
      const std::uint32_t idx = groups[w * k + j];
      CHECK(idx < m);
      members.insert(idx);
    }
    CHECK(members.size() == k);  // distinct within the group
  }
  CHECK(groups == fta::sample_groups(7, m, k, p));
  CHECK(groups != fta::sample_groups(8, m, k, p));

  // k == m forces each group to be a permutation of all indices.
  const auto full = fta::sample_groups(7, 5, 5, 3);
  for (std::uint32_t w = 0; w < 3; ++w) {
    std::set<std::uint32_t> members(full.begin() + w * 5,
                                    full.begin() + (w + 1) * 5);
    CHECK(members == std::set<std::uint32_t>{0, 1, 2, 3, 4});
  }

  CHECK_THROWS_WITH(fta::sample_groups(7, 3, 4, 1),
                    doctest::Contains("k <= m"));
  CHECK_THROWS_WITH(fta::sample_groups(7, 3, 0, 1),
                    doctest::Contains("k <= m"));
}

TEST_CASE("symbol width is the bit width of k") {
  CHECK(fta::symbol_bits(1) == 1);  // symbols 0..1
  CHECK(fta::symbol_bits(2) == 2);  // symbols 0..2
  CHECK(fta::symbol_bits(3) == 2);  // symbols 0..3
  CHECK(fta::symbol_bits(4) == 3);  // symbols 0..4
  CHECK(fta::symbol_bits(7) == 3);
  CHECK(fta::symbol_bits(8) == 4);
  CHECK_THROWS_WITH(fta::symbol_bits(0), doctest::Contains("k >= 1"));
}

TEST_CASE("pack lays out MSB-first fixed-width fields") {
  SUBCASE("k=2, p=3: symbols 0,1,2 pack into one byte") {
    const fta::FtaCode code{2, 3, {0, 1, 2}};
    const fta::PackedCode packed = fta::pack(code);
    CHECK(packed.bit_count == 6);
    REQUIRE(packed.bytes.size() == 1);
    // Fields 00 01 10, then two zero padding bits: 0b00011000.
    CHECK(packed.bytes[0] == 0x18);
  }
  SUBCASE("k=1: one bit per symbol, eight symbols per byte") {
    const fta::FtaCode code{1, 8, {1, 0, 1, 1, 0, 0, 1, 1}};
    const fta::PackedCode packed = fta::pack(code);
    CHECK(packed.bit_count == 8);
    REQUIRE(packed.bytes.size() == 1);
    CHECK(packed.bytes[0] == 0xb3);  // 0b10110011
  }
  SUBCASE("k=7: three-bit fields spill across byte boundaries") {
    const fta::FtaCode code{7, 3, {7, 0, 5}};
    const fta::PackedCode packed = fta::pack(code);
    CHECK(packed.bit_count == 9);
    REQUIRE(packed.bytes.size() == 2);
    // 111 000 101 + seven zero padding bits.
    CHECK(packed.bytes[0] == 0xe2);  // 0b11100010
    CHECK(packed.bytes[1] == 0x80);  // 0b10000000
  }
  SUBCASE("byte count is ceil(p*bits/8) across sizes") {
    for (std::uint32_t k : {1u, 2u, 3u, 7u}) {
      for (std::uint32_t p : {1u, 100u, 1000u}) {
        fta::FtaCode code{k, p, std::vector<std::uint8_t>(p, 0)};
        const fta::PackedCode packed = fta::pack(code);
        const std::uint64_t bits =
            static_cast<std::uint64_t>(p) * fta::symbol_bits(k);
        CHECK(packed.bit_count == bits);
        CHECK(packed.bytes.size() == (bits + 7) / 8);
      }
    }
  }
  SUBCASE("out-of-range symbols are rejected") {
    CHECK_THROWS_WITH(fta::pack(fta::FtaCode{2, 1, {3}}),
                      doctest::Contains("out of range"));
    CHECK_THROWS_WITH(fta::pack(fta::FtaCode{2, 3, {0, 1}}),
                      doctest::Contains("does not match p"));
  }
}

TEST_CASE("unpack inverts pack and rejects corrupted buffers") {
  fta::DetRng rng(314);
  for (std::uint32_t k = 1; k <= 8; ++k) {
    for (std::uint32_t p : {1u, 7u, 64u, 333u}) {
      fta::FtaCode code;
      code.k = k;
      code.p = p;
      code.symbols.resize(p);
      for (auto& s : code.symbols) {
        s = static_cast<std::uint8_t>(rng.below(k + 1));
      }
      const fta::PackedCode packed = fta::pack(code);
      CHECK(fta::unpack(packed.bytes, k, p) == code);
    }
  }

  const fta::PackedCode packed = fta::pack(fta::FtaCode{2, 3, {0, 1, 2}});
  SUBCASE("wrong buffer length") {
    std::vector<std::uint8_t> longer = packed.bytes;
    longer.push_back(0);
    CHECK_THROWS_WITH(fta::unpack(longer, 2, 3),
                      doctest::Contains("does not match p*bits"));
    CHECK_THROWS_WITH(fta::unpack({}, 2, 3),
                      doctest::Contains("does not match p*bits"));
  }
  SUBCASE("nonzero padding bits") {
    std::vector<std::uint8_t> dirty = packed.bytes;
    dirty[0] |= 0x02;  // flips a bit past the last field
    CHECK_THROWS_WITH(fta::unpack(dirty, 2, 3),
                      doctest::Contains("padding"));
  }
  SUBCASE("field decoding to an out-of-range symbol") {
    // 0b11000000: first two-bit field reads 3, but k=2 caps symbols at 2.
    CHECK_THROWS_WITH(fta::unpack({0xc0}, 2, 1),
                      doctest::Contains("out of range"));
  }
}

TEST_CASE("fingerprint pins down every defining field of a spec") {
  const fta::ProjectionBank bank = fta::make_bank(11, 16, 8, 1.0);
  const fta::HashSpec spec =
      fta::make_hash_spec(bank, 2, 32, 0.4, fta::Mode::peak, 77);
  const std::uint64_t fp = fta::spec_fingerprint(spec);

  // Rebuilding from the same arguments reproduces the fingerprint.
  CHECK(fta::spec_fingerprint(fta::make_hash_spec(
            fta::make_bank(11, 16, 8, 1.0), 2, 32, 0.4, fta::Mode::peak,
            77)) == fp);

  auto differs = [&](const fta::HashSpec& other) {
    return fta::spec_fingerprint(other) != fp;
  };
  CHECK(differs(fta::make_hash_spec(bank, 2, 32, 0.5, fta::Mode::peak, 77)));
  CHECK(differs(
      fta::make_hash_spec(bank, 2, 32, 0.4, fta::Mode::thresholding, 77)));
  CHECK(differs(fta::make_hash_spec(bank, 2, 32, 0.4, fta::Mode::peak, 78)));
  CHECK(differs(fta::make_hash_spec(bank, 3, 32, 0.4, fta::Mode::peak, 77)));
  CHECK(differs(fta::make_hash_spec(bank, 2, 31, 0.4, fta::Mode::peak, 77)));
  CHECK(differs(fta::make_hash_spec(fta::make_bank(12, 16, 8, 1.0), 2, 32,
                                    0.4, fta::Mode::peak, 77)));
}
