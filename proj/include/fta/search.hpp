#pragma once

#include "fta/hash.hpp"
#include "fta/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fta {

/// Immutable store of hashed sequences with their class labels. The
/// fingerprint pins the exact hash spec that produced the codes, so queries
/// hashed under a different spec are rejected instead of silently compared.
struct CodeDatabase {
  std::uint32_t k = 0;
  std::uint32_t p = 0;
  std::uint64_t fingerprint = 0;
  std::vector<FtaCode> codes;
  std::vector<std::int32_t> labels;       // parallel to codes
  std::vector<std::string> class_names;   // label -> display name; may be empty
  std::size_t size() const { return codes.size(); }
};

CodeDatabase make_code_database(const HashSpec& spec,
                                std::vector<FtaCode> codes,
                                std::vector<std::int32_t> labels,
                                std::vector<std::string> class_names = {});

/// Number of symbol positions where the two codes differ. Symbol-wise on
/// purpose: bitwise distance on the packed form would weight symbol pairs
/// unevenly (e.g. symbols 1 vs 2 pack as 01 vs 10 — two bit flips for one
/// disagreement). Throws on (k, p) mismatch.
std::uint32_t hamming(const FtaCode& a, const FtaCode& b);

/// Bit flips between the packed forms — kept only for ablation against the
/// canonical symbol-wise distance. Equals hamming() when k = 1.
std::uint32_t hamming_packed_bits(const FtaCode& a, const FtaCode& b);

/// One scored database entry.
struct Neighbor {
  std::size_t index = 0;       // position in the database
  std::uint32_t distance = 0;  // symbol-wise Hamming
  std::int32_t label = 0;
};

/// The K nearest entries by exhaustive scan, sorted by (distance, index) —
/// equal distances keep database order.
std::vector<Neighbor> nearest(const CodeDatabase& db, const FtaCode& query,
                              std::uint32_t K);

/// Majority label among the K nearest. Vote ties go to the candidate with
/// the smaller summed distance, then to the one appearing earliest in the
/// database. Throws on an empty database, K = 0, or a query whose (k, p)
/// does not match.
std::int32_t knn_classify(const CodeDatabase& db, const FtaCode& query,
                          std::uint32_t K);

}  // namespace fta
