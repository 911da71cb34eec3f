#include "fta/search.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace fta {

CodeDatabase make_code_database(const HashSpec& spec,
                                std::vector<FtaCode> codes,
                                std::vector<std::int32_t> labels,
                                std::vector<std::string> class_names) {
  if (codes.size() != labels.size()) {
    throw std::invalid_argument(
        "make_code_database: labels not parallel to codes");
  }
  for (const FtaCode& code : codes) {
    if (code.k != spec.k || code.p != spec.p) {
      throw std::invalid_argument(
          "make_code_database: code shape does not match the spec");
    }
  }
  CodeDatabase db;
  db.k = spec.k;
  db.p = spec.p;
  db.fingerprint = spec_fingerprint(spec);
  db.codes = std::move(codes);
  db.labels = std::move(labels);
  db.class_names = std::move(class_names);
  return db;
}

std::uint32_t hamming(const FtaCode& a, const FtaCode& b) {
  if (a.k != b.k || a.p != b.p) {
    throw std::invalid_argument("hamming: code shapes differ");
  }
  std::uint32_t distance = 0;
  for (std::uint32_t w = 0; w < a.p; ++w) {
    distance += a.symbols[w] != b.symbols[w];
  }
  return distance;
}

std::uint32_t hamming_packed_bits(const FtaCode& a, const FtaCode& b) {
  if (a.k != b.k || a.p != b.p) {
    throw std::invalid_argument("hamming_packed_bits: code shapes differ");
  }
  const PackedCode pa = pack(a);
  const PackedCode pb = pack(b);
  std::uint32_t distance = 0;
  for (std::size_t i = 0; i < pa.bytes.size(); ++i) {
    distance += static_cast<std::uint32_t>(
        std::popcount(static_cast<std::uint8_t>(pa.bytes[i] ^ pb.bytes[i])));
  }
  return distance;
}

std::vector<Neighbor> nearest(const CodeDatabase& db, const FtaCode& query,
                              std::uint32_t K) {
  if (db.codes.empty()) {
    throw std::invalid_argument("nearest: empty database");
  }
  if (K < 1) {
    throw std::invalid_argument("nearest: need K >= 1");
  }
  if (query.k != db.k || query.p != db.p) {
    throw std::invalid_argument(
        "nearest: query shape does not match the database");
  }
  std::vector<Neighbor> all(db.codes.size());
  for (std::size_t i = 0; i < db.codes.size(); ++i) {
    all[i] = Neighbor{i, hamming(db.codes[i], query), db.labels[i]};
  }
  const std::size_t take = std::min<std::size_t>(K, all.size());
  // Equal distances keep database order; index is the unique tiebreaker.
  const auto by_distance_then_index = [](const Neighbor& a,
                                         const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance
                                    : a.index < b.index;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take),
                    all.end(), by_distance_then_index);
  all.resize(take);
  return all;
}

std::int32_t knn_classify(const CodeDatabase& db, const FtaCode& query,
                          std::uint32_t K) {
  const std::vector<Neighbor> votes = nearest(db, query, K);
  struct Tally {
    std::uint32_t count = 0;
    std::uint64_t total_distance = 0;
    std::size_t first_index = 0;
  };
  std::map<std::int32_t, Tally> tallies;
  for (const Neighbor& n : votes) {
    auto [it, inserted] = tallies.try_emplace(n.label);
    Tally& t = it->second;
    if (inserted) t.first_index = n.index;
    t.count += 1;
    t.total_distance += n.distance;
    t.first_index = std::min(t.first_index, n.index);
  }
  // Most votes; ties to the smaller summed distance, then to the label whose
  // neighbor appears earliest in the database.
  const auto* best = &*tallies.begin();
  for (const auto& entry : tallies) {
    const Tally& cand = entry.second;
    const Tally& lead = best->second;
    const bool wins =
        cand.count != lead.count ? cand.count > lead.count
        : cand.total_distance != lead.total_distance
            ? cand.total_distance < lead.total_distance
            : cand.first_index < lead.first_index;
    if (wins) best = &entry;
  }
  return best->first;
}

}  // namespace fta
