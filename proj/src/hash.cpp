#include "fta/hash.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace fta {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::peak: return "peak";
    case Mode::thresholding: return "threshold";
    case Mode::bow: return "bow";
  }
  throw std::invalid_argument("to_string: bad mode value");
}

Mode mode_from_string(const std::string& name) {
  if (name == "peak") return Mode::peak;
  if (name == "threshold" || name == "thresholding") return Mode::thresholding;
  if (name == "bow") return Mode::bow;
  throw std::invalid_argument("mode_from_string: unknown mode '" + name + "'");
}

FirstActTable first_act(const ScoreMatrix& scores, Real theta, Mode mode) {
  switch (mode) {
    case Mode::peak: return first_act_peak(scores, theta);
    case Mode::thresholding: return first_act_threshold(scores, theta);
    case Mode::bow: break;
  }
  throw std::invalid_argument(
      "first_act: bow mode has no first-act times; use encode_bow");
}

std::vector<std::uint32_t> sample_groups(std::uint64_t seed, std::uint32_t m,
                                         std::uint32_t k, std::uint32_t p) {
  if (m < 1 || k < 1 || p < 1 || k > m) {
    throw std::invalid_argument("sample_groups: need 1 <= k <= m and p >= 1");
  }
  DetRng rng(mix_seed(seed, kStreamGroups));
  std::vector<std::uint32_t> groups(static_cast<std::size_t>(p) * k);
  for (std::uint32_t w = 0; w < p; ++w) {
    std::uint32_t* group = groups.data() + static_cast<std::size_t>(w) * k;
    for (std::uint32_t j = 0; j < k; ++j) {
      // Rejection keeps every group a set of k distinct indices while the
      // draws stay uniform; groups are drawn independently of each other.
      for (;;) {
        const auto candidate = static_cast<std::uint32_t>(rng.below(m));
        bool fresh = true;
        for (std::uint32_t prev = 0; prev < j; ++prev) {
          if (group[prev] == candidate) {
            fresh = false;
            break;
          }
        }
        if (fresh) {
          group[j] = candidate;
          break;
        }
      }
    }
  }
  return groups;
}

HashSpec make_hash_spec(ProjectionBank bank, std::uint32_t k, std::uint32_t p,
                        Real theta, Mode mode, std::uint64_t selection_seed) {
  if (mode == Mode::bow) {
    k = 1;  // existence bits: one posture per symbol, no within-group race
  } else if (k < 2) {
    throw std::invalid_argument(
        "make_hash_spec: ordered modes need k >= 2 (a singleton group carries "
        "no order information)");
  }
  if (k > bank.m) {
    throw std::invalid_argument("make_hash_spec: k exceeds bank size");
  }
  if (p < 1) {
    throw std::invalid_argument("make_hash_spec: need p >= 1");
  }
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("make_hash_spec: theta must be finite");
  }
  HashSpec spec;
  spec.bank = std::move(bank);
  spec.k = k;
  spec.p = p;
  spec.theta = theta;
  spec.mode = mode;
  spec.selection_seed = selection_seed;
  spec.groups = sample_groups(selection_seed, spec.bank.m, k, p);
  return spec;
}

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
}

void fnv_u64(std::uint64_t& h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
}

void fnv_real(std::uint64_t& h, Real value) {
  std::uint64_t bits = 0;
  static_assert(sizeof(bits) == sizeof(value));
  std::memcpy(&bits, &value, sizeof(bits));
  fnv_u64(h, bits);
}

}  // namespace

std::uint64_t spec_fingerprint(const HashSpec& spec) {
  // FNV-1a over a fixed serialization of every defining field. The bank
  // matrix itself is covered through (seed, m, d, sigma), which regenerate
  // it bit-identically.
  std::uint64_t h = 14695981039346656037ull;
  fnv_bytes(h, "fta-spec-v1", 11);
  fnv_u64(h, spec.bank.seed);
  fnv_u64(h, spec.bank.m);
  fnv_u64(h, static_cast<std::uint64_t>(spec.bank.d));
  fnv_real(h, spec.bank.sigma);
  fnv_u64(h, spec.k);
  fnv_u64(h, spec.p);
  fnv_real(h, spec.theta);
  fnv_u64(h, static_cast<std::uint64_t>(spec.mode));
  fnv_u64(h, spec.selection_seed);
  for (std::uint32_t g : spec.groups) fnv_u64(h, g);
  return h;
}

bool operator==(const FtaCode& a, const FtaCode& b) {
  return a.k == b.k && a.p == b.p && a.symbols == b.symbols;
}

FtaCode encode(const HashSpec& spec, const FirstActTable& table) {
  if (table.times.size() != spec.bank.m) {
    throw std::invalid_argument(
        "encode: first-act table does not cover the bank");
  }
  FtaCode code;
  code.k = spec.k;
  code.p = spec.p;
  code.symbols.resize(spec.p);
  for (std::uint32_t w = 0; w < spec.p; ++w) {
    const std::uint32_t* group =
        spec.groups.data() + static_cast<std::size_t>(w) * spec.k;
    FrameTime best_time = kNever;
    std::uint8_t best = 0;  // stays 0 when the whole group never acts
    for (std::uint32_t j = 0; j < spec.k; ++j) {
      const FrameTime t = table.times[group[j]];
      // Strict < keeps the smallest within-group index on equal times. The
      // selects compile to branch-free code: which detector wins is
      // unpredictable by design and would stall a branchy race.
      const bool wins = t < best_time;
      best_time = wins ? t : best_time;
      best = wins ? static_cast<std::uint8_t>(j + 1) : best;
    }
    code.symbols[w] = best;
  }
  return code;
}

FtaCode encode_bow(const HashSpec& spec, const ScoreMatrix& scores) {
  if (spec.mode != Mode::bow) {
    throw std::invalid_argument("encode_bow: spec is not in bow mode");
  }
  if (scores.rows() != static_cast<Index>(spec.bank.m)) {
    throw std::invalid_argument("encode_bow: score matrix does not match bank");
  }
  FtaCode code;
  code.k = spec.k;
  code.p = spec.p;
  code.symbols.resize(spec.p);
  for (std::uint32_t w = 0; w < spec.p; ++w) {
    const std::uint32_t row = spec.groups[w];  // bow groups are singletons
    code.symbols[w] =
        scores.row(static_cast<Index>(row)).maxCoeff() >= spec.theta ? 1 : 0;
  }
  return code;
}

FtaCode hash_scores(const HashSpec& spec, const ScoreMatrix& scores) {
  if (spec.mode == Mode::bow) {
    return encode_bow(spec, scores);
  }
  return encode(spec, first_act(scores, spec.theta, spec.mode));
}

FtaCode hash(const HashSpec& spec, const VideoSequence& v) {
  return hash_scores(spec, score(spec.bank, v));
}

std::uint32_t symbol_bits(std::uint32_t k) {
  if (k < 1) {
    throw std::invalid_argument("symbol_bits: need k >= 1");
  }
  // Symbols range over 0..k: ceil(log2(k+1)) bits, which is bit_width(k).
  return static_cast<std::uint32_t>(std::bit_width(k));
}

PackedCode pack(const FtaCode& code) {
  const std::uint32_t width = symbol_bits(code.k);
  if (code.symbols.size() != code.p) {
    throw std::invalid_argument("pack: symbol count does not match p");
  }
  PackedCode packed;
  packed.k = code.k;
  packed.p = code.p;
  packed.bit_count = static_cast<std::uint64_t>(code.p) * width;
  packed.bytes.assign((packed.bit_count + 7) / 8, 0);
  std::uint64_t cursor = 0;
  for (std::uint8_t symbol : code.symbols) {
    if (symbol > code.k) {
      throw std::invalid_argument("pack: symbol out of range");
    }
    // MSB-first within each fixed-width field and within each byte.
    for (std::uint32_t b = width; b-- > 0; ++cursor) {
      if ((symbol >> b) & 1u) {
        packed.bytes[cursor / 8] |=
            static_cast<std::uint8_t>(1u << (7 - cursor % 8));
      }
    }
  }
  return packed;
}

FtaCode unpack(const std::vector<std::uint8_t>& bytes, std::uint32_t k,
               std::uint32_t p) {
  if (p < 1) {
    throw std::invalid_argument("unpack: need p >= 1");
  }
  const std::uint32_t width = symbol_bits(k);
  const std::uint64_t bit_count = static_cast<std::uint64_t>(p) * width;
  if (bytes.size() != (bit_count + 7) / 8) {
    throw std::invalid_argument("unpack: byte length does not match p*bits");
  }
  FtaCode code;
  code.k = k;
  code.p = p;
  code.symbols.resize(p);
  std::uint64_t cursor = 0;
  for (std::uint32_t w = 0; w < p; ++w) {
    std::uint32_t symbol = 0;
    for (std::uint32_t b = 0; b < width; ++b, ++cursor) {
      symbol = (symbol << 1) |
               ((bytes[cursor / 8] >> (7 - cursor % 8)) & 1u);
    }
    if (symbol > k) {
      throw std::invalid_argument("unpack: symbol out of range");
    }
    code.symbols[w] = static_cast<std::uint8_t>(symbol);
  }
  // Trailing padding must be zero; anything else signals corruption.
  for (; cursor < bytes.size() * 8; ++cursor) {
    if ((bytes[cursor / 8] >> (7 - cursor % 8)) & 1u) {
      throw std::invalid_argument("unpack: nonzero padding bits");
    }
  }
  return code;
}

}  // namespace fta
