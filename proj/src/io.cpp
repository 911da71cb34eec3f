#include "fta/io.hpp"

#include "fta/features.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace fta {

namespace {

using nlohmann::json;

constexpr std::uint32_t kSpecFormatVersion = 1;
constexpr std::uint32_t kReportFormatVersion = 1;
constexpr std::uint32_t kCodeDbFormatVersion = 1;
constexpr std::uint32_t kCacheFormatVersion = 1;
constexpr char kCodeDbMagic[8] = {'F', 'T', 'A', 'C', 'O', 'D', 'E', 'S'};
constexpr char kCacheMagic[8] = {'F', 'T', 'A', 'D', 'S', 'E', 'T', '\0'};

/// Rows per frame in the plain-text skeleton format.
constexpr Index kMsrJointCount = 20;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string() + ": " +
                  std::strerror(errno));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw IoError("cannot read " + path.string());
  }
  return std::move(buffer).str();
}

json parse_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw IoError(path.string() + ": not valid JSON");
  }
  return doc;
}

// --- canonical JSON emission ----------------------------------------------
//
// Documents are written by hand instead of through a library dump so the
// byte stream is fully pinned: keys in sorted order, floats always printed
// with 17 significant digits (enough to round-trip any double), no locale
// involvement. Identical inputs therefore produce identical files on any
// machine, which the determinism checks rely on.

std::string json_escape(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

/// One pre-rendered JSON value; emit() joins them under sorted keys.
using JsonFields = std::map<std::string, std::string>;

std::string emit_object(const JsonFields& fields, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  std::string out = "{\n";
  bool first = true;
  for (const auto& [key, value] : fields) {
    if (!first) out += ",\n";
    first = false;
    out += pad + json_escape(key) + ": " + value;
  }
  out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
  return out;
}

std::string emit_real_array(const std::vector<Real>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_real(values[i]);
  }
  return out + "]";
}

// --- little-endian binary helpers -----------------------------------------

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out += static_cast<char>((v >> (8 * i)) & 0xffu);
  }
}

void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out += static_cast<char>((v >> (8 * i)) & 0xffu);
  }
}

void append_i32(std::string& out, std::int32_t v) {
  append_u32(out, static_cast<std::uint32_t>(v));
}

void append_f64(std::string& out, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(bits));
  append_u64(out, bits);
}

void append_string(std::string& out, const std::string& s) {
  append_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

/// Bounds-checked cursor over a byte buffer; every short read reports the
/// file as truncated.
class BinaryReader {
 public:
  BinaryReader(std::string bytes, std::string origin)
      : bytes_(std::move(bytes)), origin_(std::move(origin)) {}

  void read_raw(void* dst, std::size_t size) {
    if (pos_ + size > bytes_.size()) {
      throw IoError(origin_ + ": truncated file");
    }
    std::memcpy(dst, bytes_.data() + pos_, size);
    pos_ += size;
  }

  std::uint32_t read_u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(next_byte()) << (8 * i);
    }
    return v;
  }

  std::uint64_t read_u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(next_byte()) << (8 * i);
    }
    return v;
  }

  std::int32_t read_i32() { return static_cast<std::int32_t>(read_u32()); }

  double read_f64() {
    const std::uint64_t bits = read_u64();
    double v = 0;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  std::string read_string() {
    const std::uint32_t size = read_u32();
    if (pos_ + size > bytes_.size()) {
      throw IoError(origin_ + ": truncated file");
    }
    std::string s = bytes_.substr(pos_, size);
    pos_ += size;
    return s;
  }

  void expect_end() {
    if (pos_ != bytes_.size()) {
      throw IoError(origin_ + ": trailing bytes after payload");
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  std::uint8_t next_byte() {
    if (pos_ >= bytes_.size()) {
      throw IoError(origin_ + ": truncated file");
    }
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::string bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

// --- json field extraction -------------------------------------------------

const json& require_field(const json& doc, const std::string& key,
                          const std::string& origin) {
  const auto it = doc.find(key);
  if (it == doc.end()) {
    throw IoError(origin + ": missing field '" + key + "'");
  }
  return *it;
}

std::uint32_t require_u32(const json& doc, const std::string& key,
                          const std::string& origin) {
  const json& field = require_field(doc, key, origin);
  if (!field.is_number_unsigned()) {
    throw IoError(origin + ": field '" + key +
                  "' must be a non-negative integer");
  }
  return field.get<std::uint32_t>();
}

Real require_real(const json& doc, const std::string& key,
                  const std::string& origin) {
  const json& field = require_field(doc, key, origin);
  if (!field.is_number()) {
    throw IoError(origin + ": field '" + key + "' must be a number");
  }
  return field.get<Real>();
}

std::string require_string(const json& doc, const std::string& key,
                           const std::string& origin) {
  const json& field = require_field(doc, key, origin);
  if (!field.is_string()) {
    throw IoError(origin + ": field '" + key + "' must be a string");
  }
  return field.get<std::string>();
}

std::uint64_t require_hex(const json& doc, const std::string& key,
                          const std::string& origin) {
  const std::string text = require_string(doc, key, origin);
  try {
    return from_hex(text);
  } catch (const std::exception& e) {
    throw IoError(origin + ": field '" + key + "': " + e.what());
  }
}

void require_version(const json& doc, std::uint32_t expected,
                     const std::string& origin) {
  const std::uint32_t version = require_u32(doc, "format_version", origin);
  if (version != expected) {
    throw IoError(origin + ": unsupported format version " +
                  std::to_string(version) + " (expected " +
                  std::to_string(expected) + ")");
  }
}

}  // namespace

// --- shared helpers ----------------------------------------------------

std::string format_real(Real value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string to_hex(std::uint64_t value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t from_hex(const std::string& text) {
  if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
    throw std::invalid_argument("'" + text + "' is not a 0x-prefixed hex value");
  }
  std::uint64_t value = 0;
  if (text.size() > 18) {
    throw std::invalid_argument("'" + text + "' exceeds 64 bits");
  }
  for (std::size_t i = 2; i < text.size(); ++i) {
    const char c = text[i];
    std::uint64_t digit = 0;
    if (c >= '0' && c <= '9') {
      digit = static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      digit = static_cast<std::uint64_t>(c - 'a') + 10;
    } else if (c >= 'A' && c <= 'F') {
      digit = static_cast<std::uint64_t>(c - 'A') + 10;
    } else {
      throw std::invalid_argument("'" + text + "' is not a hex value");
    }
    value = (value << 4) | digit;
  }
  return value;
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing: " +
                    std::strerror(errno));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out.good()) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place: " +
                  ec.message());
  }
}

// --- skeleton text files ----------------------------------------------

SkeletonSequence load_msr_skeleton(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::array<double, 4>> rows;
  std::istringstream lines(text);
  std::string line;
  for (std::size_t line_no = 1; std::getline(lines, line); ++line_no) {
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size() || errno != 0) {
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": non-numeric token '" + token + "'");
      }
      values.push_back(v);
    }
    if (values.empty()) continue;  // blank line
    if (values.size() != 4) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": expected 4 values per row (x y z confidence), got " +
                    std::to_string(values.size()));
    }
    rows.push_back({values[0], values[1], values[2], values[3]});
  }
  if (rows.empty()) {
    throw IoError(path.string() + ": no frames");
  }
  if (rows.size() % static_cast<std::size_t>(kMsrJointCount) != 0) {
    throw IoError(path.string() + ": row count " +
                  std::to_string(rows.size()) + " is not a multiple of " +
                  std::to_string(kMsrJointCount) + " rows per frame");
  }
  const Index n =
      static_cast<Index>(rows.size()) / kMsrJointCount;
  Matrix joints(3 * kMsrJointCount, n);
  Matrix confidence(kMsrJointCount, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < kMsrJointCount; ++j) {
      const auto& row =
          rows[static_cast<std::size_t>(i * kMsrJointCount + j)];
      joints(3 * j + 0, i) = row[0];
      joints(3 * j + 1, i) = row[1];
      joints(3 * j + 2, i) = row[2];
      confidence(j, i) = row[3];
    }
  }
  return make_skeleton_sequence(kMsrJointCount, std::move(joints),
                                std::move(confidence), path.string());
}

// --- manifests ---------------------------------------------------------

Manifest load_manifest(const std::filesystem::path& path) {
  const json doc = parse_json(path);
  const std::string origin = path.string();
  if (!doc.is_object()) {
    throw IoError(origin + ": manifest must be a JSON object");
  }
  Manifest manifest;
  const json& names = require_field(doc, "class_names", origin);
  if (!names.is_array() || names.empty()) {
    throw IoError(origin + ": class_names must be a non-empty array");
  }
  for (const json& name : names) {
    if (!name.is_string()) {
      throw IoError(origin + ": class_names entries must be strings");
    }
    manifest.class_names.push_back(name.get<std::string>());
  }
  manifest.feature = require_string(doc, "feature", origin);
  manifest.topology =
      doc.contains("topology") ? require_string(doc, "topology", origin)
                               : "msr20";
  if (doc.contains("joint_permutation")) {
    const json& perm = doc["joint_permutation"];
    if (!perm.is_array()) {
      throw IoError(origin + ": joint_permutation must be an array");
    }
    for (const json& v : perm) {
      if (!v.is_number_unsigned()) {
        throw IoError(origin +
                      ": joint_permutation entries must be joint indices");
      }
      manifest.joint_permutation.push_back(v.get<Index>());
    }
  }
  const json& records = require_field(doc, "records", origin);
  if (!records.is_array() || records.empty()) {
    throw IoError(origin + ": records must be a non-empty array");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const json& rec = records[i];
    const std::string rec_origin = origin + ": record " + std::to_string(i);
    if (!rec.is_object()) {
      throw IoError(rec_origin + ": must be a JSON object");
    }
    ManifestRecord out;
    out.file = require_string(rec, "file", rec_origin);
    out.label = require_string(rec, "label", rec_origin);
    if (rec.contains("subject")) {
      if (!rec["subject"].is_number_integer()) {
        throw IoError(rec_origin + ": subject must be an integer");
      }
      out.subject = rec["subject"].get<std::int32_t>();
    }
    if (rec.contains("split")) {
      try {
        out.split = split_from_string(require_string(rec, "split", rec_origin));
      } catch (const std::invalid_argument& e) {
        throw IoError(rec_origin + ": " + e.what());
      }
    }
    manifest.records.push_back(std::move(out));
  }
  return manifest;
}

namespace {

SkeletonSequence permute_joints(const SkeletonSequence& s,
                                const std::vector<Index>& perm,
                                const std::string& origin) {
  if (perm.empty()) return s;
  if (static_cast<Index>(perm.size()) != s.joint_count) {
    throw IoError(origin + ": joint_permutation has " +
                  std::to_string(perm.size()) + " entries for " +
                  std::to_string(s.joint_count) + " joints");
  }
  std::vector<bool> seen(perm.size(), false);
  for (Index source : perm) {
    if (source < 0 || source >= s.joint_count ||
        seen[static_cast<std::size_t>(source)]) {
      throw IoError(origin + ": joint_permutation is not a permutation");
    }
    seen[static_cast<std::size_t>(source)] = true;
  }
  Matrix joints(s.joints.rows(), s.joints.cols());
  Matrix confidence = s.confidence;
  for (Index j = 0; j < s.joint_count; ++j) {
    const Index source = perm[static_cast<std::size_t>(j)];
    joints.middleRows(3 * j, 3) = s.joints.middleRows(3 * source, 3);
    if (confidence.size() != 0) {
      confidence.row(j) = s.confidence.row(source);
    }
  }
  return SkeletonSequence{s.joint_count, std::move(joints),
                          std::move(confidence), s.source_id};
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& manifest_path,
                     const std::string& feature_override) {
  Manifest manifest = load_manifest(manifest_path);
  if (!feature_override.empty()) manifest.feature = feature_override;
  const SkeletonTopology topo = topology_preset(manifest.topology);
  const std::filesystem::path base = manifest_path.parent_path();

  Dataset data;
  data.class_names = manifest.class_names;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const ManifestRecord& rec = manifest.records[i];
    const std::string origin =
        manifest_path.string() + ": record " + std::to_string(i);
    const auto label_it = std::find(data.class_names.begin(),
                                    data.class_names.end(), rec.label);
    if (label_it == data.class_names.end()) {
      throw IoError(origin + ": unknown label '" + rec.label + "'");
    }
    std::filesystem::path file = rec.file;
    if (file.is_relative()) file = base / file;
    SkeletonSequence skeleton = load_msr_skeleton(file);
    skeleton = permute_joints(skeleton, manifest.joint_permutation, origin);
    VideoSequence v;
    try {
      v = extract_feature(manifest.feature, skeleton, topo);
    } catch (const std::invalid_argument& e) {
      throw IoError(origin + ": " + e.what());
    }
    v.label = static_cast<std::int32_t>(
        std::distance(data.class_names.begin(), label_it));
    data.sequences.push_back(std::move(v));
    data.split_tags.push_back(rec.split);
  }
  try {
    validate_dataset(data);
  } catch (const std::invalid_argument& e) {
    throw IoError(manifest_path.string() + ": " + e.what());
  }
  return data;
}

// --- feature dataset cache -------------------------------------------------

void save_dataset_cache(const Dataset& data, const std::filesystem::path& path,
                        const std::string& feature) {
  validate_dataset(data);
  std::string out;
  out.append(kCacheMagic, sizeof(kCacheMagic));
  append_u32(out, kCacheFormatVersion);
  append_string(out, feature);
  append_u32(out, static_cast<std::uint32_t>(data.class_names.size()));
  for (const std::string& name : data.class_names) {
    append_string(out, name);
  }
  append_u64(out, static_cast<std::uint64_t>(data.dim()));
  append_u64(out, data.sequences.size());
  for (std::size_t i = 0; i < data.sequences.size(); ++i) {
    const VideoSequence& v = data.sequences[i];
    append_u64(out, static_cast<std::uint64_t>(v.length()));
    append_i32(out, v.label ? *v.label : -1);
    out += static_cast<char>(data.split_tags[i]);
    append_string(out, v.source_id);
    for (Index col = 0; col < v.length(); ++col) {
      for (Index row = 0; row < v.dim(); ++row) {
        append_f64(out, v.frames(row, col));
      }
    }
  }
  atomic_write(path, out);
}

Dataset load_dataset_cache(const std::filesystem::path& path,
                           std::string* feature_name) {
  BinaryReader in(read_file(path), path.string());
  char magic[sizeof(kCacheMagic)];
  in.read_raw(magic, sizeof(magic));
  if (std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw IoError(path.string() + ": not a dataset cache file");
  }
  const std::uint32_t version = in.read_u32();
  if (version != kCacheFormatVersion) {
    throw IoError(path.string() + ": unsupported format version " +
                  std::to_string(version));
  }
  const std::string feature = in.read_string();
  if (feature_name) *feature_name = feature;
  Dataset data;
  const std::uint32_t class_count = in.read_u32();
  for (std::uint32_t i = 0; i < class_count; ++i) {
    data.class_names.push_back(in.read_string());
  }
  const auto d = static_cast<Index>(in.read_u64());
  const std::uint64_t count = in.read_u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto n = static_cast<Index>(in.read_u64());
    const std::int32_t label = in.read_i32();
    char tag = 0;
    in.read_raw(&tag, 1);
    if (tag > 2) {
      throw IoError(path.string() + ": bad split tag");
    }
    std::string source_id = in.read_string();
    if (d < 1 || n < 1) {
      throw IoError(path.string() + ": empty sequence in cache");
    }
    Matrix frames(d, n);
    for (Index col = 0; col < n; ++col) {
      for (Index row = 0; row < d; ++row) {
        frames(row, col) = in.read_f64();
      }
    }
    VideoSequence v{std::move(frames),
                    label < 0 ? std::nullopt
                              : std::optional<std::int32_t>(label),
                    std::move(source_id)};
    data.sequences.push_back(std::move(v));
    data.split_tags.push_back(static_cast<Split>(tag));
  }
  in.expect_end();
  try {
    validate_dataset(data);
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return data;
}

// --- hash spec files ---------------------------------------------------------

void save_hash_spec(const HashSpec& spec, const std::filesystem::path& path) {
  JsonFields fields;
  fields["format_version"] = std::to_string(kSpecFormatVersion);
  fields["bank_seed"] = json_escape(to_hex(spec.bank.seed));
  fields["d"] = std::to_string(spec.bank.d);
  fields["fingerprint"] = json_escape(to_hex(spec_fingerprint(spec)));
  fields["k"] = std::to_string(spec.k);
  fields["m"] = std::to_string(spec.bank.m);
  fields["mode"] = json_escape(to_string(spec.mode));
  fields["p"] = std::to_string(spec.p);
  fields["selection_seed"] = json_escape(to_hex(spec.selection_seed));
  fields["sigma"] = format_real(spec.bank.sigma);
  fields["theta"] = format_real(spec.theta);
  std::string groups = "[";
  for (std::uint32_t w = 0; w < spec.p; ++w) {
    if (w > 0) groups += ", ";
    groups += "[";
    for (std::uint32_t j = 0; j < spec.k; ++j) {
      if (j > 0) groups += ", ";
      groups +=
          std::to_string(spec.groups[static_cast<std::size_t>(w) * spec.k + j]);
    }
    groups += "]";
  }
  groups += "]";
  fields["groups"] = groups;
  atomic_write(path, emit_object(fields, 0) + "\n");
}

HashSpec load_hash_spec(const std::filesystem::path& path) {
  const json doc = parse_json(path);
  const std::string origin = path.string();
  if (!doc.is_object()) {
    throw IoError(origin + ": hash spec must be a JSON object");
  }
  require_version(doc, kSpecFormatVersion, origin);
  const std::uint32_t m = require_u32(doc, "m", origin);
  const auto d = static_cast<Index>(require_u32(doc, "d", origin));
  const std::uint32_t k = require_u32(doc, "k", origin);
  const std::uint32_t p = require_u32(doc, "p", origin);
  const Real sigma = require_real(doc, "sigma", origin);
  const Real theta = require_real(doc, "theta", origin);
  const std::uint64_t bank_seed = require_hex(doc, "bank_seed", origin);
  const std::uint64_t selection_seed =
      require_hex(doc, "selection_seed", origin);
  const std::uint64_t fingerprint = require_hex(doc, "fingerprint", origin);
  Mode mode = Mode::peak;
  try {
    mode = mode_from_string(require_string(doc, "mode", origin));
  } catch (const std::invalid_argument& e) {
    throw IoError(origin + ": " + e.what());
  }

  HashSpec spec;
  try {
    spec = make_hash_spec(make_bank(bank_seed, m, d, sigma), k, p, theta,
                          mode, selection_seed);
  } catch (const std::invalid_argument& e) {
    throw IoError(origin + ": " + e.what());
  }
  if (mode != Mode::bow && spec.k != k) {
    throw IoError(origin + ": stored k does not survive regeneration");
  }

  // The group list is stored for inspection but the selection seed is the
  // source of truth; a file whose list disagrees with its seed is corrupt.
  if (doc.contains("groups")) {
    const json& groups = doc["groups"];
    if (!groups.is_array() || groups.size() != spec.p) {
      throw IoError(origin + ": groups must be an array of p groups");
    }
    for (std::uint32_t w = 0; w < spec.p; ++w) {
      const json& group = groups[w];
      if (!group.is_array() || group.size() != spec.k) {
        throw IoError(origin + ": group " + std::to_string(w) +
                      " must have k entries");
      }
      for (std::uint32_t j = 0; j < spec.k; ++j) {
        if (!group[j].is_number_unsigned() ||
            group[j].get<std::uint32_t>() !=
                spec.groups[static_cast<std::size_t>(w) * spec.k + j]) {
          throw IoError(origin + ": group " + std::to_string(w) +
                        " does not match the selection seed");
        }
      }
    }
  }

  const std::uint64_t regenerated = spec_fingerprint(spec);
  if (regenerated != fingerprint) {
    throw IoError(origin + ": fingerprint mismatch (file " +
                  to_hex(fingerprint) + ", regenerated " +
                  to_hex(regenerated) + ")");
  }
  return spec;
}

// --- code databases ----------------------------------------------------------

void save_code_db(const CodeDatabase& db, const std::filesystem::path& path) {
  std::string out;
  out.append(kCodeDbMagic, sizeof(kCodeDbMagic));
  append_u32(out, kCodeDbFormatVersion);
  append_u32(out, db.k);
  append_u32(out, db.p);
  append_u64(out, db.codes.size());
  append_u64(out, db.fingerprint);
  for (const FtaCode& code : db.codes) {
    const PackedCode packed = pack(code);
    out.append(reinterpret_cast<const char*>(packed.bytes.data()),
               packed.bytes.size());
  }
  for (std::int32_t label : db.labels) {
    append_i32(out, label);
  }
  append_u32(out, static_cast<std::uint32_t>(db.class_names.size()));
  for (const std::string& name : db.class_names) {
    append_string(out, name);
  }
  atomic_write(path, out);
}

CodeDatabase load_code_db(const std::filesystem::path& path) {
  BinaryReader in(read_file(path), path.string());
  char magic[sizeof(kCodeDbMagic)];
  in.read_raw(magic, sizeof(magic));
  if (std::memcmp(magic, kCodeDbMagic, sizeof(magic)) != 0) {
    throw IoError(path.string() + ": not a code database file");
  }
  const std::uint32_t version = in.read_u32();
  if (version != kCodeDbFormatVersion) {
    throw IoError(path.string() + ": unsupported format version " +
                  std::to_string(version));
  }
  CodeDatabase db;
  db.k = in.read_u32();
  db.p = in.read_u32();
  const std::uint64_t count = in.read_u64();
  db.fingerprint = in.read_u64();
  if (db.k < 1 || db.p < 1) {
    throw IoError(path.string() + ": bad code shape in header");
  }
  const std::size_t record_bytes =
      (static_cast<std::size_t>(db.p) * symbol_bits(db.k) + 7) / 8;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::vector<std::uint8_t> bytes(record_bytes);
    in.read_raw(bytes.data(), bytes.size());
    try {
      db.codes.push_back(unpack(bytes, db.k, db.p));
    } catch (const std::invalid_argument& e) {
      throw IoError(path.string() + ": record " + std::to_string(i) + ": " +
                    e.what());
    }
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    db.labels.push_back(in.read_i32());
  }
  const std::uint32_t name_count = in.read_u32();
  for (std::uint32_t i = 0; i < name_count; ++i) {
    db.class_names.push_back(in.read_string());
  }
  in.expect_end();
  return db;
}

// --- evaluation reports ------------------------------------------------

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  JsonFields config;
  config["feature"] = json_escape(report.config.feature);
  config["k"] = std::to_string(report.config.k);
  config["knn_K"] = std::to_string(report.config.knn_K);
  config["m"] = std::to_string(report.config.m);
  config["master_seed"] = json_escape(to_hex(report.config.master_seed));
  config["mode"] = json_escape(to_string(report.config.mode));
  config["p"] = std::to_string(report.config.p);
  config["runs"] = std::to_string(report.config.runs);
  config["sigma"] = format_real(report.config.sigma);
  config["theta"] = report.config.theta ? format_real(*report.config.theta)
                                        : json_escape("auto");

  JsonFields fields;
  fields["chosen_theta"] = format_real(report.chosen_theta);
  fields["config"] = emit_object(config, 2);
  fields["format_version"] = std::to_string(kReportFormatVersion);
  fields["mean"] = format_real(report.mean);
  fields["per_run_accuracy"] = emit_real_array(report.per_run_accuracy);
  fields["per_run_theta"] = emit_real_array(report.per_run_theta);
  fields["std_dev"] = format_real(report.std_dev);
  atomic_write(path, emit_object(fields, 0) + "\n");
}

EvalReport load_report(const std::filesystem::path& path) {
  const json doc = parse_json(path);
  const std::string origin = path.string();
  if (!doc.is_object()) {
    throw IoError(origin + ": report must be a JSON object");
  }
  require_version(doc, kReportFormatVersion, origin);
  EvalReport report;
  report.chosen_theta = require_real(doc, "chosen_theta", origin);
  report.mean = require_real(doc, "mean", origin);
  report.std_dev = require_real(doc, "std_dev", origin);
  for (const char* key : {"per_run_accuracy", "per_run_theta"}) {
    const json& arr = require_field(doc, key, origin);
    if (!arr.is_array()) {
      throw IoError(origin + ": " + key + " must be an array");
    }
    auto& dst = std::string(key) == "per_run_accuracy"
                    ? report.per_run_accuracy
                    : report.per_run_theta;
    for (const json& v : arr) {
      if (!v.is_number()) {
        throw IoError(origin + ": " + key + " entries must be numbers");
      }
      dst.push_back(v.get<Real>());
    }
  }
  const json& config = require_field(doc, "config", origin);
  if (!config.is_object()) {
    throw IoError(origin + ": config must be a JSON object");
  }
  report.config.feature = require_string(config, "feature", origin);
  report.config.k = require_u32(config, "k", origin);
  report.config.knn_K = require_u32(config, "knn_K", origin);
  report.config.m = require_u32(config, "m", origin);
  report.config.master_seed = require_hex(config, "master_seed", origin);
  try {
    report.config.mode =
        mode_from_string(require_string(config, "mode", origin));
  } catch (const std::invalid_argument& e) {
    throw IoError(origin + ": " + e.what());
  }
  report.config.p = require_u32(config, "p", origin);
  report.config.runs = require_u32(config, "runs", origin);
  report.config.sigma = require_real(config, "sigma", origin);
  const json& theta = require_field(config, "theta", origin);
  if (theta.is_string()) {
    if (theta.get<std::string>() != "auto") {
      throw IoError(origin + ": theta must be a number or \"auto\"");
    }
    report.config.theta = std::nullopt;
  } else if (theta.is_number()) {
    report.config.theta = theta.get<Real>();
  } else {
    throw IoError(origin + ": theta must be a number or \"auto\"");
  }
  return report;
}

void save_sweep_csv(const std::vector<EvalReport>& reports, SweepAxis axis,
                    const std::vector<Real>& values,
                    const std::filesystem::path& path) {
  if (reports.size() != values.size()) {
    throw std::invalid_argument(
        "save_sweep_csv: values not parallel to reports");
  }
  std::string out = to_string(axis) + ",mean,std\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out += format_real(values[i]) + "," + format_real(reports[i].mean) + "," +
           format_real(reports[i].std_dev) + "\n";
  }
  atomic_write(path, out);
}

}  // namespace fta
