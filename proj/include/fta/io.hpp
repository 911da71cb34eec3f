#pragma once

#include "fta/eval.hpp"
#include "fta/hash.hpp"
#include "fta/search.hpp"
#include "fta/skeleton.hpp"
#include "fta/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fta {

/// Raised by every loader/saver in this header. what() carries the file and
/// the reason; parse errors include the offending line or record index.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- Skeleton text files ------------------------------------------------

/// Plain-text skeleton format: whitespace-separated rows of "x y z conf",
/// 20 rows per frame. Rejects files whose row count is not a multiple of 20,
/// non-numeric tokens (both reported with a line number), and empty files.
SkeletonSequence load_msr_skeleton(const std::filesystem::path& path);

// -- Dataset manifests ---------------------------------------------------

/// One entry of a dataset manifest.
struct ManifestRecord {
  std::string file;
  std::string label;
  std::int32_t subject = 0;
  Split split = Split::none;
};

/// JSON manifest: class_names, feature, topology, optional joint_permutation
/// (applied to every loaded skeleton before extraction), and a records list.
/// Relative record paths resolve against the manifest's directory.
struct Manifest {
  std::vector<std::string> class_names;
  std::string feature;        // pjd | jo | pa
  std::string topology;       // preset name, e.g. msr20
  std::vector<Index> joint_permutation;  // empty = identity
  std::vector<ManifestRecord> records;
};

Manifest load_manifest(const std::filesystem::path& path);

/// Loads every record's skeleton, applies the manifest's extractor, and tags
/// splits. Errors name the failing record index. A non-empty
/// `feature_override` extracts that feature instead of the manifest's.
Dataset load_dataset(const std::filesystem::path& manifest_path,
                     const std::string& feature_override = "");

// -- Feature dataset cache ------------------------------------------------

/// Binary cache of an extracted Dataset, so eval runs skip re-parsing and
/// re-extracting. Little-endian throughout; see README for the layout.
/// The cache records which feature produced it ("none" for synthetic data);
/// pass `feature_name` on load to read it back.
void save_dataset_cache(const Dataset& data, const std::filesystem::path& path,
                        const std::string& feature = "none");
Dataset load_dataset_cache(const std::filesystem::path& path,
                           std::string* feature_name = nullptr);

// -- Hash spec files --------------------------------------------------------

/// Canonical-JSON hash spec document. Stores seeds and sizes rather than the
/// bank matrix: loading regenerates bank and groups bit-identically and
/// cross-checks the stored fingerprint. The group list is also written out
/// explicitly for inspection; on load it must match the regenerated one.
void save_hash_spec(const HashSpec& spec, const std::filesystem::path& path);
HashSpec load_hash_spec(const std::filesystem::path& path);

// -- Code databases --------------------------------------------------------

/// Binary code database: fixed little-endian header (magic, version, k, p,
/// count, fingerprint), then count byte-padded packed codes, then the label
/// table and class names.
void save_code_db(const CodeDatabase& db, const std::filesystem::path& path);
CodeDatabase load_code_db(const std::filesystem::path& path);

// -- Evaluation reports ------------------------------------------------

/// EvalReport as canonical JSON: keys sorted, floats printed with 17
/// significant digits, so identical runs produce byte-identical files.
void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

/// Sweep results as a small CSV (axis value, mean, std) for plotting.
void save_sweep_csv(const std::vector<EvalReport>& reports, SweepAxis axis,
                    const std::vector<Real>& values,
                    const std::filesystem::path& path);

// -- Shared helpers -------------------------------------------------------

/// Serializes any finite double so it parses back to the identical bits.
std::string format_real(Real value);

/// u64 <-> fixed-width hex; JSON numbers cannot hold full 64-bit values.
std::string to_hex(std::uint64_t value);
std::uint64_t from_hex(const std::string& text);

/// Writes via a temp file in the same directory plus an atomic rename, so
/// readers never observe a half-written artifact.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

}  // namespace fta
