#include "fta/types.hpp"

namespace fta {

VideoSequence make_video(Matrix frames, std::optional<std::int32_t> label,
                         std::string source_id) {
  if (frames.cols() < 1 || frames.rows() < 1) {
    throw std::invalid_argument("make_video: need at least one frame of at "
                                "least one dimension");
  }
  if (!frames.allFinite()) {
    throw std::invalid_argument("make_video: non-finite entry in frames");
  }
  return VideoSequence{std::move(frames), label, std::move(source_id)};
}

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::test: return "test";
    case Split::none: return "none";
  }
  throw std::invalid_argument("to_string: bad split value");
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  if (s == "none") return Split::none;
  throw std::invalid_argument("split_from_string: unknown split '" + s + "'");
}

std::vector<std::size_t> Dataset::indices_of(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split_tags.size(); ++i) {
    if (split_tags[i] == s) out.push_back(i);
  }
  return out;
}

void validate_dataset(const Dataset& data) {
  if (data.sequences.size() != data.split_tags.size()) {
    throw std::invalid_argument(
        "validate_dataset: split tags not parallel to sequences");
  }
  const Index d = data.dim();
  for (std::size_t i = 0; i < data.sequences.size(); ++i) {
    const VideoSequence& v = data.sequences[i];
    if (v.dim() != d) {
      throw std::invalid_argument(
          "validate_dataset: sequence " + std::to_string(i) +
          " has dimension " + std::to_string(v.dim()) + ", expected " +
          std::to_string(d));
    }
    if (v.label) {
      const auto label = *v.label;
      if (label < 0 ||
          static_cast<std::size_t>(label) >= data.class_names.size()) {
        throw std::invalid_argument("validate_dataset: sequence " +
                                    std::to_string(i) +
                                    " has label outside class_names");
      }
    }
  }
}

Dataset subset(const Dataset& data, Split s) {
  Dataset out;
  out.class_names = data.class_names;
  for (std::size_t i : data.indices_of(s)) {
    out.sequences.push_back(data.sequences[i]);
    out.split_tags.push_back(data.split_tags[i]);
  }
  return out;
}

}  // namespace fta
