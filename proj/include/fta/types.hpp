#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fta {

using Real = double;
using Index = Eigen::Index;

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<Real>;
using Vector = VectorX<Real>;

/// One frame of a sequence: a d-dimensional feature vector.
using FrameVector = Vector;

/// A variable-length sequence of d-dimensional frames, stored one frame per
/// column (d x n). Treated as immutable after construction.
struct VideoSequence {
  Matrix frames;
  std::optional<std::int32_t> label;
  std::string source_id;

  Index dim() const { return frames.rows(); }
  Index length() const { return frames.cols(); }
  FrameVector frame(Index i) const { return frames.col(i); }
};

/// Validates and wraps a frame matrix: at least one frame, all entries
/// finite.
VideoSequence make_video(Matrix frames,
                         std::optional<std::int32_t> label = std::nullopt,
                         std::string source_id = {});

enum class Split : std::uint8_t { train = 0, test = 1, none = 2 };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

/// A labeled corpus with per-sequence train/test tags.
struct Dataset {
  std::vector<VideoSequence> sequences;
  std::vector<std::string> class_names;
  std::vector<Split> split_tags;

  Index dim() const { return sequences.empty() ? 0 : sequences.front().dim(); }
  std::size_t size() const { return sequences.size(); }
  std::vector<std::size_t> indices_of(Split s) const;
};

/// Checks the dataset invariants: tags parallel to sequences, uniform frame
/// dimension, labels within class_names. Throws std::invalid_argument.
void validate_dataset(const Dataset& data);

/// Copy of the sequences carrying the given tag, tags preserved.
Dataset subset(const Dataset& data, Split s);

}  // namespace fta
