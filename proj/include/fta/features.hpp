#pragma once

#include "fta/skeleton.hpp"
#include "fta/types.hpp"

namespace fta {

/// Lengths below this are treated as degenerate (coincident joints).
inline constexpr Real kLengthEpsilon = 1e-8;

/// Standard deviations are floored here so constant dimensions map to zero
/// instead of blowing up.
inline constexpr Real kStdFloor = 1e-8;

/// Pairwise-joint distances: per frame, the Euclidean distance of every
/// unordered joint pair (lexicographic pair order), divided by that frame's
/// reference length. d = J(J-1)/2.
VideoSequence extract_pjd(const SkeletonSequence& s,
                          const SkeletonTopology& topo);

/// Joint offsets: per frame, each joint's 3D displacement from the previous
/// frame divided by the current frame's reference length; the first frame is
/// all zeros so the output length matches the input. d = 3J.
VideoSequence extract_jo(const SkeletonSequence& s,
                         const SkeletonTopology& topo);

/// Pairwise bone angles: per frame, the cosine between every unordered pair
/// of bone vectors (child - parent). Bones shorter than kLengthEpsilon
/// contribute cosine 0. d = B(B-1)/2.
VideoSequence extract_pa(const SkeletonSequence& s,
                         const SkeletonTopology& topo);

/// Extractor selected by name: "pjd", "jo", "pa". Throws on unknown names.
VideoSequence extract_feature(const std::string& name,
                              const SkeletonSequence& s,
                              const SkeletonTopology& topo);

/// Per-dimension affine map fitted on training data. Immutable after fit.
struct Standardizer {
  Vector mean;
  Vector std_dev;  // floored at kStdFloor

  Index dim() const { return mean.size(); }
};

/// Z-scoring statistics over all frames of the given sequences pooled.
/// Standard deviation is the population form (divide by the frame count).
Standardizer fit_standardizer(const Dataset& train);

VideoSequence apply_standardizer(const Standardizer& st,
                                 const VideoSequence& v);
Dataset apply_standardizer(const Standardizer& st, const Dataset& data);

}  // namespace fta
