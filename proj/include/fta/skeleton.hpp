#pragma once

#include "fta/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fta {

/// A sequence of J-joint skeletons. Joint positions are stacked per frame:
/// column i holds (x0,y0,z0, x1,y1,z1, ...) of frame i, so the matrix is
/// (3*J) x n. Confidence is J x n when present, 0 x 0 otherwise.
struct SkeletonSequence {
  Index joint_count = 0;
  Matrix joints;
  Matrix confidence;
  std::string source_id;

  Index length() const { return joints.cols(); }
  Eigen::Vector3d joint(Index frame, Index j) const {
    return joints.block<3, 1>(3 * j, frame);
  }
};

SkeletonSequence make_skeleton_sequence(Index joint_count, Matrix joints,
                                        Matrix confidence = {},
                                        std::string source_id = {});

/// Bone structure over the joints: (parent, child) index pairs forming a
/// connected tree, plus the joint pair whose distance serves as the
/// per-frame normalization length.
struct SkeletonTopology {
  Index joint_count = 0;
  std::vector<std::pair<Index, Index>> bones;
  std::pair<Index, Index> reference_pair{0, 0};
};

/// Throws std::invalid_argument unless bones form a connected tree over
/// joint_count joints and the reference pair is two distinct valid joints.
void validate_topology(const SkeletonTopology& topo);

/// The 20-joint layout of MSR-format skeleton files (Kinect SDK v1 order:
/// hip center, spine, shoulder center, head, then left arm, right arm, left
/// leg, right leg). 19 bones; reference pair hip center <-> spine.
SkeletonTopology msr20_topology();

/// Looks up a topology preset by name ("msr20"). Throws on unknown names.
SkeletonTopology topology_preset(const std::string& name);

}  // namespace fta
