#include "fta/skeleton.hpp"

#include <stdexcept>
#include <vector>

namespace fta {

SkeletonSequence make_skeleton_sequence(Index joint_count, Matrix joints,
                                        Matrix confidence,
                                        std::string source_id) {
  if (joint_count < 1) {
    throw std::invalid_argument("make_skeleton_sequence: need >= 1 joint");
  }
  if (joints.rows() != 3 * joint_count) {
    throw std::invalid_argument(
        "make_skeleton_sequence: joints matrix must have 3 rows per joint");
  }
  if (joints.cols() < 1) {
    throw std::invalid_argument("make_skeleton_sequence: need >= 1 frame");
  }
  if (!joints.allFinite()) {
    throw std::invalid_argument(
        "make_skeleton_sequence: non-finite joint coordinate");
  }
  if (confidence.size() != 0 && (confidence.rows() != joint_count ||
                                 confidence.cols() != joints.cols())) {
    throw std::invalid_argument(
        "make_skeleton_sequence: confidence must be joints x frames or empty");
  }
  return SkeletonSequence{joint_count, std::move(joints),
                          std::move(confidence), std::move(source_id)};
}

void validate_topology(const SkeletonTopology& topo) {
  if (topo.joint_count < 1) {
    throw std::invalid_argument("validate_topology: need >= 1 joint");
  }
  if (static_cast<Index>(topo.bones.size()) != topo.joint_count - 1) {
    throw std::invalid_argument(
        "validate_topology: a tree over J joints has J-1 bones");
  }
  // Union-find over the bones; J-1 edges + no cycle == connected tree.
  std::vector<Index> parent(static_cast<std::size_t>(topo.joint_count));
  for (std::size_t i = 0; i < parent.size(); ++i) {
    parent[i] = static_cast<Index>(i);
  }
  const auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      x = parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(
              parent[static_cast<std::size_t>(x)])];
    }
    return x;
  };
  for (const auto& [a, b] : topo.bones) {
    if (a < 0 || b < 0 || a >= topo.joint_count || b >= topo.joint_count) {
      throw std::invalid_argument("validate_topology: bone joint out of range");
    }
    if (a == b) {
      throw std::invalid_argument("validate_topology: bone joins a joint to "
                                  "itself");
    }
    const Index ra = find(a);
    const Index rb = find(b);
    if (ra == rb) {
      throw std::invalid_argument("validate_topology: bones contain a cycle");
    }
    parent[static_cast<std::size_t>(ra)] = rb;
  }
  const auto& [ra, rb] = topo.reference_pair;
  if (ra < 0 || rb < 0 || ra >= topo.joint_count || rb >= topo.joint_count ||
      ra == rb) {
    throw std::invalid_argument(
        "validate_topology: reference pair must be two distinct joints");
  }
}

SkeletonTopology msr20_topology() {
  SkeletonTopology topo;
  topo.joint_count = 20;
  topo.bones = {
      {0, 1},   {1, 2},   {2, 3},              // hip center, spine, head
      {2, 4},   {4, 5},   {5, 6},   {6, 7},    // left arm
      {2, 8},   {8, 9},   {9, 10},  {10, 11},  // right arm
      {0, 12},  {12, 13}, {13, 14}, {14, 15},  // left leg
      {0, 16},  {16, 17}, {17, 18}, {18, 19},  // right leg
  };
  topo.reference_pair = {0, 1};  // hip center <-> spine
  validate_topology(topo);
  return topo;
}

SkeletonTopology topology_preset(const std::string& name) {
  if (name == "msr20") return msr20_topology();
  throw std::invalid_argument("topology_preset: unknown preset '" + name +
                              "'");
}

}  // namespace fta
