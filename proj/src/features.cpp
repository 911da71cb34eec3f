#include "fta/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fta {

namespace {

/// Distance between the topology's reference joints on one frame, clamped
/// away from zero so degenerate frames cannot produce non-finite features.
Real reference_length(const SkeletonSequence& s, const SkeletonTopology& topo,
                      Index frame) {
  const Eigen::Vector3d a = s.joint(frame, topo.reference_pair.first);
  const Eigen::Vector3d b = s.joint(frame, topo.reference_pair.second);
  return std::max((a - b).norm(), kLengthEpsilon);
}

void require_matching_topology(const SkeletonSequence& s,
                               const SkeletonTopology& topo) {
  if (s.joint_count != topo.joint_count) {
    throw std::invalid_argument("feature extraction: sequence has " +
                                std::to_string(s.joint_count) +
                                " joints, topology expects " +
                                std::to_string(topo.joint_count));
  }
}

}  // namespace

VideoSequence extract_pjd(const SkeletonSequence& s,
                          const SkeletonTopology& topo) {
  require_matching_topology(s, topo);
  const Index J = s.joint_count;
  const Index n = s.length();
  Matrix features(J * (J - 1) / 2, n);
  for (Index i = 0; i < n; ++i) {
    const Real ref = reference_length(s, topo, i);
    Index row = 0;
    for (Index a = 0; a < J; ++a) {
      for (Index b = a + 1; b < J; ++b) {
        features(row++, i) = (s.joint(i, a) - s.joint(i, b)).norm() / ref;
      }
    }
  }
  return make_video(std::move(features), std::nullopt, s.source_id);
}

VideoSequence extract_jo(const SkeletonSequence& s,
                         const SkeletonTopology& topo) {
  require_matching_topology(s, topo);
  const Index n = s.length();
  Matrix features = Matrix::Zero(3 * s.joint_count, n);
  for (Index i = 1; i < n; ++i) {
    const Real ref = reference_length(s, topo, i);
    features.col(i) = (s.joints.col(i) - s.joints.col(i - 1)) / ref;
  }
  return make_video(std::move(features), std::nullopt, s.source_id);
}

VideoSequence extract_pa(const SkeletonSequence& s,
                         const SkeletonTopology& topo) {
  require_matching_topology(s, topo);
  const Index B = static_cast<Index>(topo.bones.size());
  if (B < 2) {
    throw std::invalid_argument(
        "extract_pa: topology needs >= 2 bones to form angle pairs");
  }
  const Index n = s.length();
  Matrix features(B * (B - 1) / 2, n);
  Matrix bones(3, B);
  Vector norms(B);
  for (Index i = 0; i < n; ++i) {
    for (Index b = 0; b < B; ++b) {
      const auto& [parent, child] = topo.bones[static_cast<std::size_t>(b)];
      bones.col(b) = s.joint(i, child) - s.joint(i, parent);
      norms[b] = bones.col(b).norm();
    }
    Index row = 0;
    for (Index a = 0; a < B; ++a) {
      for (Index b = a + 1; b < B; ++b) {
        // Bones collapsed to a point have no direction; their pairs read 0.
        features(row++, i) =
            (norms[a] < kLengthEpsilon || norms[b] < kLengthEpsilon)
                ? 0.0
                : bones.col(a).dot(bones.col(b)) / (norms[a] * norms[b]);
      }
    }
  }
  return make_video(std::move(features), std::nullopt, s.source_id);
}

VideoSequence extract_feature(const std::string& name,
                              const SkeletonSequence& s,
                              const SkeletonTopology& topo) {
  if (name == "pjd") return extract_pjd(s, topo);
  if (name == "jo") return extract_jo(s, topo);
  if (name == "pa") return extract_pa(s, topo);
  throw std::invalid_argument("extract_feature: unknown feature '" + name +
                              "'");
}

Standardizer fit_standardizer(const Dataset& train) {
  if (train.sequences.empty()) {
    throw std::invalid_argument("fit_standardizer: empty dataset");
  }
  const Index d = train.dim();
  Index total = 0;
  Vector sum = Vector::Zero(d);
  for (const VideoSequence& v : train.sequences) {
    if (v.dim() != d) {
      throw std::invalid_argument(
          "fit_standardizer: inconsistent frame dimensions");
    }
    sum += v.frames.rowwise().sum();
    total += v.length();
  }
  Standardizer st;
  st.mean = sum / static_cast<Real>(total);
  Vector sq = Vector::Zero(d);
  for (const VideoSequence& v : train.sequences) {
    sq += (v.frames.colwise() - st.mean).array().square().matrix().rowwise().sum();
  }
  st.std_dev =
      (sq / static_cast<Real>(total)).array().sqrt().max(kStdFloor).matrix();
  return st;
}

VideoSequence apply_standardizer(const Standardizer& st,
                                 const VideoSequence& v) {
  if (st.dim() != v.dim()) {
    throw std::invalid_argument(
        "apply_standardizer: dimension mismatch");
  }
  Matrix z = ((v.frames.colwise() - st.mean).array().colwise() /
              st.std_dev.array())
                 .matrix();
  return VideoSequence{std::move(z), v.label, v.source_id};
}

Dataset apply_standardizer(const Standardizer& st, const Dataset& data) {
  Dataset out;
  out.class_names = data.class_names;
  out.split_tags = data.split_tags;
  out.sequences.reserve(data.sequences.size());
  for (const VideoSequence& v : data.sequences) {
    out.sequences.push_back(apply_standardizer(st, v));
  }
  return out;
}

}  // namespace fta
