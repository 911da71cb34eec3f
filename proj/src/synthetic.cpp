#include "fta/synthetic.hpp"

#include "fta/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fta {

namespace {

Vector draw_unit_vector(DetRng& rng, Index d) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = rng.normal();
  const Real norm = v.norm();
  if (norm == 0.0) return draw_unit_vector(rng, d);  // essentially impossible
  return v / norm;
}

std::string order_name(const std::vector<std::uint32_t>& order) {
  std::string name = "order";
  for (std::uint32_t id : order) name += "-" + std::to_string(id);
  return name;
}

}  // namespace

Matrix posture_prototypes(std::uint64_t seed, Index d, std::uint32_t count) {
  if (d < 1 || count < 1) {
    throw std::invalid_argument("posture_prototypes: need d >= 1, count >= 1");
  }
  DetRng rng(mix_seed(seed, kStreamPrototypes));
  Matrix protos(d, count);
  constexpr int kMaxRedraws = 1000;
  for (std::uint32_t c = 0; c < count; ++c) {
    int attempts = 0;
    for (;;) {
      const Vector candidate = draw_unit_vector(rng, d);
      bool distinct = true;
      for (std::uint32_t prev = 0; prev < c; ++prev) {
        if (std::abs(candidate.dot(protos.col(prev))) > 0.99) {
          distinct = false;
          break;
        }
      }
      if (distinct) {
        protos.col(c) = candidate;
        break;
      }
      if (++attempts >= kMaxRedraws) {
        throw std::invalid_argument(
            "posture_prototypes: cannot draw " + std::to_string(count) +
            " distinguishable prototypes in dimension " + std::to_string(d));
      }
    }
  }
  return protos;
}

VideoSequence make_synthetic(const SynthSpec& spec) {
  if (spec.d < 1 || spec.num_postures < 1 || spec.frames_per_posture < 1) {
    throw std::invalid_argument("make_synthetic: sizes must be positive");
  }
  if (spec.posture_order.empty()) {
    throw std::invalid_argument("make_synthetic: empty posture order");
  }
  if (spec.noise_sigma < 0.0) {
    throw std::invalid_argument("make_synthetic: negative noise sigma");
  }
  for (std::uint32_t id : spec.posture_order) {
    if (id >= spec.num_postures) {
      throw std::invalid_argument("make_synthetic: posture id " +
                                  std::to_string(id) + " out of range");
    }
  }

  const Matrix protos = posture_prototypes(spec.seed, spec.d, spec.num_postures);
  const std::uint64_t noise_base =
      mix_seed(spec.noise_seed.value_or(spec.seed), kStreamNoise);

  const Index block = spec.frames_per_posture;
  Matrix frames(spec.d, static_cast<Index>(spec.posture_order.size()) * block);
  std::vector<std::uint32_t> occurrences(spec.num_postures, 0);
  for (std::size_t b = 0; b < spec.posture_order.size(); ++b) {
    const std::uint32_t id = spec.posture_order[b];
    const Index start = static_cast<Index>(b) * block;
    frames.middleCols(start, block).colwise() = protos.col(id);
    if (spec.noise_sigma > 0.0) {
      // Noise is keyed by (posture id, occurrence index), not by block
      // position: reordering the blocks permutes the frames of a sequence
      // rather than redrawing them, which keeps frame multisets comparable
      // across sequences that differ only in order.
      DetRng noise(mix_seed(mix_seed(noise_base, id), occurrences[id]));
      for (Index col = 0; col < block; ++col) {
        for (Index row = 0; row < spec.d; ++row) {
          frames(row, start + col) += spec.noise_sigma * noise.normal();
        }
      }
    }
    ++occurrences[id];
  }
  return make_video(std::move(frames), std::nullopt,
                    "synth:" + order_name(spec.posture_order));
}

VideoSequence transform_translate(const VideoSequence& v, Index pad_front,
                                  Index pad_back) {
  if (pad_front < 0 || pad_back < 0) {
    throw std::invalid_argument("transform_translate: negative padding");
  }
  Matrix padded = Matrix::Zero(v.dim(), pad_front + v.length() + pad_back);
  padded.middleCols(pad_front, v.length()) = v.frames;
  return VideoSequence{std::move(padded), v.label, v.source_id};
}

VideoSequence transform_scale(const VideoSequence& v, Real c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("transform_scale: factor must be positive");
  }
  return VideoSequence{v.frames * c, v.label, v.source_id};
}

VideoSequence transform_rate(const VideoSequence& v, std::uint32_t r) {
  if (r < 1) {
    throw std::invalid_argument("transform_rate: repetition must be >= 1");
  }
  Matrix slowed(v.dim(), v.length() * static_cast<Index>(r));
  for (Index i = 0; i < v.length(); ++i) {
    slowed.middleCols(i * static_cast<Index>(r), static_cast<Index>(r))
        .colwise() = v.frames.col(i);
  }
  return VideoSequence{std::move(slowed), v.label, v.source_id};
}

Dataset make_synthetic_dataset(const SynthDatasetSpec& spec) {
  if (spec.class_orders.empty()) {
    throw std::invalid_argument("make_synthetic_dataset: no class orders");
  }
  if (spec.fpp_choices.empty()) {
    throw std::invalid_argument(
        "make_synthetic_dataset: no frames-per-posture choices");
  }
  if (spec.pad_max < 0) {
    throw std::invalid_argument("make_synthetic_dataset: negative pad_max");
  }

  Dataset data;
  for (const auto& order : spec.class_orders) {
    data.class_names.push_back(order_name(order));
  }

  DetRng rng(mix_seed(spec.seed, kStreamDataset));
  std::uint64_t counter = 0;
  const auto add_sequence = [&](std::uint32_t cls, Split tag) {
    SynthSpec s;
    s.seed = spec.seed;  // shared across the corpus: one prototype set
    s.d = spec.d;
    s.num_postures = spec.num_postures;
    s.posture_order = spec.class_orders[cls];
    s.frames_per_posture = spec.fpp_choices[rng.below(spec.fpp_choices.size())];
    s.noise_sigma = spec.noise_sigma;
    s.noise_seed = mix_seed(mix_seed(spec.seed, kStreamNoise), counter++);
    VideoSequence v = make_synthetic(s);
    if (spec.pad_max > 0) {
      const Index front = static_cast<Index>(
          rng.below(static_cast<std::uint64_t>(spec.pad_max) + 1));
      const Index back = static_cast<Index>(
          rng.below(static_cast<std::uint64_t>(spec.pad_max) + 1));
      v = transform_translate(v, front, back);
    }
    v.label = static_cast<std::int32_t>(cls);
    data.sequences.push_back(std::move(v));
    data.split_tags.push_back(tag);
  };

  for (std::uint32_t cls = 0; cls < spec.class_orders.size(); ++cls) {
    for (std::uint32_t i = 0; i < spec.train_per_class; ++i) {
      add_sequence(cls, Split::train);
    }
  }
  for (std::uint32_t cls = 0; cls < spec.class_orders.size(); ++cls) {
    for (std::uint32_t i = 0; i < spec.test_per_class; ++i) {
      add_sequence(cls, Split::test);
    }
  }
  validate_dataset(data);
  return data;
}

}  // namespace fta
