#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fta/rng.hpp"
#include "fta/synthetic.hpp"
#include "fta/types.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace {

fta::Matrix constant_frames(int d, int n, double value) {
  return fta::Matrix::Constant(d, n, value);
}

}  // namespace

TEST_CASE("make_video validates its input") {
  CHECK_NOTHROW(fta::make_video(constant_frames(3, 4, 1.0)));
  CHECK_THROWS_WITH(fta::make_video(fta::Matrix(3, 0)),
                    doctest::Contains("at least one frame"));
  fta::Matrix bad = constant_frames(2, 2, 0.0);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_WITH(fta::make_video(bad), doctest::Contains("non-finite"));
  bad(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH(fta::make_video(bad), doctest::Contains("non-finite"));
}

TEST_CASE("video accessors expose shape and frames") {
  fta::Matrix frames(2, 3);
  frames << 1, 2, 3, 4, 5, 6;
  const fta::VideoSequence v = fta::make_video(frames, 1, "clip");
  CHECK(v.dim() == 2);
  CHECK(v.length() == 3);
  CHECK(v.frame(1) == frames.col(1));
  CHECK(v.label == 1);
  CHECK(v.source_id == "clip");
}

TEST_CASE("split names round-trip") {
  CHECK(fta::to_string(fta::Split::train) == "train");
  CHECK(fta::to_string(fta::Split::test) == "test");
  CHECK(fta::to_string(fta::Split::none) == "none");
  CHECK(fta::split_from_string("train") == fta::Split::train);
  CHECK(fta::split_from_string("test") == fta::Split::test);
  CHECK(fta::split_from_string("none") == fta::Split::none);
  CHECK_THROWS_WITH(fta::split_from_string("validation"),
                    doctest::Contains("unknown split"));
}

TEST_CASE("validate_dataset catches structural problems") {
  fta::Dataset data;
  data.class_names = {"a", "b"};
  data.sequences.push_back(fta::make_video(constant_frames(4, 3, 1.0), 0, "v0"));
  data.sequences.push_back(fta::make_video(constant_frames(4, 5, 2.0), 1, "v1"));
  data.split_tags = {fta::Split::train, fta::Split::test};
  CHECK_NOTHROW(fta::validate_dataset(data));

  fta::Dataset short_tags = data;
  short_tags.split_tags.pop_back();
  CHECK_THROWS_WITH(fta::validate_dataset(short_tags),
                    doctest::Contains("not parallel"));

  fta::Dataset bad_label = data;
  bad_label.sequences[1].label = 5;
  CHECK_THROWS_WITH(fta::validate_dataset(bad_label),
                    doctest::Contains("label outside"));

  fta::Dataset mixed_dims = data;
  mixed_dims.sequences[1] = fta::make_video(constant_frames(3, 5, 2.0), 1, "v1");
  CHECK_THROWS_WITH(fta::validate_dataset(mixed_dims),
                    doctest::Contains("dimension"));
}

TEST_CASE("indices_of and subset select by split tag") {
  fta::Dataset data;
  data.class_names = {"a"};
  for (int i = 0; i < 4; ++i) {
    data.sequences.push_back(
        fta::make_video(constant_frames(2, 2, i), 0, "v" + std::to_string(i)));
  }
  data.split_tags = {fta::Split::train, fta::Split::test, fta::Split::train,
                     fta::Split::test};

  CHECK(data.indices_of(fta::Split::train) == std::vector<std::size_t>{0, 2});
  CHECK(data.indices_of(fta::Split::none).empty());

  const fta::Dataset sub = fta::subset(data, fta::Split::train);
  REQUIRE(sub.sequences.size() == 2);
  CHECK(sub.sequences[0].source_id == "v0");
  CHECK(sub.sequences[1].source_id == "v2");
  CHECK(sub.class_names == data.class_names);
}

TEST_CASE("posture prototypes are unit norm and well separated") {
  const fta::Matrix protos = fta::posture_prototypes(42, 16, 5);
  REQUIRE(protos.rows() == 16);
  REQUIRE(protos.cols() == 5);
  for (int j = 0; j < protos.cols(); ++j) {
    CHECK(protos.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int a = 0; a < protos.cols(); ++a) {
    for (int b = a + 1; b < protos.cols(); ++b) {
      CHECK(std::abs(protos.col(a).dot(protos.col(b))) <= 0.99);
    }
  }
  // Deterministic in the seed.
  CHECK(protos == fta::posture_prototypes(42, 16, 5));
  CHECK(protos != fta::posture_prototypes(43, 16, 5));
}

TEST_CASE("prototype drawing fails loudly when separation is impossible") {
  // Dimension 1 admits only two unit vectors (+1 and -1), which are not
  // separable under the |cos| <= 0.99 rule, so three prototypes cannot exist.
  CHECK_THROWS_WITH(fta::posture_prototypes(1, 1, 3),
                    doctest::Contains("distinguishable"));
}

TEST_CASE("make_synthetic lays out posture blocks in order") {
  fta::SynthSpec spec;
  spec.seed = 11;
  spec.d = 8;
  spec.num_postures = 3;
  spec.posture_order = {2, 0, 1};
  spec.frames_per_posture = 4;
  spec.noise_sigma = 0.0;

  const fta::VideoSequence video = fta::make_synthetic(spec);
  REQUIRE(video.length() == 12);
  CHECK(video.source_id == "synth:order-2-0-1");

  const fta::Matrix protos = fta::posture_prototypes(spec.seed, spec.d, 3);
  for (int block = 0; block < 3; ++block) {
    const auto posture = spec.posture_order[static_cast<std::size_t>(block)];
    for (int i = 0; i < 4; ++i) {
      CHECK(video.frames.col(block * 4 + i) == protos.col(posture));
    }
  }
}

TEST_CASE("make_synthetic rejects malformed recipes") {
  fta::SynthSpec spec;
  spec.d = 4;
  spec.num_postures = 2;
  spec.posture_order = {0, 1};

  fta::SynthSpec empty = spec;
  empty.posture_order.clear();
  CHECK_THROWS_WITH(fta::make_synthetic(empty),
                    doctest::Contains("empty posture order"));

  fta::SynthSpec out_of_range = spec;
  out_of_range.posture_order = {0, 2};
  CHECK_THROWS_WITH(fta::make_synthetic(out_of_range),
                    doctest::Contains("out of range"));

  fta::SynthSpec negative_noise = spec;
  negative_noise.noise_sigma = -0.5;
  CHECK_THROWS_WITH(fta::make_synthetic(negative_noise),
                    doctest::Contains("negative noise"));
}

TEST_CASE("synthetic noise is keyed to posture occurrence, not position") {
  fta::SynthSpec forward;
  forward.seed = 9;
  forward.d = 6;
  forward.num_postures = 2;
  forward.posture_order = {0, 1};
  forward.frames_per_posture = 3;
  forward.noise_sigma = 0.2;

  fta::SynthSpec reversed = forward;
  reversed.posture_order = {1, 0};

  const fta::VideoSequence a = fta::make_synthetic(forward);
  const fta::VideoSequence b = fta::make_synthetic(reversed);
  // Reversing the order permutes whole blocks: the posture-0 block of the
  // forward sequence reappears verbatim at the end of the reversed one.
  CHECK(a.frames.leftCols(3) == b.frames.rightCols(3));
  CHECK(a.frames.rightCols(3) == b.frames.leftCols(3));
  CHECK(a.frames != b.frames);
}

TEST_CASE("transforms behave as advertised") {
  fta::SynthSpec spec;
  spec.seed = 3;
  spec.d = 5;
  spec.num_postures = 2;
  spec.posture_order = {0, 1};
  spec.frames_per_posture = 2;
  spec.noise_sigma = 0.1;
  const fta::VideoSequence base = fta::make_synthetic(spec);

  SUBCASE("translate pads zero frames around the content") {
    const fta::VideoSequence moved = fta::transform_translate(base, 2, 3);
    REQUIRE(moved.length() == base.length() + 5);
    CHECK(moved.frames.leftCols(2).isZero(0.0));
    CHECK(moved.frames.rightCols(3).isZero(0.0));
    CHECK(moved.frames.middleCols(2, base.length()) == base.frames);
    CHECK_THROWS_WITH(fta::transform_translate(base, -1, 0),
                      doctest::Contains("negative padding"));
  }

  SUBCASE("scale multiplies every entry") {
    const fta::VideoSequence scaled = fta::transform_scale(base, 2.5);
    CHECK(scaled.frames == (base.frames * 2.5).eval());
    CHECK_THROWS_WITH(fta::transform_scale(base, 0.0),
                      doctest::Contains("positive"));
    CHECK_THROWS_WITH(fta::transform_scale(base, -2.0),
                      doctest::Contains("positive"));
  }

  SUBCASE("rate repeats each frame in place") {
    const fta::VideoSequence slowed = fta::transform_rate(base, 3);
    REQUIRE(slowed.length() == base.length() * 3);
    for (fta::Index i = 0; i < base.length(); ++i) {
      for (fta::Index r = 0; r < 3; ++r) {
        CHECK(slowed.frames.col(3 * i + r) == base.frames.col(i));
      }
    }
    CHECK_THROWS_WITH(fta::transform_rate(base, 0),
                      doctest::Contains(">= 1"));
  }
}

TEST_CASE("make_synthetic_dataset produces a labeled two-split corpus") {
  fta::SynthDatasetSpec spec;
  spec.seed = 21;
  spec.d = 8;
  spec.num_postures = 2;
  spec.class_orders = {{0, 1}, {1, 0}};
  spec.fpp_choices = {4, 6};
  spec.noise_sigma = 0.05;
  spec.train_per_class = 3;
  spec.test_per_class = 2;
  spec.pad_max = 4;

  const fta::Dataset data = fta::make_synthetic_dataset(spec);
  CHECK_NOTHROW(fta::validate_dataset(data));
  REQUIRE(data.class_names.size() == 2);
  CHECK(data.class_names[0] == "order-0-1");
  CHECK(data.class_names[1] == "order-1-0");
  CHECK(data.size() == 10);
  CHECK(data.indices_of(fta::Split::train).size() == 6);
  CHECK(data.indices_of(fta::Split::test).size() == 4);
  for (std::size_t i : data.indices_of(fta::Split::train)) {
    CHECK(i < 6);  // train rows come first
  }
  for (const fta::VideoSequence& v : data.sequences) {
    REQUIRE(v.label.has_value());
  }

  // Deterministic in the seed.
  const fta::Dataset again = fta::make_synthetic_dataset(spec);
  REQUIRE(again.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(data.sequences[i].frames == again.sequences[i].frames);
    CHECK(data.sequences[i].label == again.sequences[i].label);
    CHECK(data.split_tags[i] == again.split_tags[i]);
  }

  // Varying lengths: frames-per-posture and padding differ across sequences.
  bool lengths_vary = false;
  for (std::size_t i = 1; i < data.size(); ++i) {
    if (data.sequences[i].length() != data.sequences[0].length()) {
      lengths_vary = true;
    }
  }
  CHECK(lengths_vary);
}

TEST_CASE("make_synthetic_dataset rejects empty recipes") {
  fta::SynthDatasetSpec spec;
  spec.class_orders = {};
  CHECK_THROWS_WITH(fta::make_synthetic_dataset(spec),
                    doctest::Contains("no class orders"));
  spec.class_orders = {{0}};
  spec.num_postures = 1;
  spec.fpp_choices = {};
  CHECK_THROWS_WITH(fta::make_synthetic_dataset(spec),
                    doctest::Contains("frames-per-posture"));
}
