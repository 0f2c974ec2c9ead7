// Copyright 2026 The vippipe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "vippipe/random.hpp"
#include "vippipe/transforms.hpp"

using namespace vippipe;

namespace {

Box box(double x0, double y0, double x1, double y1, int label = 0) {
  Box b;
  b.label = label;
  b.xmin = x0;
  b.ymin = y0;
  b.xmax = x1;
  b.ymax = y1;
  return b;
}

void check_box(const std::optional<Box>& got, const Box& want) {
  REQUIRE(got);
  CHECK(got->xmin == doctest::Approx(want.xmin).epsilon(1e-12));
  CHECK(got->ymin == doctest::Approx(want.ymin).epsilon(1e-12));
  CHECK(got->xmax == doctest::Approx(want.xmax).epsilon(1e-12));
  CHECK(got->ymax == doctest::Approx(want.ymax).epsilon(1e-12));
}

Frame noise(Rng& rng, int h, int w, int c) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(h * w * c));
  for (auto& v : data) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return Frame(h, w, c, std::move(data));
}

}  // namespace

TEST_CASE("centre crop origin uses floor") {
  TransformConfig cfg;
  cfg.crop_shape = Shape{112, 112};
  cfg.crop_type = CropType::Center;
  const SampledParams p = sample_params(cfg, {128, 171}, 0, 0);
  CHECK(p.crop_x == 29);
  CHECK(p.crop_y == 8);
  cfg.crop_shape = Shape{130, 112};
  CHECK_ERRC(sample_params(cfg, {128, 171}, 0, 0), Errc::InfeasibleCrop);
}

TEST_CASE("sampled parameters depend only on seed and clip id") {
  TransformConfig cfg;
  cfg.resize_shape = Shape{40, 50};
  cfg.crop_shape = Shape{30, 30};
  cfg.crop_type = CropType::Random;
  cfg.flip_probability = 0.5;
  cfg.rotation_degrees = 10;
  int flips = 0;
  for (std::uint64_t id = 0; id < 200; ++id) {
    const auto p = sample_params(cfg, {100, 100}, 5, id);
    CHECK(p == sample_params(cfg, {100, 100}, 5, id));
    CHECK(p.crop_x >= 0);
    CHECK(p.crop_x <= 20);
    CHECK(p.crop_y <= 10);
    CHECK(std::abs(p.rotation) <= 10);
    flips += p.flip_applied;
  }
  CHECK(flips > 60);
  CHECK(flips < 140);
  cfg.flip_probability = 0;
  for (std::uint64_t id = 0; id < 50; ++id) CHECK_FALSE(sample_params(cfg, {100, 100}, 5, id).flip_applied);
}

TEST_CASE("point maps") {
  const Point r = transform_point({10, 10}, ResizeStep{{200, 200}}, {100, 100});
  CHECK(r.x == 20);
  CHECK(r.y == 20);
  const Point f = transform_point({0, 7}, FlipStep{}, {50, 100});
  CHECK(f.x == 100);
  CHECK(f.y == 7);
  const Point q = transform_point({10, 10}, RotateStep{90}, {100, 100});
  CHECK(q.x == doctest::Approx(10).epsilon(1e-12));
  CHECK(q.y == doctest::Approx(90).epsilon(1e-12));
  const Point c = transform_point({35, 12}, CropStep{30, 10, {20, 20}}, {100, 100});
  CHECK(c.x == 5);
  CHECK(c.y == 2);
}

TEST_CASE("box maps") {
  check_box(transform_box(box(10, 20, 30, 40), FlipStep{}, {112, 112}), box(82, 20, 102, 40));
  check_box(transform_box(box(25, 5, 50, 30), CropStep{30, 10, {112, 112}}, {200, 200}), box(0, 0, 20, 20));
  // Entirely outside the crop: dropped.
  CHECK_FALSE(transform_box(box(0, 0, 20, 20), CropStep{30, 10, {50, 50}}, {200, 200}));
  // Sliver smaller than one square pixel after clamping: dropped.
  CHECK_FALSE(transform_box(box(29.5, 10, 30.5, 11.5), CropStep{30, 10, {50, 50}}, {200, 200}));
}

TEST_CASE("flip is an involution on pixels and boxes") {
  Rng rng(1);
  const Frame f = noise(rng, 7, 9, 3);
  CHECK(apply_step(apply_step(f, FlipStep{}), FlipStep{}) == f);
  const Box b = box(1.25, 2, 7.5, 6);
  const auto once = transform_box(b, FlipStep{}, {7, 9});
  CHECK(*transform_box(*once, FlipStep{}, {7, 9}) == b);
  // Off-grid input still round-trips once it has passed through any step.
  const auto scaled = transform_box(box(0.1, 0.3, 6.7, 5.9), ResizeStep{{13, 11}}, {7, 9});
  REQUIRE(scaled);
  CHECK(*transform_box(*transform_box(*scaled, FlipStep{}, {13, 11}), FlipStep{}, {13, 11}) == *scaled);
}

TEST_CASE("identity config leaves clip and annotations alone") {
  Rng rng(2);
  const Clip clip({noise(rng, 6, 8, 3), noise(rng, 6, 8, 3)});
  AnnotationSet ann = AnnotationSet::empty(2);
  ann.frames[0] = make_frame_annotations({box(1, 1, 4, 5)}, {{2, 2, true}});
  const auto [out, out_ann] = apply_clip(clip, ann, TransformConfig{}, SampledParams{});
  CHECK(out == clip);
  CHECK(out_ann == ann);
}

TEST_CASE("clip is transformed consistently across frames") {
  Rng rng(3);
  const Frame f = noise(rng, 30, 40, 3);
  const Clip clip({f, f, f, f});
  TransformConfig cfg;
  cfg.resize_shape = Shape{24, 36};
  cfg.crop_shape = Shape{20, 20};
  cfg.crop_type = CropType::Random;
  cfg.flip_probability = 0.5;
  cfg.rotation_degrees = 20;
  cfg.final_shape = Shape{16, 16};
  for (std::uint64_t id = 0; id < 10; ++id) {
    const auto params = sample_params(cfg, {30, 40}, 9, id);
    const auto [out, ann] = apply_clip(clip, AnnotationSet::empty(4), cfg, params);
    CHECK(out.height() == 16);
    CHECK(out.width() == 16);
    for (const Frame& g : out.frames) CHECK(g == out.frames[0]);
  }
}

TEST_CASE("stepwise application equals the composed pipeline") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Clip clip({noise(rng, 30, 40, 3), noise(rng, 30, 40, 3)});
    AnnotationSet ann = AnnotationSet::empty(2);
    ann.frames[0] = make_frame_annotations({box(3, 4, 20, 25), box(30, 2, 39, 9)}, {{10, 10, true}, {1, 1, true}});
    ann.frames[1] = make_frame_annotations({box(5, 5, 15, 15)});
    TransformConfig cfg;
    cfg.resize_shape = Shape{36, 48};
    cfg.crop_shape = Shape{28, 30};
    cfg.crop_type = CropType::Random;
    cfg.flip_probability = 0.5;
    cfg.rotation_degrees = 25;
    cfg.subtract_mean = {100, 110, 120};
    cfg.final_shape = Shape{20, 20};
    const auto params = sample_params(cfg, {30, 40}, 1, static_cast<std::uint64_t>(trial));
    const auto [whole, whole_ann] = apply_clip(clip, ann, cfg, params);
    Clip c = clip;
    AnnotationSet a = ann;
    for (const auto& step : build_steps(cfg, params, {30, 40})) std::tie(c, a) = apply_step(c, a, step);
    CHECK(c == whole);
    CHECK(a == whole_ann);
    CHECK(whole.frames[0].is_float());
  }
}

TEST_CASE("dropped boxes are recorded and word labels follow survivors") {
  AnnotationSet ann = AnnotationSet::empty(1);
  ann.frames[0] = make_frame_annotations({box(0, 0, 5, 5, 1), box(20, 20, 30, 30, 2)}, {{2, 2, true}, {25, 25, true}});
  ann.frames[0].word_labels = std::vector<WordLabel>{{7, 0}, {8, 1}};
  const Clip clip({Frame::zeros_u8(40, 40, 3)});
  const auto [out, out_ann] = apply_step(clip, ann, TransformStep{CropStep{10, 10, {25, 25}}});
  const auto& fa = out_ann.frames[0];
  REQUIRE(fa.boxes.size() == 1);
  CHECK(fa.boxes[0].label == 2);
  CHECK(fa.box_ids == std::vector<int>{1});
  CHECK(fa.dropped_boxes == std::vector<int>{0});
  REQUIRE(fa.word_labels);
  REQUIRE(fa.word_labels->size() == 1);
  CHECK((*fa.word_labels)[0] == WordLabel{8, 0});
  CHECK_FALSE(fa.keypoints[0].visible);
  CHECK(fa.keypoints[1].visible);
  const Json j = annotations_to_json(out_ann);
  CHECK(j["frames"][0]["dropped_boxes"] == Json::array({0}));
}

TEST_CASE("maps move with the pixels") {
  Rng rng(5);
  Frame fix = Frame::zeros_u8(20, 30, 1);
  fix.u8()[fix.offset(4, 7, 0)] = 255;
  fix.u8()[fix.offset(15, 22, 0)] = 255;
  AnnotationSet ann = AnnotationSet::empty(1);
  ann.frames[0].fixations = fix;
  ann.frames[0].saliency = fix;
  TransformConfig cfg;
  cfg.crop_shape = Shape{16, 24};
  cfg.crop_type = CropType::Random;
  cfg.flip_probability = 1.0;
  const auto params = sample_params(cfg, {20, 30}, 3, 0);
  const auto [out, out_ann] = apply_clip(Clip({fix}), ann, cfg, params);
  CHECK(*out_ann.frames[0].fixations == out.frames[0]);
  CHECK(*out_ann.frames[0].saliency == out.frames[0]);

  AnnotationSet bad = AnnotationSet::empty(1);
  bad.frames[0].fixations = Frame::zeros_u8(5, 5, 1);
  CHECK_ERRC(apply_clip(Clip({fix}), bad, cfg, params), Errc::ShapeMismatch);
  CHECK_ERRC(apply_clip(Clip({fix}), AnnotationSet::empty(2), cfg, params), Errc::ShapeMismatch);
}

TEST_CASE("mean subtraction yields float samples") {
  const Frame f(1, 2, 3, std::vector<std::uint8_t>{10, 20, 30, 40, 50, 60});
  const Frame g = apply_step(f, SubtractMeanStep{{10, 20, 30}});
  REQUIRE(g.is_float());
  CHECK(g.f32()[0] == 0.0f);
  CHECK(g.f32()[5] == 30.0f);
  // A single mean broadcasts; any other count must match the channels.
  CHECK(apply_step(f, SubtractMeanStep{{10}}).f32()[5] == 50.0f);
  CHECK_ERRC(apply_step(f, SubtractMeanStep{{1, 2}}), Errc::ShapeMismatch);
}

TEST_CASE("per-frame adapters") {
  Rng rng(6);
  const Clip clip({noise(rng, 4, 4, 3), noise(rng, 4, 4, 3)});
  CHECK(apply_per_frame(clip, [](const Frame& f) { return f; }) == clip);
  const FrameFn invert = [](const Frame& f) {
    Frame g = f;
    for (auto& v : g.u8()) v = static_cast<std::uint8_t>(255 - v);
    return g;
  };
  CHECK(apply_per_frame(apply_per_frame(clip, invert), invert) == clip);
  const Clip zeros = apply_per_frame(clip, [](const Frame& f) { return Frame::zeros_u8(f.height(), f.width(), 3); });
  CHECK(zeros.frames[1] == Frame::zeros_u8(4, 4, 3));
  int calls = 0;
  const FrameFn diverge = [&](const Frame&) { return Frame::zeros_u8(1 + calls++, 1, 1); };
  CHECK_ERRC(apply_per_frame(clip, diverge), Errc::ShapeMismatch);
}

TEST_CASE("box transform agrees with mask rasterization (reduced)") {
  Rng rng(77);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Shape shape{static_cast<int>(rng.uniform_int(20, 60)), static_cast<int>(rng.uniform_int(20, 60))};
    // Integer corners: the source mask is then the box exactly.
    const double x0 = static_cast<double>(rng.uniform_int(0, shape.width - 6));
    const double y0 = static_cast<double>(rng.uniform_int(0, shape.height - 6));
    Box b = box(x0, y0, static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(x0) + 4, shape.width)),
                            static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(y0) + 4, shape.height)));
    std::vector<TransformStep> steps;
    if (rng.bernoulli(0.5)) steps.push_back(ResizeStep{{static_cast<int>(rng.uniform_int(15, 80)), static_cast<int>(rng.uniform_int(15, 80))}});
    Shape s = steps.empty() ? shape : output_shape(steps.back(), shape);
    if (rng.bernoulli(0.7)) {
      const Shape size{static_cast<int>(rng.uniform_int(8, s.height)), static_cast<int>(rng.uniform_int(8, s.width))};
      steps.push_back(CropStep{static_cast<int>(rng.uniform_int(0, s.width - size.width)),
                               static_cast<int>(rng.uniform_int(0, s.height - size.height)), size});
    }
    if (rng.bernoulli(0.5)) steps.push_back(FlipStep{});
    if (rng.bernoulli(0.5)) steps.push_back(RotateStep{rng.uniform(-30, 30)});

    Frame mask = oracle::rasterize(b, shape);
    std::optional<Box> analytic = b;
    Shape cur = shape;
    bool border_clipped = false;
    for (const auto& step : steps) {
      if (analytic && !oracle::keeps_corners_inside(*analytic, step, cur)) border_clipped = true;
      mask = apply_step(mask, step, Interp::Nearest);
      if (analytic) analytic = transform_box(*analytic, step, cur);
      cur = output_shape(step, cur);
    }
    const auto raster = oracle::mask_bounds(mask);
    if (border_clipped) continue;
    if (!analytic || !raster) {
      // Only slivers may disagree on existence.
      if (analytic) CHECK(std::min(analytic->width(), analytic->height()) <= 2);
      if (raster) CHECK(std::min(raster->width(), raster->height()) <= 2);
      continue;
    }
    ++compared;
    CHECK(std::abs(analytic->xmin - raster->xmin) <= 1.0);
    CHECK(std::abs(analytic->ymin - raster->ymin) <= 1.0);
    CHECK(std::abs(analytic->xmax - raster->xmax) <= 1.0);
    CHECK(std::abs(analytic->ymax - raster->ymax) <= 1.0);
  }
  CHECK(compared > 100);
}

TEST_CASE("config validation and parsing") {
  CHECK(parse_crop_type("RandomCrop") == std::nullopt);
  CHECK(parse_crop_type("random") == CropType::Random);
  CHECK(parse_crop_type("Center") == CropType::Center);
  CHECK(parse_crop_type("") == CropType::None);
  TransformConfig cfg;
  cfg.resize_shape = Shape{10, 10};
  cfg.crop_shape = Shape{12, 5};
  cfg.crop_type = CropType::Center;
  CHECK_ERRC(cfg.validate(), Errc::InvalidConfig);
  cfg.crop_shape = Shape{5, 5};
  cfg.flip_probability = 1.5;
  CHECK_ERRC(cfg.validate(), Errc::InvalidConfig);
}
