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

#include "vippipe/transforms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "vippipe/error.hpp"
#include "vippipe/random.hpp"

namespace vippipe {

namespace {

constexpr std::uint64_t kTransformStream = 0x7AA5F0;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Shape shape_of(const Frame& f) { return {f.height(), f.width()}; }

std::string shape_str(Shape s) { return std::to_string(s.height) + "x" + std::to_string(s.width); }

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

// Writes v into sample i of `out`, rounding and saturating for 8-bit frames.
void store(Frame& out, std::size_t i, double v) {
  if (out.is_float()) {
    out.f32()[i] = static_cast<float>(v);
  } else {
    out.u8()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
}

Frame blank_like(const Frame& f, Shape s) {
  return f.is_float() ? Frame::zeros_f32(s.height, s.width, f.channels())
                      : Frame::zeros_u8(s.height, s.width, f.channels());
}

Frame resize_frame(const Frame& in, Shape to, Interp interp) {
  Frame out = blank_like(in, to);
  const int ih = in.height();
  const int iw = in.width();
  const double sy = static_cast<double>(ih) / to.height;
  const double sx = static_cast<double>(iw) / to.width;
  const int ch = in.channels();
  for (int y = 0; y < to.height; ++y) {
    for (int x = 0; x < to.width; ++x) {
      if (interp == Interp::Nearest) {
        const int src_y = std::min(ih - 1, static_cast<int>(std::floor((y + 0.5) * sy)));
        const int src_x = std::min(iw - 1, static_cast<int>(std::floor((x + 0.5) * sx)));
        for (int c = 0; c < ch; ++c) store(out, out.offset(y, x, c), in.at(src_y, src_x, c));
        continue;
      }
      // Pixel centres map onto pixel centres: src = (dst + 0.5) * scale - 0.5.
      const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, ih - 1.0);
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, iw - 1.0);
      const int y0 = static_cast<int>(fy);
      const int x0 = static_cast<int>(fx);
      const int y1 = std::min(y0 + 1, ih - 1);
      const int x1 = std::min(x0 + 1, iw - 1);
      const double wy = fy - y0;
      const double wx = fx - x0;
      for (int c = 0; c < ch; ++c) {
        const double top = in.at(y0, x0, c) * (1 - wx) + in.at(y0, x1, c) * wx;
        const double bottom = in.at(y1, x0, c) * (1 - wx) + in.at(y1, x1, c) * wx;
        store(out, out.offset(y, x, c), top * (1 - wy) + bottom * wy);
      }
    }
  }
  return out;
}

Frame crop_frame(const Frame& in, const CropStep& crop) {
  if (crop.x < 0 || crop.y < 0 || crop.x + crop.size.width > in.width() || crop.y + crop.size.height > in.height())
    throw Error(Errc::InfeasibleCrop, "crop " + shape_str(crop.size) + " at (" + std::to_string(crop.x) + "," +
                                          std::to_string(crop.y) + ") exceeds frame " + shape_str(shape_of(in)));
  Frame out = blank_like(in, crop.size);
  const int ch = in.channels();
  for (int y = 0; y < crop.size.height; ++y)
    for (int x = 0; x < crop.size.width; ++x)
      for (int c = 0; c < ch; ++c) store(out, out.offset(y, x, c), in.at(y + crop.y, x + crop.x, c));
  return out;
}

Frame flip_frame(const Frame& in) {
  Frame out = blank_like(in, shape_of(in));
  const int w = in.width();
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < in.channels(); ++c) store(out, out.offset(y, x, c), in.at(y, w - 1 - x, c));
  return out;
}

Frame rotate_frame(const Frame& in, double degrees, Interp interp) {
  Frame out = blank_like(in, shape_of(in));
  const int h = in.height();
  const int w = in.width();
  const double cx = w / 2.0;
  const double cy = h / 2.0;
  const double cs = std::cos(radians(degrees));
  const double sn = std::sin(radians(degrees));
  auto tap = [&](int y, int x, int c) { return (y < 0 || x < 0 || y >= h || x >= w) ? 0.0 : in.at(y, x, c); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Inverse of the forward point map.
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      const double px = cx + cs * dx - sn * dy;
      const double py = cy + sn * dx + cs * dy;
      if (interp == Interp::Nearest) {
        const int sx = static_cast<int>(std::floor(px));
        const int sy = static_cast<int>(std::floor(py));
        for (int c = 0; c < in.channels(); ++c) store(out, out.offset(y, x, c), tap(sy, sx, c));
        continue;
      }
      const double fx = px - 0.5;
      const double fy = py - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const int y0 = static_cast<int>(std::floor(fy));
      const double wx = fx - x0;
      const double wy = fy - y0;
      for (int c = 0; c < in.channels(); ++c) {
        const double top = tap(y0, x0, c) * (1 - wx) + tap(y0, x0 + 1, c) * wx;
        const double bottom = tap(y0 + 1, x0, c) * (1 - wx) + tap(y0 + 1, x0 + 1, c) * wx;
        store(out, out.offset(y, x, c), top * (1 - wy) + bottom * wy);
      }
    }
  }
  return out;
}

Frame subtract_mean_frame(const Frame& in, const std::vector<double>& means) {
  const int ch = in.channels();
  if (means.size() != 1 && static_cast<int>(means.size()) != ch)
    throw Error(Errc::ShapeMismatch, std::to_string(means.size()) + " means for a " + std::to_string(ch) +
                                         "-channel frame");
  std::vector<float> data(in.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double mean = means.size() == 1 ? means[0] : means[i % ch];
    data[i] = static_cast<float>(in.flat(i) - mean);
  }
  return Frame(in.height(), in.width(), ch, std::move(data));
}

// Coordinates leave every geometric step on a 2^-20 px grid. On that grid
// W - x is exact, so a double flip gives back the very same numbers.
double snap(double v) {
  constexpr double kGrid = 1048576.0;
  return std::round(v * kGrid) / kGrid;
}

bool inside(Point p, Shape s) { return p.x >= 0 && p.y >= 0 && p.x <= s.width && p.y <= s.height; }

}  // namespace

std::string_view to_string(CropType type) {
  switch (type) {
    case CropType::Center: return "Center";
    case CropType::Random: return "Random";
    case CropType::None: break;
  }
  return "None";
}

std::optional<CropType> parse_crop_type(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "random") return CropType::Random;
  if (lower == "center" || lower == "centre") return CropType::Center;
  if (lower.empty() || lower == "none") return CropType::None;
  return std::nullopt;
}

void TransformConfig::validate() const {
  auto positive = [](const std::optional<Shape>& s) { return !s || (s->height > 0 && s->width > 0); };
  if (!positive(resize_shape) || !positive(crop_shape) || !positive(final_shape))
    throw Error(Errc::InvalidConfig, "shapes must be positive");
  if (resize_shape && crop_shape &&
      (crop_shape->height > resize_shape->height || crop_shape->width > resize_shape->width))
    throw Error(Errc::InvalidConfig, "crop_shape " + shape_str(*crop_shape) + " exceeds resize_shape " +
                                         shape_str(*resize_shape));
  if (crop_type != CropType::None && !crop_shape)
    throw Error(Errc::InvalidConfig, "crop_type set without crop_shape");
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0))
    throw Error(Errc::InvalidConfig, "flip_probability must lie in [0, 1]");
  if (rotation_degrees && !std::isfinite(*rotation_degrees))
    throw Error(Errc::InvalidConfig, "rotation_degrees must be finite");
}

SampledParams sample_params(const TransformConfig& cfg, Shape frame_shape, std::uint64_t seed,
                            std::uint64_t clip_id) {
  cfg.validate();
  const Shape ref = cfg.resize_shape.value_or(frame_shape);
  Rng rng(derive_seed(seed, {kTransformStream, clip_id}));
  SampledParams p;
  if (cfg.crop_type != CropType::None && cfg.crop_shape) {
    const Shape crop = *cfg.crop_shape;
    if (crop.height > ref.height || crop.width > ref.width)
      throw Error(Errc::InfeasibleCrop, "crop " + shape_str(crop) + " larger than frame " + shape_str(ref));
    if (cfg.crop_type == CropType::Center) {
      p.crop_x = (ref.width - crop.width) / 2;
      p.crop_y = (ref.height - crop.height) / 2;
    } else {
      p.crop_x = static_cast<int>(rng.uniform_int(0, ref.width - crop.width));
      p.crop_y = static_cast<int>(rng.uniform_int(0, ref.height - crop.height));
    }
  }
  p.flip_applied = cfg.flip_probability > 0.0 && rng.bernoulli(cfg.flip_probability);
  if (cfg.rotation_degrees && *cfg.rotation_degrees != 0.0)
    p.rotation = rng.uniform(-*cfg.rotation_degrees, *cfg.rotation_degrees);
  return p;
}

std::vector<TransformStep> build_steps(const TransformConfig& cfg, const SampledParams& params, Shape input) {
  std::vector<TransformStep> steps;
  Shape current = input;
  if (cfg.resize_shape) {
    steps.emplace_back(ResizeStep{*cfg.resize_shape});
    current = *cfg.resize_shape;
  }
  if (cfg.crop_type != CropType::None && cfg.crop_shape) {
    steps.emplace_back(CropStep{params.crop_x, params.crop_y, *cfg.crop_shape});
    current = *cfg.crop_shape;
  }
  if (params.flip_applied) steps.emplace_back(FlipStep{});
  if (params.rotation != 0.0) steps.emplace_back(RotateStep{params.rotation});
  if (cfg.final_shape && *cfg.final_shape != current) steps.emplace_back(ResizeStep{*cfg.final_shape});
  if (!cfg.subtract_mean.empty()) steps.emplace_back(SubtractMeanStep{cfg.subtract_mean});
  return steps;
}

Shape output_shape(const TransformStep& step, Shape input) {
  return std::visit(Overloaded{
                        [](const ResizeStep& s) { return s.to; },
                        [](const CropStep& s) { return s.size; },
                        [&](const auto&) { return input; },
                    },
                    step);
}

Point transform_point(Point p, const TransformStep& step, Shape src) {
  const Point q = std::visit(Overloaded{
                        [&](const ResizeStep& s) {
                          return Point{p.x * s.to.width / src.width, p.y * s.to.height / src.height};
                        },
                        [&](const CropStep& s) { return Point{p.x - s.x, p.y - s.y}; },
                        [&](const FlipStep&) { return Point{src.width - p.x, p.y}; },
                        [&](const RotateStep& s) {
                          const double cx = src.width / 2.0;
                          const double cy = src.height / 2.0;
                          const double cs = std::cos(radians(s.degrees));
                          const double sn = std::sin(radians(s.degrees));
                          const double dx = p.x - cx;
                          const double dy = p.y - cy;
                          return Point{cx + cs * dx + sn * dy, cy - sn * dx + cs * dy};
                        },
                        [&](const SubtractMeanStep&) { return p; },
                    },
                    step);
  return {snap(q.x), snap(q.y)};
}

std::optional<Box> transform_box(const Box& box, const TransformStep& step, Shape src) {
  // Corners in ring order, so the mapped quad stays a convex polygon.
  std::vector<Point> poly;
  for (Point c : {Point{box.xmin, box.ymin}, Point{box.xmax, box.ymin}, Point{box.xmax, box.ymax},
                  Point{box.xmin, box.ymax}})
    poly.push_back(transform_point(c, step, src));

  // Clip to the output frame before taking the hull: under rotation a corner
  // can leave the frame while the visible part is much smaller than the
  // clamped hull of all four corners.
  const Shape dst = output_shape(step, src);
  auto clip = [&poly](auto dist) {
    std::vector<Point> kept;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point a = poly[i];
      const Point b = poly[(i + 1) % poly.size()];
      const double da = dist(a);
      const double db = dist(b);
      if (da >= 0) kept.push_back(a);
      if ((da >= 0) != (db >= 0)) {
        const double t = da / (da - db);
        kept.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
      }
    }
    poly = std::move(kept);
  };
  const double w = dst.width;
  const double h = dst.height;
  clip([](Point p) { return p.x; });
  clip([w](Point p) { return w - p.x; });
  clip([](Point p) { return p.y; });
  clip([h](Point p) { return h - p.y; });
  if (poly.empty()) return std::nullopt;

  Box out = box;
  out.xmin = out.ymin = std::numeric_limits<double>::infinity();
  out.xmax = out.ymax = -std::numeric_limits<double>::infinity();
  for (Point q : poly) {
    out.xmin = std::min(out.xmin, q.x);
    out.ymin = std::min(out.ymin, q.y);
    out.xmax = std::max(out.xmax, q.x);
    out.ymax = std::max(out.ymax, q.y);
  }
  out.xmin = std::clamp(out.xmin, 0.0, w);
  out.xmax = std::clamp(out.xmax, 0.0, w);
  out.ymin = std::clamp(out.ymin, 0.0, h);
  out.ymax = std::clamp(out.ymax, 0.0, h);
  for (double* v : {&out.xmin, &out.ymin, &out.xmax, &out.ymax}) *v = snap(*v);
  if (out.width() <= 0 || out.height() <= 0 || out.area() < 1.0) return std::nullopt;
  return out;
}

Frame apply_step(const Frame& frame, const TransformStep& step, Interp interp) {
  return std::visit(Overloaded{
                        [&](const ResizeStep& s) { return resize_frame(frame, s.to, interp); },
                        [&](const CropStep& s) { return crop_frame(frame, s); },
                        [&](const FlipStep&) { return flip_frame(frame); },
                        [&](const RotateStep& s) { return rotate_frame(frame, s.degrees, interp); },
                        [&](const SubtractMeanStep& s) { return subtract_mean_frame(frame, s.means); },
                    },
                    step);
}

AnnotationSet AnnotationSet::empty(std::size_t length) {
  AnnotationSet set;
  set.frames.resize(length);
  return set;
}

FrameAnnotations make_frame_annotations(std::vector<Box> boxes, std::vector<Keypoint> keypoints) {
  FrameAnnotations fa;
  fa.box_ids.resize(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) fa.box_ids[i] = static_cast<int>(i);
  fa.boxes = std::move(boxes);
  fa.keypoints = std::move(keypoints);
  return fa;
}

std::pair<Clip, AnnotationSet> apply_step(const Clip& clip, const AnnotationSet& ann, const TransformStep& step) {
  if (ann.frames.size() != clip.length())
    throw Error(Errc::ShapeMismatch, std::to_string(ann.frames.size()) + " annotation frames for a " +
                                         std::to_string(clip.length()) + "-frame clip");
  const Shape src{clip.height(), clip.width()};
  const bool geometric = !std::holds_alternative<SubtractMeanStep>(step);

  std::vector<Frame> frames;
  frames.reserve(clip.length());
  for (const Frame& f : clip.frames) frames.push_back(apply_step(f, step));

  AnnotationSet out;
  out.frames.reserve(ann.frames.size());
  for (const FrameAnnotations& fa : ann.frames) {
    if (!geometric) {
      out.frames.push_back(fa);
      continue;
    }
    FrameAnnotations next;
    next.dropped_boxes = fa.dropped_boxes;
    std::vector<int> position(fa.boxes.size(), -1);
    for (std::size_t i = 0; i < fa.boxes.size(); ++i) {
      const int id = i < fa.box_ids.size() ? fa.box_ids[i] : static_cast<int>(i);
      if (auto b = transform_box(fa.boxes[i], step, src)) {
        position[i] = static_cast<int>(next.boxes.size());
        next.boxes.push_back(*b);
        next.box_ids.push_back(id);
      } else {
        next.dropped_boxes.push_back(id);
      }
    }
    const Shape dst = output_shape(step, src);
    for (const Keypoint& k : fa.keypoints) {
      const Point q = transform_point({k.x, k.y}, step, src);
      next.keypoints.push_back({q.x, q.y, k.visible && inside(q, dst)});
    }
    if (fa.word_labels) {
      std::vector<WordLabel> words;
      for (const WordLabel& w : *fa.word_labels) {
        if (w.box >= 0 && w.box < static_cast<int>(position.size()) && position[w.box] >= 0)
          words.push_back({w.word, position[w.box]});
      }
      next.word_labels = std::move(words);
    }
    auto map_step = [&](const std::optional<Frame>& map, Interp interp) -> std::optional<Frame> {
      if (!map) return std::nullopt;
      if (map->height() != src.height || map->width() != src.width)
        throw Error(Errc::ShapeMismatch, "annotation map " + shape_str(shape_of(*map)) + " does not match frame " +
                                             shape_str(src));
      return apply_step(*map, step, interp);
    };
    next.saliency = map_step(fa.saliency, Interp::Bilinear);
    next.fixations = map_step(fa.fixations, Interp::Nearest);
    out.frames.push_back(std::move(next));
  }
  return {Clip(std::move(frames)), std::move(out)};
}

std::pair<Clip, AnnotationSet> apply_clip(const Clip& clip, const AnnotationSet& ann, const TransformConfig& cfg,
                                          const SampledParams& params) {
  cfg.validate();
  if (ann.frames.size() != clip.length())
    throw Error(Errc::ShapeMismatch, std::to_string(ann.frames.size()) + " annotation frames for a " +
                                         std::to_string(clip.length()) + "-frame clip");
  std::pair<Clip, AnnotationSet> result{clip, ann};
  for (const TransformStep& step : build_steps(cfg, params, {clip.height(), clip.width()}))
    result = apply_step(result.first, result.second, step);
  return result;
}

Clip apply_per_frame(const Clip& clip, const FrameFn& fn) {
  std::vector<Frame> frames;
  frames.reserve(clip.length());
  for (const Frame& f : clip.frames) frames.push_back(fn(f));
  return Clip(std::move(frames));
}

Json annotations_to_json(const AnnotationSet& ann) {
  Json frames = Json::array();
  for (const FrameAnnotations& fa : ann.frames) {
    Json boxes = Json::array();
    for (std::size_t i = 0; i < fa.boxes.size(); ++i) {
      const Box& b = fa.boxes[i];
      Json jb = {{"label", b.label}, {"xmin", b.xmin}, {"ymin", b.ymin}, {"xmax", b.xmax}, {"ymax", b.ymax}};
      if (b.track) jb["track"] = *b.track;
      if (i < fa.box_ids.size()) jb["id"] = fa.box_ids[i];
      boxes.push_back(std::move(jb));
    }
    Json kps = Json::array();
    for (const Keypoint& k : fa.keypoints) kps.push_back({{"x", k.x}, {"y", k.y}, {"visible", k.visible}});
    Json jf = {{"boxes", std::move(boxes)}, {"keypoints", std::move(kps)}, {"dropped_boxes", fa.dropped_boxes}};
    if (fa.word_labels) {
      Json words = Json::array();
      for (const WordLabel& w : *fa.word_labels) words.push_back({w.word, w.box});
      jf["word_labels"] = std::move(words);
    }
    frames.push_back(std::move(jf));
  }
  return {{"frames", std::move(frames)}};
}

}  // namespace vippipe
