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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "vippipe/error.hpp"
#include "vippipe/frame_io.hpp"
#include "vippipe/manifest.hpp"
#include "vippipe/random.hpp"

namespace vippipe {

namespace {

using Rgb = std::array<int, 3>;

Rgb class_color(int label) {
  static constexpr std::array<Rgb, 8> palette = {{
      {220, 40, 40}, {40, 200, 60}, {50, 80, 230}, {230, 210, 40},
      {200, 60, 210}, {40, 210, 210}, {240, 140, 30}, {250, 250, 250},
  }};
  Rgb c = palette[label % palette.size()];
  // Later cycles through the palette get progressively darker.
  const int cycle = label / static_cast<int>(palette.size());
  for (int& v : c) v = v * 4 / (4 + cycle);
  return c;
}

std::uint8_t clamp_u8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

std::string video_dir_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "video_%04d", index);
  return buf;
}

struct Square {
  double x, y, vx, vy;
};

double draw_velocity(Rng& rng) {
  double v = rng.uniform(0.5, 2.5);
  return rng.bernoulli(0.5) ? -v : v;
}

void bounce(double& pos, double& vel, double limit) {
  if (pos < 0) {
    pos = -pos;
    vel = -vel;
  }
  if (pos > limit) {
    pos = 2 * limit - pos;
    vel = -vel;
  }
  pos = std::clamp(pos, 0.0, limit);
}

VideoRecord make_video(const SynthSpec& spec, int index, int label, Split split,
                       const std::filesystem::path& out_dir) {
  Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(index)}));
  const int h = spec.height;
  const int w = spec.width;
  const int side = std::max(4, std::min(h, w) / 3);
  const int length = static_cast<int>(rng.uniform_int(spec.length_min, spec.length_max));
  const int background = static_cast<int>(rng.uniform_int(60, 100));
  const Rgb color = class_color(label);

  Square sq{rng.uniform(0, w - side), rng.uniform(0, h - side), draw_velocity(rng), draw_velocity(rng)};

  const std::string rel = "videos/" + video_dir_name(index);
  const std::filesystem::path dir = out_dir / rel;
  std::filesystem::create_directories(dir / "fixations");
  std::filesystem::create_directories(dir / "saliency");

  VideoRecord rec;
  rec.path = rel;
  rec.length = length;
  rec.width = w;
  rec.height = h;
  rec.action_label = label;
  rec.split = split;

  const double sigma = side / 2.0;
  for (int t = 0; t < length; ++t) {
    Frame frame = Frame::zeros_u8(h, w, 3);
    auto px = frame.u8();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double cx = x + 0.5;
        const double cy = y + 0.5;
        const bool inside = cx >= sq.x && cx < sq.x + side && cy >= sq.y && cy < sq.y + side;
        for (int c = 0; c < 3; ++c) {
          const int base = inside ? color[c] : background;
          px[frame.offset(y, x, c)] = clamp_u8(base + static_cast<int>(rng.uniform_int(-12, 12)));
        }
      }
    }
    write_image(dir / frame_filename(t), frame);

    const double centre_x = sq.x + side / 2.0;
    const double centre_y = sq.y + side / 2.0;
    Frame fixation = Frame::zeros_u8(h, w, 1);
    const int fx = std::clamp(static_cast<int>(centre_x), 0, w - 1);
    const int fy = std::clamp(static_cast<int>(centre_y), 0, h - 1);
    fixation.u8()[fixation.offset(fy, fx, 0)] = 255;
    write_image(dir / "fixations" / frame_filename(t, true), fixation);

    Frame saliency = Frame::zeros_u8(h, w, 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = x + 0.5 - centre_x;
        const double dy = y + 0.5 - centre_y;
        const double v = 255.0 * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
        saliency.u8()[saliency.offset(y, x, 0)] = clamp_u8(static_cast<int>(std::lround(v)));
      }
    }
    write_image(dir / "saliency" / frame_filename(t, true), saliency);

    FrameAnnotation ann;
    ann.index = t;
    ann.boxes.push_back({label, 0, sq.x, sq.y, sq.x + side, sq.y + side, Json::object()});
    ann.keypoints.push_back({centre_x, centre_y, true});
    ann.fixations = rel + "/fixations/" + frame_filename(t, true);
    ann.saliency_map = rel + "/saliency/" + frame_filename(t, true);
    ann.word_labels = std::vector<WordLabel>{{label, 0}};
    rec.frames.push_back(std::move(ann));

    sq.x += sq.vx;
    sq.y += sq.vy;
    bounce(sq.x, sq.vx, w - side);
    bounce(sq.y, sq.vy, h - side);
  }
  return rec;
}

}  // namespace

DatasetManifest generate_synthetic_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  if (spec.n_videos < 1 || spec.n_val_videos < 0 || spec.n_classes < 1 || spec.length_min < 1 ||
      spec.length_max < spec.length_min || spec.height < 8 || spec.width < 8)
    throw Error(Errc::InvalidConfig, "synthetic dataset counts must be positive (frames at least 8x8)");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  DatasetManifest m;
  m.base_dir = out_dir;
  try {
    for (int i = 0; i < spec.n_videos; ++i)
      m.videos.push_back(make_video(spec, i, i % spec.n_classes, Split::Train, out_dir));
    for (int j = 0; j < spec.n_val_videos; ++j)
      m.videos.push_back(make_video(spec, spec.n_videos + j, j % spec.n_classes, Split::Val, out_dir));
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(Errc::IoError, e.what());
  }
  write_manifest(out_dir / "manifest.json", m);
  return m;
}

}  // namespace vippipe
