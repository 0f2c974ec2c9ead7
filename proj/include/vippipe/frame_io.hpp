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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vippipe {

using Bytes = std::vector<std::uint8_t>;

/// A single image plane stack, row-major with interleaved channels.
/// Samples are 8-bit as decoded, or 32-bit float once a transform has
/// moved them into float space (mean subtraction).
class Frame {
 public:
  Frame() = default;
  Frame(int height, int width, int channels, std::vector<std::uint8_t> data);
  Frame(int height, int width, int channels, std::vector<float> data);

  static Frame zeros_u8(int height, int width, int channels);
  static Frame zeros_f32(int height, int width, int channels);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return static_cast<std::size_t>(height_) * width_ * channels_; }
  bool is_float() const { return std::holds_alternative<std::vector<float>>(data_); }
  bool same_shape(const Frame& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  std::span<const std::uint8_t> u8() const { return std::get<std::vector<std::uint8_t>>(data_); }
  std::span<std::uint8_t> u8() { return std::get<std::vector<std::uint8_t>>(data_); }
  std::span<const float> f32() const { return std::get<std::vector<float>>(data_); }
  std::span<float> f32() { return std::get<std::vector<float>>(data_); }

  std::size_t offset(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  /// Sample value as double regardless of storage type.
  double at(int y, int x, int c = 0) const;
  /// Sample value by flat index as double regardless of storage type.
  double flat(std::size_t i) const;

  /// Raw sample bytes: one byte per sample for 8-bit frames, four
  /// little-endian bytes per sample for float frames.
  Bytes sample_bytes() const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::variant<std::vector<std::uint8_t>, std::vector<float>> data_;
};

/// Fixed-shape stack of frames. Every frame shares height, width and channels.
struct Clip {
  std::vector<Frame> frames;

  Clip() = default;
  /// Throws ShapeMismatch if frames disagree, EmptyInput if there are none.
  explicit Clip(std::vector<Frame> frames);

  std::size_t length() const { return frames.size(); }
  int height() const { return frames.front().height(); }
  int width() const { return frames.front().width(); }
  int channels() const { return frames.front().channels(); }

  friend bool operator==(const Clip&, const Clip&) = default;
};

// Binary netpbm: P6 for RGB, P5 for grayscale, maxval 255 only.
Frame decode_image(std::span<const std::uint8_t> bytes);
Bytes encode_image(const Frame& frame);

Frame read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Frame& frame);

/// "000017.ppm" style name for a frame index.
std::string frame_filename(std::int64_t index, bool grayscale = false);

/// Loads `indices` from a frame directory. Each index resolves to
/// `<index>.ppm`, falling back to `<index>.pgm`.
Clip read_clip(const std::filesystem::path& frame_dir, std::span<const std::int64_t> indices);

// Clip cache dump: "VIPC", u32 LE {length, height, width, channels}, samples.
// 8-bit clips store one byte per sample; float clips store f32 LE and are
// recognised on load by the payload size.
Bytes encode_clip_dump(const Clip& clip);
Clip decode_clip_dump(std::span<const std::uint8_t> bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace vippipe
