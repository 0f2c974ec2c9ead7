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

#include "vippipe/frame_io.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "vippipe/error.hpp"

namespace vippipe {

namespace {

static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");

void check_dims(int height, int width, int channels, std::size_t n) {
  if (height < 1 || width < 1 || channels < 1)
    throw Error(Errc::InvalidFrame, "non-positive frame dimensions");
  if (n != static_cast<std::size_t>(height) * width * channels)
    throw Error(Errc::InvalidFrame, "sample count does not match dimensions");
}

// Header tokenizer for netpbm: whitespace separated, '#' starts a comment
// that runs to end of line.
class PnmHeader {
 public:
  explicit PnmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  long next_int(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw Error(Errc::Truncated, std::string("header ends before ") + what);
    if (!std::isdigit(bytes_[pos_])) throw Error(Errc::UnsupportedFormat, std::string("malformed ") + what);
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) throw Error(Errc::UnsupportedFormat, std::string(what) + " too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size()) throw Error(Errc::Truncated, "header ends before raster");
    if (!std::isspace(bytes_[pos_])) throw Error(Errc::UnsupportedFormat, "missing separator before raster");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

std::uint32_t read_u32le(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void append_u32le(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

Frame::Frame(int height, int width, int channels, std::vector<std::uint8_t> data)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels, data.size());
  data_ = std::move(data);
}

Frame::Frame(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels, data.size());
  data_ = std::move(data);
}

Frame Frame::zeros_u8(int height, int width, int channels) {
  return Frame(height, width, channels,
               std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width * channels, 0));
}

Frame Frame::zeros_f32(int height, int width, int channels) {
  return Frame(height, width, channels,
               std::vector<float>(static_cast<std::size_t>(height) * width * channels, 0.0f));
}

double Frame::at(int y, int x, int c) const { return flat(offset(y, x, c)); }

double Frame::flat(std::size_t i) const {
  if (is_float()) return static_cast<double>(f32()[i]);
  return static_cast<double>(u8()[i]);
}

Bytes Frame::sample_bytes() const {
  if (!is_float()) return Bytes(u8().begin(), u8().end());
  Bytes out(size() * sizeof(float));
  std::memcpy(out.data(), f32().data(), out.size());
  return out;
}

Clip::Clip(std::vector<Frame> fs) : frames(std::move(fs)) {
  if (frames.empty()) throw Error(Errc::EmptyInput, "clip has no frames");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!frames[i].same_shape(frames[0]) || frames[i].is_float() != frames[0].is_float())
      throw Error(Errc::ShapeMismatch, "frame " + std::to_string(i) + " differs in shape from frame 0");
  }
}

Frame decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw Error(Errc::UnsupportedFormat, "expected binary netpbm magic P5 or P6");
  const int channels = bytes[1] == '6' ? 3 : 1;
  PnmHeader header(bytes);
  const long width = header.next_int("width");
  const long height = header.next_int("height");
  const long maxval = header.next_int("maxval");
  if (maxval != 255) throw Error(Errc::UnsupportedFormat, "maxval " + std::to_string(maxval) + " (only 255 supported)");
  if (width < 1 || height < 1) throw Error(Errc::UnsupportedFormat, "zero image dimension");
  const std::size_t start = header.raster_start();
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - start < n)
    throw Error(Errc::Truncated, "raster has " + std::to_string(bytes.size() - start) + " of " + std::to_string(n) + " bytes");
  return Frame(static_cast<int>(height), static_cast<int>(width), channels,
               std::vector<std::uint8_t>(bytes.begin() + start, bytes.begin() + start + n));
}

Bytes encode_image(const Frame& frame) {
  if (frame.channels() != 1 && frame.channels() != 3)
    throw Error(Errc::InvalidFrame, "cannot encode " + std::to_string(frame.channels()) + "-channel frame");
  if (frame.is_float()) throw Error(Errc::InvalidFrame, "cannot encode float frame");
  const std::string header = std::string(frame.channels() == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), frame.u8().begin(), frame.u8().end());
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

Frame read_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

void write_image(const std::filesystem::path& path, const Frame& frame) { write_file(path, encode_image(frame)); }

std::string frame_filename(std::int64_t index, bool grayscale) {
  std::ostringstream name;
  name << std::setw(6) << std::setfill('0') << index << (grayscale ? ".pgm" : ".ppm");
  return name.str();
}

Clip read_clip(const std::filesystem::path& frame_dir, std::span<const std::int64_t> indices) {
  if (indices.empty()) throw Error(Errc::EmptyInput, "no frame indices");
  std::map<std::int64_t, Frame> decoded;
  std::vector<Frame> frames;
  frames.reserve(indices.size());
  for (std::int64_t index : indices) {
    auto it = decoded.find(index);
    if (it == decoded.end()) {
      if (index < 0) throw Error(Errc::MissingFrame, "negative frame index " + std::to_string(index));
      std::filesystem::path path = frame_dir / frame_filename(index, false);
      if (!std::filesystem::exists(path)) path = frame_dir / frame_filename(index, true);
      if (!std::filesystem::exists(path))
        throw Error(Errc::MissingFrame, "no file for frame " + std::to_string(index) + " in " + frame_dir.string());
      it = decoded.emplace(index, read_image(path)).first;
    }
    frames.push_back(it->second);
  }
  return Clip(std::move(frames));
}

Bytes encode_clip_dump(const Clip& clip) {
  Bytes out = {'V', 'I', 'P', 'C'};
  append_u32le(out, static_cast<std::uint32_t>(clip.length()));
  append_u32le(out, static_cast<std::uint32_t>(clip.height()));
  append_u32le(out, static_cast<std::uint32_t>(clip.width()));
  append_u32le(out, static_cast<std::uint32_t>(clip.channels()));
  for (const Frame& f : clip.frames) {
    const Bytes b = f.sample_bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

Clip decode_clip_dump(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 20 || std::memcmp(bytes.data(), "VIPC", 4) != 0)
    throw Error(Errc::UnsupportedFormat, "missing VIPC header");
  const std::uint32_t length = read_u32le(bytes, 4);
  const std::uint32_t height = read_u32le(bytes, 8);
  const std::uint32_t width = read_u32le(bytes, 12);
  const std::uint32_t channels = read_u32le(bytes, 16);
  const std::size_t per_frame = static_cast<std::size_t>(height) * width * channels;
  const std::size_t samples = per_frame * length;
  const std::size_t payload = bytes.size() - 20;
  if (samples == 0) throw Error(Errc::UnsupportedFormat, "empty clip in dump");
  const bool is_float = payload == samples * sizeof(float);
  if (!is_float && payload != samples)
    throw Error(Errc::Truncated, "dump payload of " + std::to_string(payload) + " bytes fits neither u8 nor f32 samples");
  std::vector<Frame> frames;
  frames.reserve(length);
  const std::uint8_t* p = bytes.data() + 20;
  for (std::uint32_t i = 0; i < length; ++i) {
    if (is_float) {
      std::vector<float> data(per_frame);
      std::memcpy(data.data(), p + i * per_frame * sizeof(float), per_frame * sizeof(float));
      frames.emplace_back(height, width, channels, std::move(data));
    } else {
      frames.emplace_back(height, width, channels, std::vector<std::uint8_t>(p + i * per_frame, p + (i + 1) * per_frame));
    }
  }
  return Clip(std::move(frames));
}

}  // namespace vippipe
