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

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "vippipe/clip_sampler.hpp"
#include "vippipe/config.hpp"
#include "vippipe/frame_io.hpp"
#include "vippipe/manifest.hpp"
#include "vippipe/micro_model.hpp"
#include "vippipe/transforms.hpp"

namespace vippipe {

/// Seed for planning clips of one video in one epoch.
std::uint64_t plan_seed(std::uint64_t seed, int epoch, std::size_t video_index);

struct ClipItem {
  std::size_t video = 0;  // index into the manifest
  std::size_t clip = 0;   // index within the video's plan
  std::vector<std::int64_t> indices;
};

struct LoadedClip {
  ClipItem item;
  Clip clip;
  AnnotationSet annotations;
  std::optional<int> label;
  SampledParams params;
};

struct LoadOptions {
  bool maps = true;  // also read saliency and fixation maps
};

/// The clips of one manifest split under one config, in manifest order.
/// Loading item i is a pure function of (config, manifest, epoch, i).
class ClipDataset {
 public:
  ClipDataset(const DatasetManifest& manifest, const RunConfig& cfg, Split split, int epoch = 0,
              LoadOptions options = {});

  std::size_t size() const { return items_.size(); }
  const ClipItem& item(std::size_t i) const { return items_.at(i); }
  LoadedClip load(std::size_t i) const;

  /// Manifest annotations for the frames of `item`, in clip order.
  AnnotationSet raw_annotations(const ClipItem& item) const;

 private:
  const DatasetManifest& manifest_;
  RunConfig cfg_;
  int epoch_;
  LoadOptions options_;
  std::vector<ClipItem> items_;
};

constexpr std::size_t kFeatureDim = 5;

/// Per-clip mean of each colour channel (scaled by 1/255) followed by the
/// mean normalised centre (x, y) of each frame's first box; 0.5 when a frame
/// has no box. Grayscale clips repeat their single channel.
std::vector<double> clip_features(const Clip& clip, const AnnotationSet& ann);

/// Produces results for indices 0..n-1 on `workers` threads and hands them
/// back strictly in index order, keeping at most `window` results buffered.
/// Exceptions from `fn` are rethrown from next() for the failing index.
template <class T>
class OrderedLoader {
 public:
  OrderedLoader(std::size_t n, int workers, std::size_t window, std::function<T(std::size_t)> fn)
      : n_(n), window_(std::max<std::size_t>(window, 1)), fn_(std::move(fn)) {
    const int count = std::max(1, workers);
    for (int w = 0; w < count; ++w) threads_.emplace_back([this] { work(); });
  }

  OrderedLoader(const OrderedLoader&) = delete;
  OrderedLoader& operator=(const OrderedLoader&) = delete;

  ~OrderedLoader() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  bool done() const { return consumed_ >= n_; }

  T next() {
    std::unique_lock lock(mu_);
    const std::size_t want = consumed_;
    cv_.wait(lock, [&] { return ready_.contains(want); });
    auto node = ready_.extract(want);
    ++consumed_;
    lock.unlock();
    cv_.notify_all();
    if (node.mapped().error) std::rethrow_exception(node.mapped().error);
    return std::move(*node.mapped().value);
  }

 private:
  struct Slot {
    std::optional<T> value;
    std::exception_ptr error;
  };

  void work() {
    for (;;) {
      std::size_t index;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || next_ >= n_ || next_ < consumed_ + window_; });
        if (stop_ || next_ >= n_) return;
        index = next_++;
      }
      Slot slot;
      try {
        slot.value.emplace(fn_(index));
      } catch (...) {
        slot.error = std::current_exception();
      }
      {
        std::lock_guard lock(mu_);
        ready_.emplace(index, std::move(slot));
      }
      cv_.notify_all();
    }
  }

  const std::size_t n_;
  const std::size_t window_;
  std::function<T(std::size_t)> fn_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::size_t, Slot> ready_;
  std::size_t next_ = 0;
  std::size_t consumed_ = 0;
  bool stop_ = false;
  std::vector<std::jthread> threads_;
};

}  // namespace vippipe
