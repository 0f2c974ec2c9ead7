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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances are fixed; do not loosen them here.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "config_cases.hpp"
#include "oracles.hpp"
#include "vippipe/checkpoint.hpp"
#include "vippipe/clip_sampler.hpp"
#include "vippipe/config.hpp"
#include "vippipe/dataset.hpp"
#include "vippipe/digest.hpp"
#include "vippipe/engine.hpp"
#include "vippipe/error.hpp"
#include "vippipe/frame_io.hpp"
#include "vippipe/metrics.hpp"
#include "vippipe/micro_model.hpp"
#include "vippipe/random.hpp"
#include "vippipe/transforms.hpp"

using namespace vippipe;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects failure descriptions; a criterion passes when none were recorded.
struct Verdict {
  std::vector<std::string> failures;
  std::string summary;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

Box make_box(double x0, double y0, double x1, double y1, int label = 0) {
  Box b;
  b.label = label;
  b.xmin = x0;
  b.ymin = y0;
  b.xmax = x1;
  b.ymax = y1;
  return b;
}

Frame noise_frame(Rng& rng, int h, int w, int c) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(h * w * c));
  for (auto& v : data) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return Frame(h, w, c, std::move(data));
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

// --- clip planner --------------------------------------------------------

Verdict clip_sweep() {
  Verdict v;
  const auto t0 = Clock::now();
  long cases = 0, mismatches = 0;
  for (std::int64_t V = 1; V <= 64; ++V)
    for (int L = -1; L <= 8; ++L) {
      if (L == 0) continue;
      for (int S = -3; S <= 8; ++S) {
        if (L > 0 && S <= -L) continue;
        for (int N = -1; N <= 4; ++N)
          for (int O : {0, 1, 5})
            for (ClipMode mode : {ClipMode::Contiguous, ClipMode::Uniform}) {
              ClipConfig c;
              c.clip_length = L;
              c.clip_stride = S;
              c.num_clips = N;
              c.clip_offset = O;
              c.mode = mode;
              ++cases;
              std::optional<std::vector<std::vector<std::int64_t>>> want;
              try {
                want = oracle::enumerate_clips(V, c);
              } catch (const std::invalid_argument&) {
              }
              std::optional<std::vector<std::vector<std::int64_t>>> got;
              try {
                got = plan_clips(V, c, 0).clips;
              } catch (const Error& e) {
                if (e.code() != Errc::InfeasibleConfig) got = std::vector<std::vector<std::int64_t>>{{-99}};
              }
              if (got != want) {
                if (mismatches++ < 3)
                  v.failures.push_back("V=" + std::to_string(V) + " L=" + std::to_string(L) + " S=" + std::to_string(S) +
                                       " N=" + std::to_string(N) + " O=" + std::to_string(O) + " " +
                                       std::string(to_string(mode)));
              }
            }
      }
    }
  const double secs = seconds_since(t0);
  v.expect(mismatches == 0, std::to_string(mismatches) + " mismatching cases");
  v.expect(secs < 10.0, "sweep took " + fmt(secs) + " s");
  v.summary = std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches, " + fmt(secs) + " s";
  return v;
}

// --- transforms ----------------------------------------------------------

Verdict transform_commutation() {
  Verdict v;
  Rng rng(20261019);
  int trials = 0, compared = 0, bad = 0;
  int compared_twice = 0, bad_twice = 0;  // resize followed by rotate
  double worst = 0;
  while (trials < 2000) {
    ++trials;
    const Shape shape{static_cast<int>(rng.uniform_int(20, 64)), static_cast<int>(rng.uniform_int(20, 64))};
    // Integer corners: the source mask is then the box exactly.
    const double x0 = static_cast<double>(rng.uniform_int(0, shape.width - 6));
    const double y0 = static_cast<double>(rng.uniform_int(0, shape.height - 6));
    const Box b = make_box(x0, y0, static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(x0) + 4, shape.width)),
                            static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(y0) + 4, shape.height)));
    std::vector<TransformStep> steps;
    Shape s = shape;
    if (rng.bernoulli(0.5)) {
      steps.push_back(ResizeStep{{static_cast<int>(rng.uniform_int(16, 96)), static_cast<int>(rng.uniform_int(16, 96))}});
      s = output_shape(steps.back(), s);
    }
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
      // Existence may only disagree for slivers at most two pixels thin.
      const auto& present = analytic ? analytic : raster;
      if (present && std::min(present->width(), present->height()) > 2) ++bad;
      continue;
    }
    ++compared;
    const bool resampled_twice = steps.size() >= 2 && std::holds_alternative<ResizeStep>(steps.front()) &&
                                 std::holds_alternative<RotateStep>(steps.back());
    compared_twice += resampled_twice;
    const double err = std::max({std::abs(analytic->xmin - raster->xmin), std::abs(analytic->ymin - raster->ymin),
                                 std::abs(analytic->xmax - raster->xmax), std::abs(analytic->ymax - raster->ymax)});
    worst = std::max(worst, err);
    if (err > 1.0) {
      ++bad;
      if (resampled_twice) ++bad_twice;
    }
  }
  v.expect(bad == 0, std::to_string(bad) + " trials off by more than 1 px (" + std::to_string(bad_twice) + " of them among " +
                         std::to_string(compared_twice) + " resize-then-rotate chains)");
  v.expect(compared >= 1000, "only " + std::to_string(compared) + " trials compared");

  // Flip involution, exact.
  int flip_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const Frame f = noise_frame(rng, static_cast<int>(rng.uniform_int(1, 20)), static_cast<int>(rng.uniform_int(1, 20)), 3);
    if (!(apply_step(apply_step(f, FlipStep{}), FlipStep{}) == f)) ++flip_bad;
    const Shape sh{f.height(), f.width()};
    // Coordinates on the 2^-20 grid that every transform emits.
    const double x0 = std::ldexp(static_cast<double>(rng.uniform_int(0, (sh.width - 1) << 20)), -20);
    const double x1 = std::ldexp(static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(std::ldexp(x0 + 1, 20)),
                                                                     static_cast<std::int64_t>(sh.width) << 20)),
                                 -20);
    const Box b = make_box(x0, 0, x1, sh.height);
    const auto once = transform_box(b, FlipStep{}, sh);
    if (!once || !(*transform_box(*once, FlipStep{}, sh) == b)) ++flip_bad;
    // And boxes straight out of another step.
    const auto grown = transform_box(make_box(rng.uniform(0, 0.4), 0, sh.width - rng.uniform(0, 0.2), sh.height),
                                     ResizeStep{{sh.height * 3, sh.width * 3}}, sh);
    const Shape big{sh.height * 3, sh.width * 3};
    if (grown) {
      const auto twice = transform_box(*transform_box(*grown, FlipStep{}, big), FlipStep{}, big);
      if (!(*twice == *grown)) ++flip_bad;
    }
  }
  v.expect(flip_bad == 0, std::to_string(flip_bad) + " flip involution failures");

  // Composition: one step at a time equals the composed pipeline, exactly.
  int comp_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const Clip clip({noise_frame(rng, 30, 40, 3), noise_frame(rng, 30, 40, 3)});
    AnnotationSet ann = AnnotationSet::empty(2);
    ann.frames[0] = make_frame_annotations({make_box(3, 4, 20, 25), make_box(30, 2, 39, 9)}, {{10, 10, true}});
    ann.frames[1] = make_frame_annotations({make_box(5, 5, 15, 15)}, {{29, 1, true}});
    TransformConfig cfg;
    cfg.resize_shape = Shape{36, 48};
    cfg.crop_shape = Shape{28, 30};
    cfg.crop_type = CropType::Random;
    cfg.flip_probability = 0.5;
    cfg.rotation_degrees = 25;
    cfg.subtract_mean = {100, 110, 120};
    cfg.final_shape = Shape{20, 20};
    const auto params = sample_params(cfg, {30, 40}, 77, static_cast<std::uint64_t>(i));
    const auto composed = apply_clip(clip, ann, cfg, params);
    std::pair<Clip, AnnotationSet> stepwise{clip, ann};
    for (const auto& step : build_steps(cfg, params, {30, 40}))
      stepwise = apply_step(stepwise.first, stepwise.second, step);
    if (!(stepwise.first == composed.first && stepwise.second == composed.second)) ++comp_bad;
  }
  v.expect(comp_bad == 0, std::to_string(comp_bad) + " composition failures");
  v.summary = std::to_string(compared) + "/" + std::to_string(trials) + " box trials, worst side error " + fmt(worst) +
              " px; flip involution and composition exact";
  return v;
}

// --- metrics -------------------------------------------------------------

Detection make_det(std::string id, Box b, double conf) {
  Detection d;
  d.image_id = std::move(id);
  d.label = b.label;
  d.box = b;
  d.confidence = conf;
  return d;
}

Verdict metric_values() {
  Verdict v;
  auto close = [&](double got, double want, const std::string& what) {
    v.expect(std::abs(got - want) <= 1e-9, what + " = " + std::to_string(got));
  };
  close(iou(make_box(0, 0, 10, 10), make_box(5, 0, 15, 10)), 1.0 / 3.0, "IoU");
  const GroundTruth gt{{"img", {make_box(0, 0, 10, 10)}}};
  const std::vector<Detection> two{make_det("img", make_box(0, 0, 3, 10), 0.9), make_det("img", make_box(0, 0, 7, 10), 0.8)};
  close(average_precision(two, gt, 0, 0.5, ApInterpolation::ElevenPoint), 0.5, "eleven-point AP");
  const Frame map(2, 2, 1, std::vector<float>{1, 0, 0, 0});
  Frame fix00 = Frame::zeros_u8(2, 2, 1), fix11 = Frame::zeros_u8(2, 2, 1);
  fix00.u8()[0] = 1;
  fix11.u8()[3] = 1;
  close(nss({map, fix00, std::nullopt}), 1.5, "NSS at (0,0)");
  close(nss({map, fix11, std::nullopt}), -0.5, "NSS at (1,1)");
  close(cc(map, Frame(2, 2, 1, std::vector<float>{0, 1, 0, 0})), -1.0 / 3.0, "CC");

  // Exhaustive small instances: <= 3 GT boxes, <= 6 detections.
  Rng rng(4242);
  int instances = 0, bad = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    GroundTruth gts;
    std::vector<Detection> dets;
    const int images = static_cast<int>(rng.uniform_int(1, 3));
    const int n_gt = static_cast<int>(rng.uniform_int(1, 3));
    for (int g = 0; g < n_gt; ++g) {
      const double x = rng.uniform(0, 20), y = rng.uniform(0, 20);
      gts["i" + std::to_string(rng.uniform_int(0, images - 1))].push_back(
          make_box(x, y, x + rng.uniform(4, 12), y + rng.uniform(4, 12), static_cast<int>(rng.uniform_int(0, 1))));
    }
    const int n_det = static_cast<int>(rng.uniform_int(0, 6));
    for (int k = 0; k < n_det; ++k) {
      const std::string id = "i" + std::to_string(rng.uniform_int(0, images - 1));
      Box b;
      auto it = gts.find(id);
      if (it != gts.end() && rng.bernoulli(0.7)) {
        const Box& g = it->second[static_cast<std::size_t>(rng.uniform_int(0, it->second.size() - 1))];
        const double jx = rng.uniform(-3, 3), jy = rng.uniform(-3, 3);
        b = make_box(g.xmin + jx, g.ymin + jy, g.xmax + jx, g.ymax + jy, g.label);
      } else {
        const double x = rng.uniform(0, 20), y = rng.uniform(0, 20);
        b = make_box(x, y, x + rng.uniform(4, 12), y + rng.uniform(4, 12), static_cast<int>(rng.uniform_int(0, 1)));
      }
      dets.push_back(make_det(id, b, static_cast<double>(rng.uniform_int(1, 4)) / 4.0));
    }
    for (int cls = 0; cls < 2; ++cls)
      for (auto interp : {ApInterpolation::ElevenPoint, ApInterpolation::AllPoint}) {
        double want;
        try {
          want = oracle::average_precision(dets, gts, cls, 0.5, interp);
        } catch (const std::invalid_argument&) {
          continue;
        }
        ++instances;
        if (std::abs(average_precision(dets, gts, cls, 0.5, interp) - want) > 1e-9) ++bad;
      }
  }
  v.expect(bad == 0, std::to_string(bad) + " AP mismatches against the exhaustive oracle");
  v.summary = "worked examples within 1e-9; " + std::to_string(instances) + " AP instances, " + std::to_string(bad) +
              " mismatches";
  return v;
}

// --- pseudo-batches ------------------------------------------------------

Verdict pseudo_batch_equivalence() {
  Verdict v;
  Rng rng(99);
  double worst_step = 0, worst_fd = 0;
  int partitions = 0;
  for (const std::string name : {"linear_regressor", "logistic_clip_classifier"}) {
    for (int trial = 0; trial < 100; ++trial) {
      MicroModel model = MicroModel::create(name, kFeatureDim, 3);
      for (double& p : model.parameters().values) p = rng.uniform(-1, 1);
      // Samples from clips of differing shapes: variable-shape inputs.
      const int n = static_cast<int>(rng.uniform_int(2, 12));
      std::vector<Sample> all;
      for (int i = 0; i < n; ++i) {
        const int len = static_cast<int>(rng.uniform_int(1, 4));
        const int h = static_cast<int>(rng.uniform_int(2, 9)), w = static_cast<int>(rng.uniform_int(2, 9));
        std::vector<Frame> frames;
        for (int t = 0; t < len; ++t) frames.push_back(noise_frame(rng, h, w, 3));
        AnnotationSet ann = AnnotationSet::empty(static_cast<std::size_t>(len));
        ann.frames[0].boxes.push_back(make_box(0, 0, rng.uniform(0.5, w), rng.uniform(0.5, h)));
        Sample s{clip_features(Clip(std::move(frames)), ann), 0.0};
        s.target = model.is_classifier() ? static_cast<double>(rng.uniform_int(0, 2)) : rng.uniform(-1, 1);
        all.push_back(std::move(s));
      }
      // Random partition into contiguous mini-batches of unequal sizes.
      std::vector<MiniBatch> parts;
      for (std::size_t i = 0; i < all.size();) {
        const std::size_t take = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(all.size() - i)));
        parts.emplace_back(all.begin() + static_cast<long>(i), all.begin() + static_cast<long>(i + take));
        i += take;
      }
      ++partitions;
      SgdHyper hyper{rng.uniform(0.01, 1), rng.uniform(0, 0.95), rng.uniform(0, 0.01), rng.bernoulli(0.5) ? 0.1 : 0.0};
      std::vector<double> momentum(model.parameters().values.size());
      for (double& m : momentum) m = rng.uniform(-0.1, 0.1);
      const auto want = oracle::large_batch_step(name, model.parameters().values, momentum, kFeatureDim,
                                                 model.outputs(), all, hyper);
      SgdState state{momentum};
      accumulate_step(model, parts, state, hyper);
      worst_step = std::max(worst_step, oracle::max_rel_error(model.parameters().values, want.params, 1e-300));
      worst_step = std::max(worst_step, oracle::max_rel_error(state.momentum, want.momentum, 1e-300));
    }
    for (int draw = 0; draw < 100; ++draw) {
      MicroModel model = MicroModel::create(name, 4, 3);
      for (double& p : model.parameters().values) p = rng.uniform(-1, 1);
      Sample s;
      for (int d = 0; d < 4; ++d) s.features.push_back(rng.uniform(-1, 1));
      s.target = model.is_classifier() ? static_cast<double>(rng.uniform_int(0, 2)) : rng.uniform(-2, 2);
      std::vector<double> g(model.parameters().values.size(), 0.0);
      model.accumulate_gradient(s, g);
      const auto fd = oracle::finite_difference(name, model.parameters().values, 4, model.outputs(), s, 1e-6);
      worst_fd = std::max(worst_fd, oracle::max_rel_error(g, fd, 1e-3));
    }
  }
  v.expect(worst_step <= 1e-12, "accumulated vs large batch relative error " + std::to_string(worst_step));
  v.expect(worst_fd <= 1e-6, "gradient vs finite difference relative error " + std::to_string(worst_fd));
  v.summary = std::to_string(partitions) + " partitions, worst step rel err " + fmt(worst_step) +
              "; 200 FD draws, worst rel err " + fmt(worst_fd);
  return v;
}

// --- engine --------------------------------------------------------------

std::string checkpoint_hash(const std::filesystem::path& run, int epoch) {
  return sha256_hex(read_file(run / "checkpoints" / ("epoch_" + std::to_string(epoch) + ".ckpt")));
}

Verdict determinism() {
  Verdict v;
  oracle::TempDir dir("accept-det");
  SynthSpec spec;
  spec.seed = 3;
  spec.n_videos = 12;
  spec.length_min = 10;
  spec.length_max = 16;
  spec.height = 24;
  spec.width = 32;
  generate_synthetic_dataset(spec, dir.path() / "data");
  const DatasetManifest m = load_manifest(dir.path() / "data" / "manifest.json");
  auto cfg = [&](const std::vector<std::string>& extra) {
    std::vector<std::string> o = {"save_dir=" + (dir.path() / "runs").string(), "clip_length=4",
                                  "resize_shape=[20, 28]", "crop_shape=[16, 24]", "crop_type=Random",
                                  "flip_probability=0.5", "rotation_degrees=10", "batch_size=2",
                                  "pseudo_batch_loop=2", "lr=0.3", "grad_max_norm=10", "weight_decay=0.0005",
                                  "milestones=[4, 8]", "seed=999"};
    o.insert(o.end(), extra.begin(), extra.end());
    return config_from_yaml("", o);
  };
  std::vector<TrainResult> runs;
  for (int w : {1, 2, 8}) runs.push_back(train(cfg({"exp=w" + std::to_string(w), "num_workers=" + std::to_string(w), "epoch=10"}), m));
  runs.push_back(train(cfg({"exp=w1", "num_workers=1", "epoch=10"}), m));  // plain rerun
  const std::string log0 = oracle::file_text(runs[0].run_dir / "logs.jsonl");
  for (std::size_t i = 1; i < runs.size(); ++i) {
    v.expect(oracle::file_text(runs[i].run_dir / "logs.jsonl") == log0, "logs differ for run " + std::to_string(i));
    v.expect(runs[i].param_digest == runs[0].param_digest, "parameter digest differs for run " + std::to_string(i));
    for (int e = 1; e <= 10; ++e)
      v.expect(checkpoint_hash(runs[i].run_dir, e) == checkpoint_hash(runs[0].run_dir, e),
               "checkpoint " + std::to_string(e) + " differs for run " + std::to_string(i));
  }
  const TrainResult first = train(cfg({"exp=first5", "epoch=5", "num_workers=2"}), m);
  const std::string ckpt = (first.run_dir / "checkpoints" / "epoch_5.ckpt").string();
  const TrainResult resumed = train(cfg({"exp=resume", "epoch=10", "num_workers=2", "pretrained=" + ckpt}), m);
  v.expect(resumed.param_digest == runs[0].param_digest, "resume 5+5 differs from 10 uninterrupted epochs");
  v.expect(checkpoint_hash(resumed.run_dir, 10) == checkpoint_hash(runs[0].run_dir, 10),
           "resumed epoch_10 checkpoint bytes differ");
  v.summary = "workers {1,2,8} + rerun byte-identical logs/checkpoints; resume 5+5 == 10 (digest " +
              runs[0].param_digest.substr(0, 12) + ")";
  return v;
}

Verdict end_to_end() {
  Verdict v;
  oracle::TempDir dir("accept-e2e");
  SynthSpec spec;
  spec.seed = 7;
  spec.n_classes = 3;
  spec.n_videos = 60;
  spec.n_val_videos = 30;
  generate_synthetic_dataset(spec, dir.path() / "data");
  const auto t0 = Clock::now();
  // Experiment file in the shape of the example config, scaled to desk size.
  std::ofstream(dir.path() / "exp.yaml") << "# Preprocessing\n"
                                            "clip_length: 8\nclip_offset: 0\nclip_stride: 0\n"
                                            "crop_shape: [28,36]\ncrop_type: Random\nfinal_shape: [28,36]\n"
                                            "num_clips: -1\nrandom_offset: 0\nresize_shape: [32,43]\n"
                                            "subtract_mean: ''\n\n"
                                            "# Experimental Setup\n"
                                            "acc_metric: Accuracy\nbatch_size: 3\ndataset: synthetic\ndebug: 0\n"
                                            "epoch: 30\nexp: exp\ngamma: 0.1\ngrad_max_norm: 10\n"
                                            "json_path: "
                                         << (dir.path() / "data").string()
                                         << "\nlabels: 3\nload_type: train\nloss_type: M_XENTROPY\nlr: 1.0\n"
                                            "milestones: [10,20]\nmodel: logistic_clip_classifier\nmomentum: 0.9\n"
                                            "num_workers: 2\nopt: sgd\npreprocess: default\npretrained: 0\n"
                                            "pseudo_batch_loop: 1\nrerun: 1\nsave_dir: "
                                         << (dir.path() / "runs").string() << "\nseed: 999\nweight_decay: 0.0005\n";
  const RunConfig cfg = load_config(dir.path() / "exp.yaml");
  const DatasetManifest m = load_manifest(manifest_path(cfg));
  const TrainResult r = train(cfg, m);
  RunConfig val_cfg = cfg;
  val_cfg.load_type = Split::Val;
  const EvalReport report =
      evaluate(val_cfg, m, PretrainedSpec::parse((r.run_dir / "checkpoints" / "epoch_30.ckpt").string()));
  const double secs = seconds_since(t0);
  v.expect(r.final_epoch <= 30, "trained " + std::to_string(r.final_epoch) + " epochs");
  v.expect(report.value >= 0.95, "validation accuracy " + std::to_string(report.value));
  v.expect(secs < 60.0, "took " + fmt(secs) + " s");
  v.summary = "val accuracy " + fmt(report.value) + " over " + std::to_string(report.items) + " clips after " +
              std::to_string(r.final_epoch) + " epochs, " + fmt(secs) + " s";
  return v;
}

// --- codec ---------------------------------------------------------------

Verdict codec_roundtrip() {
  Verdict v;
  Rng rng(1000);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const Frame f = noise_frame(rng, static_cast<int>(rng.uniform_int(1, 32)), static_cast<int>(rng.uniform_int(1, 32)),
                                rng.bernoulli(0.5) ? 3 : 1);
    const Bytes b = encode_image(f);
    if (!(decode_image(b) == f) || encode_image(decode_image(b)) != b) ++bad;
  }
  v.expect(bad == 0, std::to_string(bad) + " frames failed the roundtrip");
  oracle::TempDir dir("accept-codec");
  int dump_bad = 0;
  for (int i = 0; i < 20; ++i) {
    const int h = static_cast<int>(rng.uniform_int(1, 16)), w = static_cast<int>(rng.uniform_int(1, 16));
    const int c = rng.bernoulli(0.5) ? 3 : 1;
    std::vector<Frame> frames;
    for (int t = 0; t < 1 + i % 5; ++t) {
      if (i % 2) {
        std::vector<float> data(static_cast<std::size_t>(h * w * c));
        for (float& x : data) x = static_cast<float>(rng.uniform(-200, 200));
        frames.emplace_back(h, w, c, std::move(data));
      } else {
        frames.push_back(noise_frame(rng, h, w, c));
      }
    }
    const Clip clip(std::move(frames));
    const auto path = dir.path() / ("c" + std::to_string(i) + ".vipc");
    write_file(path, encode_clip_dump(clip));
    const Bytes disk = read_file(path);
    const Clip back = decode_clip_dump(disk);
    if (!(back == clip) || encode_clip_dump(back) != disk) ++dump_bad;
  }
  v.expect(dump_bad == 0, std::to_string(dump_bad) + " VIPC dumps did not reload bit-exact");
  v.summary = "1000 frames identical after decode(encode); 20 VIPC dumps (u8 and f32) bit-exact";
  return v;
}

// --- config --------------------------------------------------------------

Verdict config_semantics() {
  Verdict v;
  ::unsetenv("VIPPIPE_SEED");
  int keys = 0;
  for (const auto& row : cases::key_cases()) {
    ++keys;
    const RunConfig base = config_from_yaml(row.context);
    const RunConfig file = config_from_yaml(row.context + row.key + ": " + row.file_value + "\n");
    const RunConfig cli = config_from_yaml(row.context + row.key + ": " + row.cli_value + "\n");
    const RunConfig both =
        config_from_yaml(row.context + row.key + ": " + row.file_value + "\n", {row.key + "=" + row.cli_value});
    v.expect(!(file == base), row.key + ": file value did not replace the default");
    v.expect(both == cli && !(both == file), row.key + ": CLI did not beat the file");
  }
  for (const auto& key : known_config_keys()) {
    bool found = false;
    for (const auto& row : cases::key_cases()) found |= row.key == key;
    v.expect(found, key + ": no precedence case");
  }
  const RunConfig extra = config_from_yaml("my_custom: 5\nnested: {a: [1, 2]}\n", {"from_cli=x"});
  v.expect(extra.extras["my_custom"] == 5 && extra.extras["nested"]["a"] == Json::array({1, 2}) &&
               extra.extras["from_cli"] == "x",
           "extras bag lost values");
  oracle::TempDir dir("accept-cfg");
  write_config_snapshot(dir.path() / "snap.yaml", extra);
  v.expect(load_config(dir.path() / "snap.yaml") == extra, "snapshot of extras config does not reload equal");
  const RunConfig full = config_from_yaml(
      "clip_length: 16\ncrop_shape: [112,112]\ncrop_type: Random\nresize_shape: [128,171]\nlr: 0.0001\n"
      "milestones: [10,20]\npretrained: 1\nseed: 999\nsubtract_mean: ''\n",
      {"lr=0.01", "rotation_degrees=12.5", "note=kept"});
  write_config_snapshot(dir.path() / "full.yaml", full);
  v.expect(load_config(dir.path() / "full.yaml") == full, "snapshot does not reproduce the effective config");
  v.summary = std::to_string(keys) + " keys CLI > file > default; extras and snapshot roundtrip";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"clip-planner oracle sweep", clip_sweep},
      {"transform/box commutation", transform_commutation},
      {"metric values", metric_values},
      {"pseudo-batch equivalence", pseudo_batch_equivalence},
      {"determinism suite", determinism},
      {"end-to-end synthetic training", end_to_end},
      {"codec roundtrip", codec_roundtrip},
      {"config semantics", config_semantics},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = v.failures.empty();
    failed += !ok;
    std::printf("%s  %-32s %s\n", ok ? "PASS" : "FAIL", c.name, v.summary.c_str());
    for (const auto& f : v.failures) std::printf("      - %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
