// Copyright 2026 The seldkit Authors
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


#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "seld/accdoa.hpp"
#include "seld/dataset_io.hpp"
#include "seld/features.hpp"
#include "seld/metrics.hpp"
#include "seld/se_block.hpp"
#include "seld/synth.hpp"

namespace seld::cli {
namespace {

/// Runs fn(i) for i in [0, n) over `threads` workers pulling from a shared
/// counter.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const auto count = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < std::min(count, n); ++t) pool.emplace_back(worker);
  worker();
}

AccdoaTensor load_labels(const fs::path& path, Index feature_frames, int n_classes) {
  if (has_slsa_magic(path)) return read_accdoa_file(path);
  return encode(read_label_csv(path, n_classes), label_frames_for(feature_frames), n_classes);
}

fs::path with_extension(fs::path p, const char* ext) {
  p.replace_extension(ext);
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_extract(const RunConfig& run) {
  const DatasetManifest manifest = read_manifest(run.manifest, run.n_classes);
  if (manifest.entries.empty()) throw Error(Errc::EmptyManifest, run.manifest.string() + " has no entries");
  fs::create_directories(run.out_dir);

  std::vector<fs::path> outputs;
  for (const auto& entry : manifest.entries) {
    fs::path out = run.out_dir / entry.audio.filename();
    out.replace_extension(".slsa");
    if (std::find(outputs.begin(), outputs.end(), out) != outputs.end())
      throw Error(Errc::InvalidArgument, "two manifest entries map to " + out.string());
    outputs.push_back(std::move(out));
  }

  const std::size_t n = manifest.entries.size();
  std::vector<FeatureTensor> features(n);
  std::vector<std::string> failures(n);
  parallel_for(n, run.threads, [&](std::size_t i) {
    try {
      features[i] = salsa(read_foa_wav(manifest.entries[i].audio));
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < n; ++i)
    if (!failures[i].empty()) std::cerr << "error: " << manifest.entries[i].audio.string() << ": " << failures[i] << '\n';

  std::optional<NormStats> stats;
  if (!run.stats.empty()) {
    if (fs::exists(run.stats) && !run.refit_stats) {
      stats = read_norm_stats(run.stats);
    } else {
      std::vector<FeatureTensor> ok;
      for (std::size_t i = 0; i < n; ++i)
        if (failures[i].empty()) ok.push_back(features[i]);
      stats = compute_norm_stats(ok);
      write_norm_stats(*stats, run.stats);
      std::cout << "wrote normalization stats " << run.stats.string() << '\n';
    }
  }

  std::vector<std::string> write_failures(n);
  parallel_for(n, run.threads, [&](std::size_t i) {
    if (!failures[i].empty()) return;
    try {
      write_feature_file(stats ? normalize(features[i], *stats) : features[i], outputs[i]);
    } catch (const std::exception& e) {
      write_failures[i] = e.what();
    }
  });
  int failed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!write_failures[i].empty()) {
      std::cerr << "error: " << outputs[i].string() << ": " << write_failures[i] << '\n';
      ++failed;
    } else if (!failures[i].empty()) {
      ++failed;
    } else {
      std::cout << outputs[i].string() << " (7x" << features[i].bins() << "x" << features[i].frames() << ")\n";
    }
  }
  return failed == 0 ? kSuccess : kInputError;
}

int cmd_stats(const RunConfig& run) {
  NormStats stats;
  if (!run.manifest.empty()) {
    stats = compute_norm_stats(read_manifest(run.manifest, run.n_classes));
  } else {
    std::vector<FeatureTensor> tensors(run.inputs.size());
    parallel_for(run.inputs.size(), run.threads, [&](std::size_t i) { tensors[i] = read_feature_file(run.inputs[i]); });
    stats = compute_norm_stats(tensors);
  }
  write_norm_stats(stats, run.output);
  std::cout << "wrote " << run.output.string() << " (" << stats.mean.rows() << "x" << stats.mean.cols() << ")\n";
  return kSuccess;
}

int cmd_augment(const RunConfig& run) {
  AugmentConfig config = run.augment;
  if (!run.config_file.empty()) {
    std::ifstream in(run.config_file);
    if (!in) throw Error(Errc::IoError, "cannot open " + run.config_file.string());
    config = parse_augment_config(in, config);
  }
  for (const auto& [key, value] : run.config_overrides) set_config_value(config, key, value);
  config.validate();
  for (const auto& w : config_warnings(config)) std::cerr << "warning: " << w << '\n';

  Sample a;
  a.features = read_feature_file(run.features);
  a.labels = load_labels(run.labels, a.features.frames(), run.n_classes);
  Sample b = a;
  if (!run.partner_features.empty()) {
    b.features = read_feature_file(run.partner_features);
    b.labels = run.partner_labels.empty()
                   ? AccdoaTensor(3, run.n_classes, label_frames_for(b.features.frames()))
                   : load_labels(run.partner_labels, b.features.frames(), run.n_classes);
  } else if (config.mm_prob > 0.0) {
    std::cerr << "warning: no mixup partner given; moderate mixup will mix the sample with itself\n";
  }

  SeededRng rng(config.seed);
  const AugmentResult result = augment_pipeline(a, b, config, rng);
  write_feature_file(result.sample.features, run.out_features);
  write_accdoa_file(result.sample.labels, run.out_labels);

  const AugmentTrace& t = result.trace;
  std::cout << "seed=" << config.seed << " mode=" << to_string(config.mode);
  std::cout << " cs=" << (t.swap_pattern ? std::to_string(*t.swap_pattern) : "-");
  std::cout << " ps=" << t.pitch_shift;
  std::cout << " fs=" << (t.frame_offset ? std::to_string(*t.frame_offset) : "-");
  std::cout << " tm=" << (t.time_mask ? std::to_string(t.time_mask->first) + "+" + std::to_string(t.time_mask->second) : "-");
  std::cout << " mm=" << (t.lambda ? std::to_string(*t.lambda) : "-") << '\n';
  return kSuccess;
}

int cmd_encode(const RunConfig& run) {
  Index frames = run.frames;
  if (!run.features.empty()) frames = label_frames_for(read_feature_file(run.features).frames());
  if (frames < 0) throw Error(Errc::InvalidArgument, "give --frames or --features");
  const AccdoaTensor tensor = encode(read_label_csv(run.labels, run.n_classes), frames, run.n_classes);
  write_accdoa_file(tensor, run.output);
  std::cout << run.output.string() << " (3x" << tensor.bins() << "x" << tensor.frames() << ")\n";
  return kSuccess;
}

int cmd_decode(const RunConfig& run) {
  const EventList events = round_doas(decode(read_accdoa_file(run.pred), run.threshold));
  write_label_csv(events, run.output);
  std::cout << run.output.string() << " (" << events.size() << " events)\n";
  return kSuccess;
}

int cmd_score(const RunConfig& run) {
  ScoreOptions options;
  options.n_classes = run.n_classes;
  options.averaging = run.micro ? Averaging::Micro : Averaging::Macro;
  const EventList refs = read_label_csv(run.ref, run.n_classes);
  const bool pred_is_tensor = has_slsa_magic(run.pred);

  if (run.threshold_sweep) {
    if (!pred_is_tensor)
      throw Error(Errc::InvalidArgument, "--threshold-sweep needs an ACCDOA tensor prediction, not a CSV");
    const auto rows = threshold_sweep(read_accdoa_file(run.pred), refs, run.thresholds, options);
    write_sweep_table(rows, std::cout);
    if (!run.report.empty()) {
      std::ostringstream csv;
      write_sweep_csv(rows, csv);
      write_file_atomic(run.report, csv.str());
    }
    return kSuccess;
  }

  const EventList preds = pred_is_tensor ? decode(read_accdoa_file(run.pred), run.threshold)
                                         : read_label_csv(run.pred, run.n_classes);
  const SeldScores scores = compute_seld_scores(preds, refs, options);
  std::cout << summary_line(scores) << '\n';
  if (scores.er_undefined) std::cerr << "note: no reference events; ER reported as 0\n";
  if (!run.report.empty()) {
    std::ostringstream csv;
    write_score_csv(scores, csv);
    write_file_atomic(run.report, csv.str());
  }
  return kSuccess;
}

int cmd_gradcheck(const RunConfig& run) {
  Index dims[3] = {0, 0, 0};
  {
    std::istringstream ss(run.shape);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
      if (i == 3) throw Error(Errc::InvalidArgument, "--shape takes C,F,T");
      dims[i++] = std::stol(part);
    }
    if (i != 3 || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
      throw Error(Errc::InvalidArgument, "--shape takes three positive sizes C,F,T");
  }
  if (run.ratio <= 0 || run.seeds <= 0) throw Error(Errc::InvalidArgument, "--ratio and --seeds must be positive");
  const Index c = dims[0], f = dims[1], t = dims[2];
  const Index rc = effective_ratio(c, run.ratio);
  const Index rf = effective_ratio(f, run.ratio);
  if (rc != run.ratio || rf != run.ratio)
    std::cout << "note: ratio " << run.ratio << " reduced to " << rc << " (channel) / " << rf
              << " (frequency) to divide the squeezed size\n";

  struct Variant {
    const char* name;
    SeOperator<double> op;
    std::vector<std::pair<Index, Index>> blocks;  // (d, r)
  };
  std::vector<Variant> variants = {
      {"channel", channel_se_operator<double>(), {{c, rc}}},
      {"frequency", freq_se_operator<double>(), {{f, rf}}},
      {"multi-dim", multi_dim_se_operator<double>(), {{f, rf}, {c, rc}}},
  };
  if (run.corrupt_backward) {
    for (auto& v : variants) {
      auto backward = v.op.backward;
      v.op.backward = [backward](const auto& x, const auto& p, const auto& gy) {
        auto g = backward(x, p, gy);
        g.params.at(0).b2 *= 1.01;
        return g;
      };
    }
  }

  constexpr double kTolerance = 1e-6;
  GradcheckOptions options;
  options.eps = run.eps;
  bool all_pass = true;
  int checks = 0;
  for (const auto& v : variants) {
    double worst = 0.0;
    for (int s = 0; s < run.seeds; ++s) {
      SeededRng rng(run.seed + static_cast<std::uint64_t>(s));
      Tensor3<double> x(c, f, t);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index i = 0; i < x.size(); ++i) x.values()[i] = normal(rng);
      std::vector<SeParams<double>> params;
      for (auto [d, r] : v.blocks) params.push_back(SeParams<double>::Random(d, r, rng));
      worst = std::max(worst, gradcheck(v.op, x, params, options).max_relative_error);
      ++checks;
    }
    const bool pass = worst < kTolerance;
    all_pass = all_pass && pass;
    std::cout << v.name << ": " << (pass ? "PASS" : "FAIL") << " max_rel_err " << worst << (pass ? " < " : " >= ")
              << kTolerance << '\n';
  }
  std::cout << checks << " checks total (" << run.seeds << " seeds x 3 variants)\n";
  return all_pass ? kSuccess : kInternalError;
}

int cmd_ensemble(const RunConfig& run) {
  if (run.inputs.empty()) throw Error(Errc::EmptyEnsemble, "no input tensors");
  std::vector<AccdoaTensor> members(run.inputs.size());
  parallel_for(run.inputs.size(), run.threads, [&](std::size_t i) { members[i] = read_accdoa_file(run.inputs[i]); });
  const AccdoaTensor mean = ensemble_average(members);
  write_accdoa_file(mean, run.output);
  const fs::path csv = run.out_csv.empty() ? with_extension(run.output, ".csv") : run.out_csv;
  const EventList events = round_doas(decode(mean, run.threshold));
  write_label_csv(events, csv);
  std::cout << run.output.string() << " (" << members.size() << " members), " << csv.string() << " ("
            << events.size() << " events)\n";
  return kSuccess;
}

int cmd_synth(const RunConfig& run) {
  fs::create_directories(run.out_dir);
  const SyntheticScene scene = make_demo_scene(run.seed);
  write_wav(run.out_dir / "scene.wav", scene.clip, WavSampleFormat::Float32);
  write_label_csv(scene.labels, run.out_dir / "scene.csv");
  write_file_atomic(run.out_dir / "manifest.txt", "scene.wav,scene.csv,test\n");
  std::cout << "wrote scene.wav, scene.csv, manifest.txt to " << run.out_dir.string() << '\n';
  return kSuccess;
}

}  // namespace seld::cli
