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


#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "seld/dataset_io.hpp"
#include "seld/types.hpp"

namespace seld {

/// Per-channel one-sided STFT, each matrix bins x frames.
struct ComplexSpectrogram {
  std::vector<Eigen::MatrixXcd> channels;
  Index window_length = kWindowLength;
  Index hop = kHopLength;

  Index bins() const { return channels.empty() ? 0 : channels.front().rows(); }
  Index frames() const { return channels.empty() ? 0 : channels.front().cols(); }
};

/// Periodic Hann window.
Eigen::VectorXd hann_window(Index length);

inline Index num_stft_frames(Index num_samples, Index window_length = kWindowLength,
                             Index hop = kHopLength) {
  return num_samples < window_length ? 0 : (num_samples - window_length) / hop + 1;
}

/// Frame t covers samples [t*hop, t*hop + window_length); no padding.
ComplexSpectrogram stft(const MultichannelClip& clip, Index window_length = kWindowLength,
                        Index hop = kHopLength);

/// ln(max(|X|^2, floor)) over the lowest n_bins bins -> (channels, n_bins, T).
FeatureTensor log_linear_spectrogram(const ComplexSpectrogram& spec, Index n_bins = kFeatureBins,
                                     double floor = 1e-10);

struct SmoothingWindow {
  Index freq = 3;
  Index time = 3;
};

/// Principal-eigenvector direction cue -> (3, n_bins, T) in (Ix, Iy, Iz)
/// order. Each bin's vector has norm <= 1; degenerate bins are zero.
FeatureTensor eigenvector_intensity(const ComplexSpectrogram& spec, Index n_bins = kFeatureBins,
                                    SmoothingWindow smooth = {});

struct SalsaConfig {
  Index window_length = kWindowLength;
  Index hop = kHopLength;
  Index n_bins = kFeatureBins;
  double floor = 1e-10;
  SmoothingWindow smooth;
};

/// 4 log-spectrogram channels (W, Y, Z, X) stacked over 3 intensity
/// channels (Ix, Iy, Iz).
FeatureTensor salsa(const MultichannelClip& clip, const SalsaConfig& config = {});

// ---------------------------------------------------------------------------
// normalization

struct NormStats {
  Eigen::ArrayXXf mean;  // channels x bins
  Eigen::ArrayXXf std;   // channels x bins, floored at kStdFloor

  static constexpr float kStdFloor = 1e-8f;
};

/// Population mean/std per (channel, bin) pooled over every frame of every
/// tensor. Throws EmptyManifest on an empty set.
NormStats compute_norm_stats(std::span<const FeatureTensor> tensors);
/// Extracts SALSA for each manifest clip and fits stats over them.
NormStats compute_norm_stats(const DatasetManifest& manifest, const SalsaConfig& config = {});

FeatureTensor normalize(const FeatureTensor& tensor, const NormStats& stats);

/// Serialized as an SLSA tensor of dims (2, channels, bins): mean then std.
void write_norm_stats(const NormStats& stats, const fs::path& path);
NormStats read_norm_stats(const fs::path& path);

}  // namespace seld
