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

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "seld/error.hpp"
#include "seld/rng.hpp"
#include "seld/types.hpp"

namespace seld {

// ---------------------------------------------------------------------------
// Channel swap
//
// Sixteen FOA-domain transforms: az -> s*az + k*90, el -> e*el. On the
// horizontal plane each is a signed permutation of (x, y):
//
//   x' = sign_x * (swap_xy ? y : x)
//   y' = sign_y * (swap_xy ? x : y)
//   z' = z_sign * z

struct SwapPattern {
  bool swap_xy = false;
  int sign_x = 1;
  int sign_y = 1;
  int z_sign = 1;
  // label map
  int az_sign = 1;     // s
  int az_quarter = 0;  // k, 0..3
  int el_sign = 1;     // e

  Eigen::Matrix3d matrix() const;
  double map_azimuth(double azimuth) const;
  double map_elevation(double elevation) const;

  friend bool operator==(const SwapPattern&, const SwapPattern&) = default;
};

/// Pattern 0 is the identity; order is (el_sign, az_sign, az_quarter).
const std::vector<SwapPattern>& enumerate_swap_patterns();
SwapPattern make_swap_pattern(int az_sign, int az_quarter, int el_sign);
/// `second` applied after `first`.
SwapPattern compose(const SwapPattern& first, const SwapPattern& second);
SwapPattern inverse(const SwapPattern& p);
int pattern_index(const SwapPattern& p);

FeatureTensor swap_feature_channels(const FeatureTensor& features, const SwapPattern& p);
AccdoaTensor swap_label_axes(const AccdoaTensor& labels, const SwapPattern& p);
std::pair<FeatureTensor, AccdoaTensor> channel_swap(const FeatureTensor& features, const AccdoaTensor& labels,
                                                    const SwapPattern& p);
/// The same transform on a raw ACN (W, Y, Z, X) waveform.
MultichannelClip apply_pattern_to_waveform(const MultichannelClip& clip, const SwapPattern& p);

// ---------------------------------------------------------------------------
// Frequency and time

/// Shifts every channel along frequency by `shift_bins` (positive = up),
/// replicating the boundary row into vacated bins.
FeatureTensor pitch_shift(const FeatureTensor& features, int shift_bins, int max_shift = 10);

/// Circular shift by `offset` feature frames (a multiple of 8) over the
/// label-aligned span 8*T_label; labels move by offset/8. Feature frames
/// past the span are left in place.
std::pair<FeatureTensor, AccdoaTensor> frame_shift(const FeatureTensor& features, const AccdoaTensor& labels,
                                                   Index offset);

/// Zeros features in [start, start+length) and the label frames it covers.
/// Bounds must be label-frame aligned and length/T within [ratio_min, ratio_max].
std::pair<FeatureTensor, AccdoaTensor> time_mask(const FeatureTensor& features, const AccdoaTensor& labels,
                                                 Index start, Index length, double ratio_min = 1.0 / 20.0,
                                                 double ratio_max = 1.0 / 10.0);

// ---------------------------------------------------------------------------
// Moderate Mixup

/// lambda*a + (1-lambda)*b on features; the label of the dominant input
/// (a on ties) is copied through unmixed.
std::pair<FeatureTensor, AccdoaTensor> moderate_mixup(const FeatureTensor& feat_a, const AccdoaTensor& lab_a,
                                                      const FeatureTensor& feat_b, const AccdoaTensor& lab_b,
                                                      double lambda);

/// Draw from Beta(alpha, alpha).
double sample_lambda(SeededRng& rng, double alpha = 0.2);

// ---------------------------------------------------------------------------
// Pipeline

enum class AugmentMode { FsMm, TmMm, All, Custom };

struct AugmentConfig {
  double cs_prob = 0.5;
  int ps_range = 10;
  double fs_prob = 0.5;
  double tm_prob = 0.5;
  double tm_ratio_min = 1.0 / 20.0;
  double tm_ratio_max = 1.0 / 10.0;
  double mm_prob = 0.5;
  double mm_beta_alpha = 0.2;
  AugmentMode mode = AugmentMode::FsMm;
  std::uint64_t seed = 17;

  /// Every stochastic stage off; the pipeline is then the identity.
  static AugmentConfig identity();

  bool frame_shift_enabled() const;
  bool time_mask_enabled() const;
  void validate() const;
};

AugmentMode parse_mode(const std::string& text);
std::string to_string(AugmentMode mode);

/// Applies one `key=value` setting. Unknown keys throw InvalidArgument.
void set_config_value(AugmentConfig& config, const std::string& key, const std::string& value);
/// Flat key=value lines, '#' comments.
AugmentConfig parse_augment_config(std::istream& in, AugmentConfig base = {});
std::string format_augment_config(const AugmentConfig& config);

/// Human-readable cautions about a config (e.g. frame shift and time
/// masking together, which degraded results in the reference experiments).
std::vector<std::string> config_warnings(const AugmentConfig& config);

struct Sample {
  FeatureTensor features;
  AccdoaTensor labels;
};

/// What the pipeline did; unset fields mean the stage was skipped.
struct AugmentTrace {
  std::optional<int> swap_pattern;
  int pitch_shift = 0;
  std::optional<Index> frame_offset;
  std::optional<std::pair<Index, Index>> time_mask;  // start, length
  std::optional<double> lambda;
};

struct AugmentResult {
  Sample sample;
  AugmentTrace trace;
};

/// CS -> PS -> FS and/or TM (per mode) -> MM, each gated by its probability.
AugmentResult augment_pipeline(const Sample& a, const Sample& b, const AugmentConfig& config, SeededRng& rng);

}  // namespace seld
