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

#include <compare>
#include <vector>

#include <Eigen/Core>

#include "seld/tensor.hpp"

namespace seld {

inline constexpr int kNumClasses = 13;
inline constexpr int kSampleRate = 24000;
inline constexpr int kNumFoaChannels = 4;
inline constexpr Index kWindowLength = 512;
inline constexpr Index kHopLength = 300;
inline constexpr Index kFeatureBins = 200;
inline constexpr Index kFeatureChannels = 7;
/// 100 ms label frame over a 12.5 ms feature hop.
inline constexpr Index kFeatureFramesPerLabelFrame = 8;
/// Label frames per scoring segment (1 s).
inline constexpr int kLabelFramesPerSegment = 10;

/// FOA channel indices in ACN order.
enum FoaChannel : Index { kW = 0, kY = 1, kZ = 2, kX = 3 };

/// Four-channel ambisonic waveform, rows in ACN order (W, Y, Z, X).
struct MultichannelClip {
  Eigen::MatrixXf samples;  // 4 x N
  int sample_rate = kSampleRate;

  Index num_samples() const noexcept { return samples.cols(); }
};

/// One active event in one 100 ms label frame.
struct Event {
  int frame = 0;
  int class_id = 0;
  double azimuth = 0.0;    // degrees, [-180, 180)
  double elevation = 0.0;  // degrees, [-90, 90]

  friend auto operator<=>(const Event&, const Event&) = default;
};

using EventList = std::vector<Event>;

using FeatureTensor = Tensor3<float>;
/// (x, y, z) x classes x label frames. Kept in double so that DoA
/// round trips through the tensor stay well below a micro-degree.
using AccdoaTensor = Tensor3<double>;

inline Index label_frames_for(Index feature_frames) {
  return feature_frames / kFeatureFramesPerLabelFrame;
}

}  // namespace seld
