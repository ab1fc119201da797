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

#include <cstdint>

#include "seld/types.hpp"

namespace seld {

/// Far-field plane wave in FOA: W is Gaussian noise and the dipoles are its
/// projections, X = W cos(az)cos(el), Y = W sin(az)cos(el), Z = W sin(el).
MultichannelClip plane_wave_clip(double azimuth, double elevation, Index num_samples, std::uint64_t seed,
                                 double amplitude = 0.1);

struct SyntheticScene {
  MultichannelClip clip;
  EventList labels;
};

/// Two-second, two-class test scene: a static source (class 1 at 40/20 deg)
/// and a source moving in azimuth (class 4). Labels cover the 19 label
/// frames that fit the 159 STFT frames of the clip.
SyntheticScene make_demo_scene(std::uint64_t seed = 17);

}  // namespace seld
