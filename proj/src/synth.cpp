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


#include "seld/synth.hpp"

#include <random>

#include "seld/accdoa.hpp"
#include "seld/dataset_io.hpp"
#include "seld/rng.hpp"

namespace seld {

MultichannelClip plane_wave_clip(double azimuth, double elevation, Index num_samples, std::uint64_t seed,
                                 double amplitude) {
  const Eigen::Vector3d dir = doa_to_unit_vector(azimuth, elevation);
  SeededRng rng(seed);
  std::normal_distribution<double> noise(0.0, amplitude);
  MultichannelClip clip;
  clip.samples.resize(kNumFoaChannels, num_samples);
  for (Index n = 0; n < num_samples; ++n) {
    const double w = noise(rng);
    clip.samples(kW, n) = static_cast<float>(w);
    clip.samples(kY, n) = static_cast<float>(w * dir.y());
    clip.samples(kZ, n) = static_cast<float>(w * dir.z());
    clip.samples(kX, n) = static_cast<float>(w * dir.x());
  }
  return clip;
}

SyntheticScene make_demo_scene(std::uint64_t seed) {
  constexpr Index kSamples = 2 * kSampleRate;
  constexpr Index kLabelHop = kSampleRate / 10;
  const Index label_frames = label_frames_for((kSamples - kWindowLength) / kHopLength + 1);

  SyntheticScene scene;
  for (int l = 0; l < label_frames; ++l) scene.labels.push_back({l, 1, 40.0, 20.0});
  for (int l = 2; l <= 15; ++l) scene.labels.push_back({l, 4, -60.0 + 7.0 * (l - 2), 10.0});
  scene.labels = canonicalize(scene.labels);

  SeededRng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(kNumFoaChannels, kSamples);
  const double gains[] = {0.08, 0.05};
  for (const Event& e : scene.labels) {
    const Eigen::Vector3d dir = doa_to_unit_vector(e.azimuth, e.elevation);
    const double gain = e.class_id == 1 ? gains[0] : gains[1];
    for (Index n = e.frame * kLabelHop; n < (e.frame + 1) * kLabelHop && n < kSamples; ++n) {
      const double w = gain * noise(rng);
      mix(kW, n) += w;
      mix(kY, n) += w * dir.y();
      mix(kZ, n) += w * dir.z();
      mix(kX, n) += w * dir.x();
    }
  }
  scene.clip.samples = mix.cast<float>();
  return scene;
}

}  // namespace seld
