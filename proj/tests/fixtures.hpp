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


// Random toy scenes for scorer tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "seld/rng.hpp"
#include "seld/types.hpp"

namespace fixtures {

inline std::pair<double, double> random_doa(seld::SeededRng& rng) {
  std::uniform_real_distribution<double> az(-180.0, 180.0), z(-1.0, 1.0);
  return {az(rng), std::asin(z(rng)) * 180.0 / std::numbers::pi};
}

// Rotates a DoA by `degrees` towards a random direction.
inline std::pair<double, double> perturb(seld::SeededRng& rng, std::pair<double, double> doa, double degrees) {
  const Eigen::Vector3d v = oracle::unit(doa.first, doa.second);
  Eigen::Vector3d u;
  do {
    const auto [a, e] = random_doa(rng);
    u = oracle::unit(a, e);
    u -= u.dot(v) * v;
  } while (u.norm() < 1e-3);
  u.normalize();
  const double t = oracle::rad(degrees);
  const Eigen::Vector3d w = std::cos(t) * v + std::sin(t) * u;
  const double az = std::atan2(w.y(), w.x()) * 180.0 / std::numbers::pi;
  const double el = std::asin(std::clamp(w.z(), -1.0, 1.0)) * 180.0 / std::numbers::pi;
  return {az >= 180.0 ? az - 360.0 : az, el};
}

struct Scene {
  seld::EventList preds;
  seld::EventList refs;
};

// Every (segment, class) cell holds at most four distinct DoAs on each side.
// Each DoA is spread over a disjoint set of frames within its segment.
inline Scene random_scene(seld::SeededRng& rng, int n_classes, int max_segments = 3) {
  Scene scene;
  std::uniform_int_distribution<int> n_seg(1, max_segments), n_ref(0, 4), extra(0, 2);
  std::uniform_real_distribution<double> unit01(0.0, 1.0), near(0.0, 18.0), far(22.0, 120.0);
  auto place = [&](seld::EventList& out, int seg, int cls, const std::vector<std::pair<double, double>>& doas) {
    std::vector<int> frames(10);
    for (int i = 0; i < 10; ++i) frames[i] = seg * 10 + i;
    std::shuffle(frames.begin(), frames.end(), rng);
    std::size_t next = 0;
    for (const auto& d : doas) {
      const int span = std::uniform_int_distribution<int>(1, 2)(rng);
      for (int k = 0; k < span && next < frames.size(); ++k) out.push_back({frames[next++], cls, d.first, d.second});
    }
  };
  const int segments = n_seg(rng);
  for (int seg = 0; seg < segments; ++seg) {
    for (int cls = 0; cls < n_classes; ++cls) {
      std::vector<std::pair<double, double>> refs, preds;
      const int nr = n_ref(rng);
      for (int i = 0; i < nr; ++i) refs.push_back(random_doa(rng));
      for (const auto& r : refs) {
        const double roll = unit01(rng);
        if (roll < 0.5) preds.push_back(perturb(rng, r, near(rng)));
        else if (roll < 0.75) preds.push_back(perturb(rng, r, far(rng)));
      }
      const int ne = extra(rng);
      for (int i = 0; i < ne && preds.size() < 4; ++i) preds.push_back(random_doa(rng));
      place(scene.refs, seg, cls, refs);
      place(scene.preds, seg, cls, preds);
    }
  }
  std::sort(scene.refs.begin(), scene.refs.end());
  std::sort(scene.preds.begin(), scene.preds.end());
  return scene;
}

}  // namespace fixtures
