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
#include <utility>

#include <Eigen/Core>

#include "seld/types.hpp"

namespace seld {

struct Doa {
  double azimuth = 0.0;    // degrees, [-180, 180)
  double elevation = 0.0;  // degrees, [-90, 90]
};

/// sin/cos in degrees, exact at multiples of 90.
double sin_deg(double degrees);
double cos_deg(double degrees);

/// x = cos(el)cos(az), y = cos(el)sin(az), z = sin(el).
Eigen::Vector3d doa_to_unit_vector(double azimuth, double elevation);
/// Azimuth is 0 at the poles. Throws ZeroVector for |v| <= 1e-9.
Doa unit_vector_to_doa(const Eigen::Vector3d& v);

AccdoaTensor encode(const EventList& events, Index n_frames, int n_classes = kNumClasses);

/// A (class, frame) is active iff its vector norm is strictly greater than
/// `threshold`. DoAs keep full precision.
EventList decode(const AccdoaTensor& tensor, double threshold = 0.5);

/// Rounds DoAs to whole degrees for CSV emission.
EventList round_doas(EventList events);

/// Elementwise mean. Each element's contributions are sorted before they
/// are accumulated, which makes the result independent of argument order
/// and exact for identical inputs.
AccdoaTensor ensemble_average(std::span<const AccdoaTensor> tensors);

/// Same (frame, class) sets with DoAs within `tolerance_deg` of each other.
bool events_match(const EventList& a, const EventList& b, double tolerance_deg);

double angular_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

}  // namespace seld
