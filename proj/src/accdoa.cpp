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


#include "seld/accdoa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Geometry>

#include "seld/dataset_io.hpp"

namespace seld {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

double sin_deg(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0.0) r += 360.0;
  if (r == 0.0 || r == 180.0) return 0.0;
  if (r == 90.0) return 1.0;
  if (r == 270.0) return -1.0;
  return std::sin(degrees * kDegToRad);
}

double cos_deg(double degrees) { return sin_deg(degrees + 90.0); }

Eigen::Vector3d doa_to_unit_vector(double azimuth, double elevation) {
  if (!(elevation >= -90.0 && elevation <= 90.0))
    throw Error(Errc::ElevationOutOfRange, "elevation must lie in [-90, 90]");
  const double ce = cos_deg(elevation);
  return {ce * cos_deg(azimuth), ce * sin_deg(azimuth), sin_deg(elevation)};
}

Doa unit_vector_to_doa(const Eigen::Vector3d& v) {
  const double norm = v.norm();
  if (!(norm > 1e-9)) throw Error(Errc::ZeroVector, "cannot take the direction of a zero vector");
  Doa doa;
  const double horizontal = std::hypot(v.x(), v.y());
  doa.azimuth = horizontal == 0.0 ? 0.0 : wrap_azimuth(std::atan2(v.y(), v.x()) * kRadToDeg);
  doa.elevation = std::atan2(v.z(), horizontal) * kRadToDeg;
  return doa;
}

AccdoaTensor encode(const EventList& events, Index n_frames, int n_classes) {
  validate_events(events, n_classes);
  AccdoaTensor out(3, n_classes, n_frames);
  std::vector<bool> taken(static_cast<std::size_t>(n_classes * n_frames), false);
  for (const Event& e : events) {
    if (e.frame >= n_frames)
      throw Error(Errc::FrameOutOfRange,
                  "frame " + std::to_string(e.frame) + " >= " + std::to_string(n_frames));
    auto slot = static_cast<std::size_t>(e.class_id * n_frames + e.frame);
    if (taken[slot])
      throw Error(Errc::SameClassOverlap, "class " + std::to_string(e.class_id) + " twice in frame " +
                                              std::to_string(e.frame));
    taken[slot] = true;
    const Eigen::Vector3d v = doa_to_unit_vector(e.azimuth, e.elevation);
    for (Index axis = 0; axis < 3; ++axis) out(axis, e.class_id, e.frame) = v[axis];
  }
  return out;
}

EventList decode(const AccdoaTensor& tensor, double threshold) {
  if (!(threshold > 0.0)) throw Error(Errc::InvalidArgument, "threshold must be > 0");
  if (tensor.channels() != 3) throw Error(Errc::ShapeMismatch, "ACCDOA tensor must have 3 axes");
  EventList events;
  for (Index t = 0; t < tensor.frames(); ++t) {
    for (Index c = 0; c < tensor.bins(); ++c) {
      const Eigen::Vector3d v(tensor(0, c, t), tensor(1, c, t), tensor(2, c, t));
      if (!(v.norm() > threshold)) continue;
      const Doa doa = unit_vector_to_doa(v);
      events.push_back({static_cast<int>(t), static_cast<int>(c), doa.azimuth, doa.elevation});
    }
  }
  return events;
}

EventList round_doas(EventList events) {
  for (Event& e : events) {
    e.azimuth = wrap_azimuth(std::round(e.azimuth));
    e.elevation = std::round(e.elevation);
  }
  return canonicalize(std::move(events));
}

AccdoaTensor ensemble_average(std::span<const AccdoaTensor> tensors) {
  if (tensors.empty()) throw Error(Errc::EmptyEnsemble, "no tensors to average");
  for (const auto& t : tensors) require_same_shape(t, tensors.front(), "ensemble members differ in shape");

  const auto n = static_cast<double>(tensors.size());
  AccdoaTensor out(tensors.front().channels(), tensors.front().bins(), tensors.front().frames());
  std::vector<double> column(tensors.size());
  for (Index i = 0; i < out.size(); ++i) {
    for (std::size_t m = 0; m < tensors.size(); ++m) column[m] = tensors[m].values()[i];
    std::sort(column.begin(), column.end());
    const double base = column.front();
    double offset = 0.0;
    for (double v : column) offset += v - base;
    out.values()[i] = base + offset / n;
  }
  return out;
}

double angular_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(Errc::ZeroVector, "angular distance of a zero vector");
  // atan2 form of arccos(clamp(a.b / |a||b|)); stays accurate near 0 and 180.
  return std::atan2(a.cross(b).norm(), a.dot(b)) * kRadToDeg;
}

bool events_match(const EventList& a, const EventList& b, double tolerance_deg) {
  if (a.size() != b.size()) return false;
  auto key = [](const Event& e) { return std::pair(e.frame, e.class_id); };
  EventList sa = a, sb = b;
  auto by_key = [&](const Event& x, const Event& y) { return key(x) < key(y); };
  std::stable_sort(sa.begin(), sa.end(), by_key);
  std::stable_sort(sb.begin(), sb.end(), by_key);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (key(sa[i]) != key(sb[i])) return false;
    const double d = angular_distance(doa_to_unit_vector(sa[i].azimuth, sa[i].elevation),
                                      doa_to_unit_vector(sb[i].azimuth, sb[i].elevation));
    if (!(d <= tolerance_deg)) return false;
  }
  return true;
}

}  // namespace seld
