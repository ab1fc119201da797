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

#include <array>
#include <cstddef>

#include <Eigen/Core>

#include "seld/error.hpp"

namespace seld {

using Index = Eigen::Index;

/// Dense rank-3 array stored row-major as (channel, frequency, time).
///
/// Each channel is exposed as an F x T Eigen map so per-plane work stays
/// inside Eigen expressions; the flat storage matches the on-disk payload
/// order of the SLSA container.
template <typename Scalar>
class Tensor3 {
 public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using PlaneMap = Eigen::Map<Plane>;
  using ConstPlaneMap = Eigen::Map<const Plane>;

  Tensor3() = default;
  Tensor3(Index channels, Index bins, Index frames)
      : c_(channels), f_(bins), t_(frames), data_(Storage::Zero(channels * bins * frames)) {
    if (channels < 0 || bins < 0 || frames < 0)
      throw Error(Errc::InvalidArgument, "negative tensor dimension");
  }

  static Tensor3 Constant(Index channels, Index bins, Index frames, Scalar value) {
    Tensor3 out(channels, bins, frames);
    out.data_.setConstant(value);
    return out;
  }

  Index channels() const noexcept { return c_; }
  Index bins() const noexcept { return f_; }
  Index frames() const noexcept { return t_; }
  Index size() const noexcept { return data_.size(); }
  std::array<Index, 3> shape() const noexcept { return {c_, f_, t_}; }

  Scalar& operator()(Index c, Index f, Index t) { return data_[(c * f_ + f) * t_ + t]; }
  const Scalar& operator()(Index c, Index f, Index t) const { return data_[(c * f_ + f) * t_ + t]; }

  PlaneMap channel(Index c) { return PlaneMap(data_.data() + c * f_ * t_, f_, t_); }
  ConstPlaneMap channel(Index c) const { return ConstPlaneMap(data_.data() + c * f_ * t_, f_, t_); }

  Storage& values() noexcept { return data_; }
  const Storage& values() const noexcept { return data_; }

  bool same_shape(const Tensor3& other) const noexcept { return shape() == other.shape(); }

  bool all_finite() const { return data_.isFinite().all(); }

  template <typename Other>
  Tensor3<Other> cast() const {
    Tensor3<Other> out(c_, f_, t_);
    out.values() = data_.template cast<Other>();
    return out;
  }

  /// Exact elementwise equality (shape and values).
  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.same_shape(b) && (a.data_ == b.data_).all();
  }

 private:
  Index c_ = 0;
  Index f_ = 0;
  Index t_ = 0;
  Storage data_;
};

template <typename Scalar>
void require_same_shape(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b, const char* what) {
  if (!a.same_shape(b)) throw Error(Errc::ShapeMismatch, what);
}

}  // namespace seld
