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

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "seld/dataset_io.hpp"
#include "seld/rng.hpp"
#include "seld/tensor.hpp"

namespace seld {

/// Excitation MLP for a squeezed dimension of size d with bottleneck d/r:
/// s = sigmoid(w2 * relu(w1 * z + b1) + b2).
template <typename Scalar>
struct SeParams {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix w1;  // hidden x d
  Vector b1;  // hidden
  Matrix w2;  // d x hidden
  Vector b2;  // d

  static SeParams Zero(Index d, Index ratio) {
    if (ratio <= 0 || d <= 0 || d % ratio != 0)
      throw Error(Errc::InvalidArgument, "reduction ratio must divide the squeezed dimension");
    const Index hidden = d / ratio;
    return {Matrix::Zero(hidden, d), Vector::Zero(hidden), Matrix::Zero(d, hidden), Vector::Zero(d)};
  }

  /// Entries ~ N(0, weight_std^2) for weights and N(0, bias_std^2) for biases.
  static SeParams Random(Index d, Index ratio, SeededRng& rng, double weight_std = 0.5, double bias_std = 0.1) {
    SeParams p = Zero(d, ratio);
    std::normal_distribution<double> w(0.0, weight_std);
    std::normal_distribution<double> b(0.0, bias_std);
    for (Index i = 0; i < p.w1.size(); ++i) p.w1.data()[i] = static_cast<Scalar>(w(rng));
    for (Index i = 0; i < p.b1.size(); ++i) p.b1[i] = static_cast<Scalar>(b(rng));
    for (Index i = 0; i < p.w2.size(); ++i) p.w2.data()[i] = static_cast<Scalar>(w(rng));
    for (Index i = 0; i < p.b2.size(); ++i) p.b2[i] = static_cast<Scalar>(b(rng));
    return p;
  }

  template <typename Other>
  SeParams<Other> cast() const {
    return {w1.template cast<Other>(), b1.template cast<Other>(), w2.template cast<Other>(),
            b2.template cast<Other>()};
  }

  Index dim() const { return w1.cols(); }
  Index hidden() const { return w1.rows(); }
  Index num_values() const { return w1.size() + b1.size() + w2.size() + b2.size(); }

  void validate() const {
    const Index d = dim();
    const Index h = hidden();
    if (h <= 0 || d <= 0 || d % h != 0 || b1.size() != h || w2.rows() != d || w2.cols() != h || b2.size() != d)
      throw Error(Errc::ShapeMismatch, "inconsistent SE parameter shapes");
    if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite())
      throw Error(Errc::InvalidArgument, "non-finite SE parameters");
  }

  /// Flat view order: w1 (column-major), b1, w2, b2.
  Scalar& at(Index i) {
    if (i < w1.size()) return w1.data()[i];
    i -= w1.size();
    if (i < b1.size()) return b1[i];
    i -= b1.size();
    if (i < w2.size()) return w2.data()[i];
    return b2[i - w2.size()];
  }
  Scalar at(Index i) const { return const_cast<SeParams&>(*this).at(i); }
};

template <typename Scalar>
struct SeActivations {
  using Vector = typename SeParams<Scalar>::Vector;
  Vector squeeze;     // z
  Vector pre_hidden;  // w1 z + b1
  Vector hidden;      // relu
  Vector gate;        // sigmoid(w2 h + b2)
};

namespace detail {

template <typename Scalar>
SeActivations<Scalar> excite(const SeParams<Scalar>& p, const typename SeParams<Scalar>::Vector& z) {
  SeActivations<Scalar> a;
  a.squeeze = z;
  a.pre_hidden = p.w1 * z + p.b1;
  a.hidden = a.pre_hidden.cwiseMax(Scalar(0));
  const typename SeParams<Scalar>::Vector logits = p.w2 * a.hidden + p.b2;
  a.gate = logits.unaryExpr([](Scalar v) { return Scalar(1) / (Scalar(1) + std::exp(-v)); });
  return a;
}

/// Backprop through the excitation MLP given dL/ds; accumulates parameter
/// gradients into `grad` and returns dL/dz.
template <typename Scalar>
typename SeParams<Scalar>::Vector excite_backward(const SeParams<Scalar>& p, const SeActivations<Scalar>& a,
                                                  const typename SeParams<Scalar>::Vector& grad_gate,
                                                  SeParams<Scalar>& grad) {
  using Vector = typename SeParams<Scalar>::Vector;
  const Vector grad_logits = grad_gate.cwiseProduct(a.gate.cwiseProduct((Scalar(1) - a.gate.array()).matrix()));
  grad.w2.noalias() += grad_logits * a.hidden.transpose();
  grad.b2 += grad_logits;
  const Vector grad_hidden = p.w2.transpose() * grad_logits;
  const Vector grad_pre = (a.pre_hidden.array() > Scalar(0)).select(grad_hidden.array(), Scalar(0)).matrix();
  grad.w1.noalias() += grad_pre * a.squeeze.transpose();
  grad.b1 += grad_pre;
  return p.w1.transpose() * grad_pre;
}

template <typename Scalar>
SeParams<Scalar> zeros_like(const SeParams<Scalar>& p) {
  return {SeParams<Scalar>::Matrix::Zero(p.w1.rows(), p.w1.cols()), SeParams<Scalar>::Vector::Zero(p.b1.size()),
          SeParams<Scalar>::Matrix::Zero(p.w2.rows(), p.w2.cols()), SeParams<Scalar>::Vector::Zero(p.b2.size())};
}

template <typename Scalar>
void check_dim(const Tensor3<Scalar>& x, const SeParams<Scalar>& p, Index expected, const char* what) {
  p.validate();
  if (p.dim() != expected) throw Error(Errc::ShapeMismatch, what);
  if (!x.all_finite()) throw Error(Errc::InvalidArgument, "non-finite SE input");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Channel SE: one gate per channel from the (F, T) mean.

template <typename Scalar>
SeActivations<Scalar> channel_se_excitation(const Tensor3<Scalar>& x, const SeParams<Scalar>& p) {
  detail::check_dim(x, p, x.channels(), "channel SE parameters do not match channel count");
  typename SeParams<Scalar>::Vector z(x.channels());
  for (Index c = 0; c < x.channels(); ++c) z[c] = x.channel(c).mean();
  return detail::excite(p, z);
}

template <typename Scalar>
Tensor3<Scalar> channel_se_forward(const Tensor3<Scalar>& x, const SeParams<Scalar>& p) {
  const auto act = channel_se_excitation(x, p);
  Tensor3<Scalar> y(x.channels(), x.bins(), x.frames());
  for (Index c = 0; c < x.channels(); ++c) y.channel(c) = act.gate[c] * x.channel(c);
  return y;
}

// ---------------------------------------------------------------------------
// Frequency SE: one gate per (bin, frame), squeezing over channels.
// FreqSqueeze::Global pools over channels and frames and shares the gate
// across time instead.

enum class FreqSqueeze { PerFrame, Global };

template <typename Scalar>
Tensor3<Scalar> freq_se_forward(const Tensor3<Scalar>& x, const SeParams<Scalar>& p,
                                FreqSqueeze squeeze = FreqSqueeze::PerFrame) {
  detail::check_dim(x, p, x.bins(), "frequency SE parameters do not match bin count");
  using Vector = typename SeParams<Scalar>::Vector;
  Tensor3<Scalar> y(x.channels(), x.bins(), x.frames());
  const auto c_count = static_cast<Scalar>(x.channels());

  auto apply_gate = [&](Index t, const Vector& gate) {
    for (Index c = 0; c < x.channels(); ++c) y.channel(c).col(t) = x.channel(c).col(t) * gate.array();
  };

  if (squeeze == FreqSqueeze::Global) {
    Vector z = Vector::Zero(x.bins());
    for (Index c = 0; c < x.channels(); ++c) z += x.channel(c).rowwise().sum().matrix();
    z /= c_count * static_cast<Scalar>(x.frames());
    const auto act = detail::excite(p, z);
    for (Index t = 0; t < x.frames(); ++t) apply_gate(t, act.gate);
    return y;
  }

  for (Index t = 0; t < x.frames(); ++t) {
    Vector z = Vector::Zero(x.bins());
    for (Index c = 0; c < x.channels(); ++c) z += x.channel(c).col(t).matrix();
    z /= c_count;
    apply_gate(t, detail::excite(p, z).gate);
  }
  return y;
}

// ---------------------------------------------------------------------------
// Multi-dimensional SE: frequency first, then channel.

template <typename Scalar>
Tensor3<Scalar> multi_dim_se_forward(const Tensor3<Scalar>& x, const SeParams<Scalar>& p_freq,
                                     const SeParams<Scalar>& p_chan,
                                     FreqSqueeze squeeze = FreqSqueeze::PerFrame) {
  return channel_se_forward(freq_se_forward(x, p_freq, squeeze), p_chan);
}

// ---------------------------------------------------------------------------
// Backward

enum class SeKind { Channel, Frequency };

template <typename Scalar>
struct SeGradients {
  Tensor3<Scalar> input;
  SeParams<Scalar> params;
};

template <typename Scalar>
SeGradients<Scalar> channel_se_backward(const Tensor3<Scalar>& x, const SeParams<Scalar>& p,
                                        const Tensor3<Scalar>& grad_y) {
  require_same_shape(x, grad_y, "gradient shape differs from input");
  using Vector = typename SeParams<Scalar>::Vector;
  const auto act = channel_se_excitation(x, p);
  SeGradients<Scalar> g{Tensor3<Scalar>(x.channels(), x.bins(), x.frames()), detail::zeros_like(p)};

  Vector grad_gate(x.channels());
  for (Index c = 0; c < x.channels(); ++c) grad_gate[c] = (grad_y.channel(c) * x.channel(c)).sum();
  const Vector grad_z = detail::excite_backward(p, act, grad_gate, g.params);

  const auto plane = static_cast<Scalar>(x.bins() * x.frames());
  for (Index c = 0; c < x.channels(); ++c)
    g.input.channel(c) = act.gate[c] * grad_y.channel(c) + grad_z[c] / plane;
  return g;
}

template <typename Scalar>
SeGradients<Scalar> freq_se_backward(const Tensor3<Scalar>& x, const SeParams<Scalar>& p,
                                     const Tensor3<Scalar>& grad_y, FreqSqueeze squeeze = FreqSqueeze::PerFrame) {
  detail::check_dim(x, p, x.bins(), "frequency SE parameters do not match bin count");
  require_same_shape(x, grad_y, "gradient shape differs from input");
  using Vector = typename SeParams<Scalar>::Vector;
  SeGradients<Scalar> g{Tensor3<Scalar>(x.channels(), x.bins(), x.frames()), detail::zeros_like(p)};
  const auto c_count = static_cast<Scalar>(x.channels());

  if (squeeze == FreqSqueeze::Global) {
    Vector z = Vector::Zero(x.bins());
    for (Index c = 0; c < x.channels(); ++c) z += x.channel(c).rowwise().sum().matrix();
    const Scalar pool = c_count * static_cast<Scalar>(x.frames());
    z /= pool;
    const auto act = detail::excite(p, z);
    Vector grad_gate = Vector::Zero(x.bins());
    for (Index c = 0; c < x.channels(); ++c)
      grad_gate += (grad_y.channel(c) * x.channel(c)).rowwise().sum().matrix();
    const Vector grad_z = detail::excite_backward(p, act, grad_gate, g.params);
    for (Index c = 0; c < x.channels(); ++c)
      g.input.channel(c) = (grad_y.channel(c).colwise() * act.gate.array()).colwise() + grad_z.array() / pool;
    return g;
  }

  for (Index t = 0; t < x.frames(); ++t) {
    Vector z = Vector::Zero(x.bins());
    for (Index c = 0; c < x.channels(); ++c) z += x.channel(c).col(t).matrix();
    z /= c_count;
    const auto act = detail::excite(p, z);
    Vector grad_gate = Vector::Zero(x.bins());
    for (Index c = 0; c < x.channels(); ++c)
      grad_gate += (grad_y.channel(c).col(t) * x.channel(c).col(t)).matrix();
    const Vector grad_z = detail::excite_backward(p, act, grad_gate, g.params);
    for (Index c = 0; c < x.channels(); ++c)
      g.input.channel(c).col(t) = grad_y.channel(c).col(t) * act.gate.array() + grad_z.array() / c_count;
  }
  return g;
}

template <typename Scalar>
SeGradients<Scalar> se_backward(const Tensor3<Scalar>& x, const SeParams<Scalar>& p, const Tensor3<Scalar>& grad_y,
                                SeKind which, FreqSqueeze squeeze = FreqSqueeze::PerFrame) {
  return which == SeKind::Channel ? channel_se_backward(x, p, grad_y) : freq_se_backward(x, p, grad_y, squeeze);
}

template <typename Scalar>
struct MultiDimSeGradients {
  Tensor3<Scalar> input;
  SeParams<Scalar> freq;
  SeParams<Scalar> chan;
};

template <typename Scalar>
MultiDimSeGradients<Scalar> multi_dim_se_backward(const Tensor3<Scalar>& x, const SeParams<Scalar>& p_freq,
                                                  const SeParams<Scalar>& p_chan, const Tensor3<Scalar>& grad_y,
                                                  FreqSqueeze squeeze = FreqSqueeze::PerFrame) {
  const Tensor3<Scalar> mid = freq_se_forward(x, p_freq, squeeze);
  auto g_chan = channel_se_backward(mid, p_chan, grad_y);
  auto g_freq = freq_se_backward(x, p_freq, g_chan.input, squeeze);
  return {std::move(g_freq.input), std::move(g_freq.params), std::move(g_chan.params)};
}

// ---------------------------------------------------------------------------
// Gradient check

/// Largest divisor of `d` that does not exceed `ratio`; lets a requested
/// reduction ratio be applied to a dimension it does not divide.
inline Index effective_ratio(Index d, Index ratio) {
  for (Index r = std::min(d, ratio); r > 1; --r)
    if (d % r == 0) return r;
  return 1;
}

using Extended = long double;

/// A differentiable operator over a list of parameter blocks.
/// `reference_forward`, when set, is the same map evaluated in extended
/// precision; gradcheck then takes its finite differences from it.
template <typename Scalar>
struct SeOperator {
  using Params = std::vector<SeParams<Scalar>>;
  using ExtendedParams = std::vector<SeParams<Extended>>;
  struct Gradients {
    Tensor3<Scalar> input;
    Params params;
  };
  std::function<Tensor3<Scalar>(const Tensor3<Scalar>&, const Params&)> forward;
  std::function<Gradients(const Tensor3<Scalar>&, const Params&, const Tensor3<Scalar>&)> backward;
  std::function<Tensor3<Extended>(const Tensor3<Extended>&, const ExtendedParams&)> reference_forward;
};

template <typename Scalar>
SeOperator<Scalar> channel_se_operator() {
  using Op = SeOperator<Scalar>;
  return {[](const Tensor3<Scalar>& x, const typename Op::Params& p) { return channel_se_forward(x, p.at(0)); },
          [](const Tensor3<Scalar>& x, const typename Op::Params& p, const Tensor3<Scalar>& gy) {
            auto g = channel_se_backward(x, p.at(0), gy);
            return typename Op::Gradients{std::move(g.input), {std::move(g.params)}};
          },
          [](const Tensor3<Extended>& x, const typename Op::ExtendedParams& p) {
            return channel_se_forward(x, p.at(0));
          }};
}

template <typename Scalar>
SeOperator<Scalar> freq_se_operator(FreqSqueeze squeeze = FreqSqueeze::PerFrame) {
  using Op = SeOperator<Scalar>;
  return {[squeeze](const Tensor3<Scalar>& x, const typename Op::Params& p) {
            return freq_se_forward(x, p.at(0), squeeze);
          },
          [squeeze](const Tensor3<Scalar>& x, const typename Op::Params& p, const Tensor3<Scalar>& gy) {
            auto g = freq_se_backward(x, p.at(0), gy, squeeze);
            return typename Op::Gradients{std::move(g.input), {std::move(g.params)}};
          },
          [squeeze](const Tensor3<Extended>& x, const typename Op::ExtendedParams& p) {
            return freq_se_forward(x, p.at(0), squeeze);
          }};
}

/// Parameter blocks are (freq, chan).
template <typename Scalar>
SeOperator<Scalar> multi_dim_se_operator(FreqSqueeze squeeze = FreqSqueeze::PerFrame) {
  using Op = SeOperator<Scalar>;
  return {[squeeze](const Tensor3<Scalar>& x, const typename Op::Params& p) {
            return multi_dim_se_forward(x, p.at(0), p.at(1), squeeze);
          },
          [squeeze](const Tensor3<Scalar>& x, const typename Op::Params& p, const Tensor3<Scalar>& gy) {
            auto g = multi_dim_se_backward(x, p.at(0), p.at(1), gy, squeeze);
            return typename Op::Gradients{std::move(g.input), {std::move(g.freq), std::move(g.chan)}};
          },
          [squeeze](const Tensor3<Extended>& x, const typename Op::ExtendedParams& p) {
            return multi_dim_se_forward(x, p.at(0), p.at(1), squeeze);
          }};
}

struct GradcheckOptions {
  double eps = 1e-5;
  bool check_input = true;
  bool check_params = true;
};

struct GradcheckReport {
  double max_relative_error = 0.0;
  Index entries_checked = 0;
};

/// Compares the analytic backward against central differences of
/// L = sum(y^2) for every input and parameter entry. The relative error of
/// one entry is |a - n| / max(|a|, |n|, 1e-8).
///
/// The differences come from `reference_forward` when the operator has
/// one: at eps = 1e-5 a 64-bit forward pass leaves ~1e-16 L / eps of
/// round-off in each difference, which swamps gradient entries below
/// ~1e-4.
template <typename Scalar>
GradcheckReport gradcheck(const SeOperator<Scalar>& op, const Tensor3<Scalar>& x,
                          const typename SeOperator<Scalar>::Params& params, const GradcheckOptions& options = {}) {
  if (!(options.eps > 0.0 && options.eps < 1e-3)) throw Error(Errc::InvalidArgument, "eps must lie in (0, 1e-3)");

  auto sum_squares = [](const auto& y) {
    Extended acc = 0.0L;
    for (Index i = 0; i < y.size(); ++i) acc += static_cast<Extended>(y.values()[i]) * static_cast<Extended>(y.values()[i]);
    return acc;
  };

  const Tensor3<Scalar> y = op.forward(x, params);
  Tensor3<Scalar> grad_y(y.channels(), y.bins(), y.frames());
  grad_y.values() = Scalar(2) * y.values();
  const auto analytic = op.backward(x, params, grad_y);

  GradcheckReport report;
  auto record = [&](Scalar a, Extended plus, Extended minus) {
    const auto n = static_cast<double>((plus - minus) / (2.0L * static_cast<Extended>(options.eps)));
    const double ad = static_cast<double>(a);
    const double err = std::abs(ad - n) / std::max({std::abs(ad), std::abs(n), 1e-8});
    report.max_relative_error = std::max(report.max_relative_error, err);
    ++report.entries_checked;
  };

  // Perturb-and-evaluate in whichever precision the forward pass runs in.
  auto run = [&](auto probe_x, auto probe_p, auto&& forward) {
    using S = typename decltype(probe_x)::Storage::Scalar;
    const auto eps = static_cast<S>(options.eps);
    if (options.check_input) {
      for (Index i = 0; i < probe_x.size(); ++i) {
        const S orig = probe_x.values()[i];
        probe_x.values()[i] = orig + eps;
        const Extended plus = sum_squares(forward(probe_x, probe_p));
        probe_x.values()[i] = orig - eps;
        const Extended minus = sum_squares(forward(probe_x, probe_p));
        probe_x.values()[i] = orig;
        record(analytic.input.values()[i], plus, minus);
      }
    }
    if (options.check_params) {
      for (std::size_t b = 0; b < probe_p.size(); ++b) {
        for (Index i = 0; i < probe_p[b].num_values(); ++i) {
          S& slot = probe_p[b].at(i);
          const S orig = slot;
          slot = orig + eps;
          const Extended plus = sum_squares(forward(probe_x, probe_p));
          slot = orig - eps;
          const Extended minus = sum_squares(forward(probe_x, probe_p));
          slot = orig;
          record(analytic.params.at(b).at(i), plus, minus);
        }
      }
    }
  };

  if (op.reference_forward) {
    typename SeOperator<Scalar>::ExtendedParams ext;
    for (const auto& p : params) ext.push_back(p.template cast<Extended>());
    run(x.template cast<Extended>(), std::move(ext), op.reference_forward);
  } else {
    run(x, params, op.forward);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization: SLSA rank-1 payload [d, hidden, w1, b1, w2, b2], 32-bit.

template <typename Scalar>
void write_se_params(const SeParams<Scalar>& p, const fs::path& path) {
  p.validate();
  RawArray raw;
  raw.data.reserve(static_cast<std::size_t>(2 + p.num_values()));
  raw.data.push_back(static_cast<float>(p.dim()));
  raw.data.push_back(static_cast<float>(p.hidden()));
  for (Index i = 0; i < p.num_values(); ++i) raw.data.push_back(static_cast<float>(p.at(i)));
  raw.dims = {raw.data.size()};
  write_slsa(raw, path);
}

template <typename Scalar>
SeParams<Scalar> read_se_params(const fs::path& path) {
  const RawArray raw = read_slsa(path);
  if (raw.dims.size() != 1 || raw.data.size() < 2) throw Error(Errc::ShapeMismatch, "not an SE parameter file");
  const auto d = static_cast<Index>(raw.data[0]);
  const auto hidden = static_cast<Index>(raw.data[1]);
  if (d <= 0 || hidden <= 0 || d % hidden != 0) throw Error(Errc::MalformedFile, "bad SE parameter header");
  SeParams<Scalar> p = SeParams<Scalar>::Zero(d, d / hidden);
  if (static_cast<Index>(raw.data.size()) != 2 + p.num_values())
    throw Error(Errc::ShapeMismatch, "SE parameter payload size mismatch");
  for (Index i = 0; i < p.num_values(); ++i) p.at(i) = static_cast<Scalar>(raw.data[static_cast<std::size_t>(2 + i)]);
  return p;
}

}  // namespace seld
