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


#include "seld/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

namespace seld {

Eigen::VectorXd hann_window(Index length) {
  Eigen::VectorXd w(length);
  for (Index n = 0; n < length; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(length));
  return w;
}

ComplexSpectrogram stft(const MultichannelClip& clip, Index window_length, Index hop) {
  if (window_length <= 0 || window_length % 2 != 0 || hop <= 0)
    throw Error(Errc::InvalidArgument, "window length must be positive and even, hop positive");
  if (clip.samples.cols() < window_length)
    throw Error(Errc::TooShort, "need at least " + std::to_string(window_length) + " samples");

  const Index frames = num_stft_frames(clip.samples.cols(), window_length, hop);
  const Index bins = window_length / 2 + 1;
  const Eigen::VectorXd window = hann_window(window_length);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  ComplexSpectrogram spec;
  spec.window_length = window_length;
  spec.hop = hop;
  spec.channels.assign(static_cast<std::size_t>(clip.samples.rows()), Eigen::MatrixXcd(bins, frames));

  std::vector<double> frame(static_cast<std::size_t>(window_length));
  std::vector<std::complex<double>> out;
  for (Index c = 0; c < clip.samples.rows(); ++c) {
    for (Index t = 0; t < frames; ++t) {
      const Index start = t * hop;
      for (Index n = 0; n < window_length; ++n)
        frame[static_cast<std::size_t>(n)] = window[n] * static_cast<double>(clip.samples(c, start + n));
      fft.fwd(out, frame);
      for (Index k = 0; k < bins; ++k) spec.channels[static_cast<std::size_t>(c)](k, t) = out[static_cast<std::size_t>(k)];
    }
  }
  return spec;
}

FeatureTensor log_linear_spectrogram(const ComplexSpectrogram& spec, Index n_bins, double floor) {
  if (n_bins > spec.bins()) throw Error(Errc::InvalidArgument, "n_bins exceeds spectrogram bins");
  const auto channels = static_cast<Index>(spec.channels.size());
  FeatureTensor out(channels, n_bins, spec.frames());
  for (Index c = 0; c < channels; ++c) {
    const auto& x = spec.channels[static_cast<std::size_t>(c)];
    out.channel(c) = x.topRows(n_bins).array().abs2().max(floor).log().cast<float>();
  }
  return out;
}

FeatureTensor eigenvector_intensity(const ComplexSpectrogram& spec, Index n_bins, SmoothingWindow smooth) {
  if (spec.channels.size() != kNumFoaChannels)
    throw Error(Errc::WrongChannelCount, "intensity needs 4 FOA channels");
  if (n_bins > spec.bins()) throw Error(Errc::InvalidArgument, "n_bins exceeds spectrogram bins");
  if (smooth.freq < 1 || smooth.time < 1) throw Error(Errc::InvalidArgument, "smoothing window must be >= 1");

  const Index bins = spec.bins();
  const Index frames = spec.frames();
  const Index half_f = smooth.freq / 2;
  const Index half_t = smooth.time / 2;

  FeatureTensor out(3, n_bins, frames);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver;
  Eigen::Vector4cd x;
  Eigen::Matrix4cd cov;

  for (Index f = 0; f < n_bins; ++f) {
    const Index f0 = std::max<Index>(0, f - half_f);
    const Index f1 = std::min<Index>(bins - 1, f - half_f + smooth.freq - 1);
    for (Index t = 0; t < frames; ++t) {
      const Index t0 = std::max<Index>(0, t - half_t);
      const Index t1 = std::min<Index>(frames - 1, t - half_t + smooth.time - 1);
      cov.setZero();
      for (Index ff = f0; ff <= f1; ++ff) {
        for (Index tt = t0; tt <= t1; ++tt) {
          for (Index c = 0; c < kNumFoaChannels; ++c) x[c] = spec.channels[static_cast<std::size_t>(c)](ff, tt);
          cov.noalias() += x * x.adjoint();
        }
      }
      cov /= static_cast<double>((f1 - f0 + 1) * (t1 - t0 + 1));

      solver.compute(cov);
      Eigen::Vector4cd u = solver.eigenvectors().col(3);  // eigenvalues ascend
      if (u[0].real() < 0.0) u = -u;

      Eigen::Vector3d v = Eigen::Vector3d::Zero();  // (Y, Z, X) components
      if (std::abs(u[0]) > 1e-9) v = (u.tail<3>() / u[0]).real();
      const double norm = v.norm();
      if (norm < 1e-9) {
        v.setZero();
      } else if (norm > 1.0) {
        v /= norm;
      }
      out(0, f, t) = static_cast<float>(v[2]);
      out(1, f, t) = static_cast<float>(v[0]);
      out(2, f, t) = static_cast<float>(v[1]);
    }
  }
  return out;
}

FeatureTensor salsa(const MultichannelClip& clip, const SalsaConfig& config) {
  if (clip.samples.rows() != kNumFoaChannels)
    throw Error(Errc::WrongChannelCount, "expected 4 channels, got " + std::to_string(clip.samples.rows()));
  if (!clip.samples.allFinite()) throw Error(Errc::InvalidArgument, "non-finite samples");

  const ComplexSpectrogram spec = stft(clip, config.window_length, config.hop);
  const FeatureTensor logspec = log_linear_spectrogram(spec, config.n_bins, config.floor);
  const FeatureTensor intensity = eigenvector_intensity(spec, config.n_bins, config.smooth);

  FeatureTensor out(logspec.channels() + intensity.channels(), config.n_bins, spec.frames());
  const Index split = logspec.size();
  out.values().head(split) = logspec.values();
  out.values().tail(intensity.size()) = intensity.values();
  return out;
}

// ---------------------------------------------------------------------------

NormStats compute_norm_stats(std::span<const FeatureTensor> tensors) {
  if (tensors.empty()) throw Error(Errc::EmptyManifest, "no tensors to fit normalization stats");
  const Index channels = tensors.front().channels();
  const Index bins = tensors.front().bins();

  Eigen::ArrayXXd sum = Eigen::ArrayXXd::Zero(channels, bins);
  Eigen::ArrayXXd sum_sq = Eigen::ArrayXXd::Zero(channels, bins);
  double count = 0.0;
  for (const auto& t : tensors) {
    if (t.channels() != channels || t.bins() != bins)
      throw Error(Errc::ShapeMismatch, "feature tensors disagree on channels/bins");
    for (Index c = 0; c < channels; ++c) {
      const Eigen::ArrayXXd plane = t.channel(c).cast<double>();
      sum.row(c) += plane.rowwise().sum().transpose();
    }
    count += static_cast<double>(t.frames());
  }
  if (count == 0.0) throw Error(Errc::EmptyManifest, "tensors have no frames");
  const Eigen::ArrayXXd mean = sum / count;
  // Second pass around the mean keeps the variance free of cancellation.
  for (const auto& t : tensors) {
    for (Index c = 0; c < channels; ++c) {
      const Eigen::ArrayXXd centered = t.channel(c).cast<double>().colwise() - mean.row(c).transpose();
      sum_sq.row(c) += centered.square().rowwise().sum().transpose();
    }
  }

  NormStats stats;
  stats.mean = mean.cast<float>();
  stats.std = (sum_sq / count).sqrt().cast<float>().max(NormStats::kStdFloor);
  return stats;
}

NormStats compute_norm_stats(const DatasetManifest& manifest, const SalsaConfig& config) {
  if (manifest.entries.empty()) throw Error(Errc::EmptyManifest, "manifest has no entries");
  std::vector<FeatureTensor> features;
  features.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) features.push_back(salsa(read_foa_wav(entry.audio), config));
  return compute_norm_stats(features);
}

FeatureTensor normalize(const FeatureTensor& tensor, const NormStats& stats) {
  if (stats.mean.rows() != tensor.channels() || stats.mean.cols() != tensor.bins() ||
      stats.std.rows() != stats.mean.rows() || stats.std.cols() != stats.mean.cols())
    throw Error(Errc::ShapeMismatch, "normalization stats do not match tensor");
  if (!stats.mean.isFinite().all() || !stats.std.isFinite().all() || (stats.std <= 0.0f).any())
    throw Error(Errc::InvalidArgument, "normalization stats must be finite with std > 0");

  FeatureTensor out(tensor.channels(), tensor.bins(), tensor.frames());
  for (Index c = 0; c < tensor.channels(); ++c) {
    const Eigen::ArrayXf mean = stats.mean.row(c).transpose();
    const Eigen::ArrayXf std = stats.std.row(c).transpose();
    out.channel(c) = (tensor.channel(c).colwise() - mean).colwise() / std;
  }
  return out;
}

void write_norm_stats(const NormStats& stats, const fs::path& path) {
  const Index channels = stats.mean.rows();
  const Index bins = stats.mean.cols();
  Tensor3<float> packed(2, channels, bins);
  packed.channel(0) = stats.mean;
  packed.channel(1) = stats.std;
  write_feature_file(packed, path);
}

NormStats read_norm_stats(const fs::path& path) {
  const Tensor3<float> packed = read_feature_file(path);
  if (packed.channels() != 2) throw Error(Errc::ShapeMismatch, path.string() + ": stats must have leading dim 2");
  NormStats stats;
  stats.mean = packed.channel(0);
  stats.std = packed.channel(1);
  return stats;
}

}  // namespace seld
