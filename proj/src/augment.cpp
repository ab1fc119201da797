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


#include "seld/augment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <random>
#include <sstream>

#include "seld/dataset_io.hpp"

namespace seld {

// ---------------------------------------------------------------------------
// channel swap

Eigen::Matrix3d SwapPattern::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  if (swap_xy) {
    m(0, 1) = sign_x;
    m(1, 0) = sign_y;
  } else {
    m(0, 0) = sign_x;
    m(1, 1) = sign_y;
  }
  m(2, 2) = z_sign;
  return m;
}

double SwapPattern::map_azimuth(double azimuth) const {
  return wrap_azimuth(az_sign * azimuth + 90.0 * az_quarter);
}

double SwapPattern::map_elevation(double elevation) const { return el_sign * elevation; }

SwapPattern make_swap_pattern(int az_sign, int az_quarter, int el_sign) {
  if ((az_sign != 1 && az_sign != -1) || (el_sign != 1 && el_sign != -1) || az_quarter < 0 || az_quarter > 3)
    throw Error(Errc::InvalidArgument, "invalid swap pattern parameters");
  // Horizontal part is R(k * 90deg) * diag(1, s).
  static constexpr int kCos[4] = {1, 0, -1, 0};
  static constexpr int kSin[4] = {0, 1, 0, -1};
  const int c = kCos[az_quarter];
  const int s = kSin[az_quarter];
  const int m00 = c, m01 = -s * az_sign, m10 = s, m11 = c * az_sign;

  SwapPattern p;
  p.swap_xy = (m00 == 0);
  p.sign_x = p.swap_xy ? m01 : m00;
  p.sign_y = p.swap_xy ? m10 : m11;
  p.z_sign = el_sign;
  p.az_sign = az_sign;
  p.az_quarter = az_quarter;
  p.el_sign = el_sign;
  return p;
}

const std::vector<SwapPattern>& enumerate_swap_patterns() {
  static const std::vector<SwapPattern> patterns = [] {
    std::vector<SwapPattern> out;
    for (int e : {1, -1})
      for (int s : {1, -1})
        for (int k = 0; k < 4; ++k) out.push_back(make_swap_pattern(s, k, e));
    return out;
  }();
  return patterns;
}

int pattern_index(const SwapPattern& p) {
  const auto& all = enumerate_swap_patterns();
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] == p) return static_cast<int>(i);
  throw Error(Errc::InvalidArgument, "not one of the 16 swap patterns");
}

SwapPattern compose(const SwapPattern& first, const SwapPattern& second) {
  const Eigen::Matrix3d m = second.matrix() * first.matrix();
  for (const auto& p : enumerate_swap_patterns())
    if (p.matrix() == m) return p;
  throw Error(Errc::InvariantViolation, "swap patterns are not closed under composition");
}

SwapPattern inverse(const SwapPattern& p) {
  const SwapPattern& id = enumerate_swap_patterns().front();
  for (const auto& q : enumerate_swap_patterns())
    if (compose(p, q) == id) return q;
  throw Error(Errc::InvariantViolation, "swap pattern has no inverse");
}

FeatureTensor swap_feature_channels(const FeatureTensor& features, const SwapPattern& p) {
  if (features.channels() != kFeatureChannels)
    throw Error(Errc::ShapeMismatch, "channel swap expects 7 SALSA channels");
  FeatureTensor out = features;
  // Magnitude channels only see the permutation.
  if (p.swap_xy) {
    out.channel(kY) = features.channel(kX);
    out.channel(kX) = features.channel(kY);
  }
  auto sx = static_cast<float>(p.sign_x);
  auto sy = static_cast<float>(p.sign_y);
  out.channel(4) = sx * features.channel(p.swap_xy ? 5 : 4);
  out.channel(5) = sy * features.channel(p.swap_xy ? 4 : 5);
  out.channel(6) = static_cast<float>(p.z_sign) * features.channel(6);
  return out;
}

AccdoaTensor swap_label_axes(const AccdoaTensor& labels, const SwapPattern& p) {
  if (labels.channels() != 3) throw Error(Errc::ShapeMismatch, "ACCDOA tensor must have 3 axes");
  AccdoaTensor out(labels.channels(), labels.bins(), labels.frames());
  out.channel(0) = static_cast<double>(p.sign_x) * labels.channel(p.swap_xy ? 1 : 0);
  out.channel(1) = static_cast<double>(p.sign_y) * labels.channel(p.swap_xy ? 0 : 1);
  out.channel(2) = static_cast<double>(p.z_sign) * labels.channel(2);
  return out;
}

std::pair<FeatureTensor, AccdoaTensor> channel_swap(const FeatureTensor& features, const AccdoaTensor& labels,
                                                    const SwapPattern& p) {
  return {swap_feature_channels(features, p), swap_label_axes(labels, p)};
}

MultichannelClip apply_pattern_to_waveform(const MultichannelClip& clip, const SwapPattern& p) {
  if (clip.samples.rows() != kNumFoaChannels) throw Error(Errc::WrongChannelCount, "expected 4 channels");
  MultichannelClip out = clip;
  const auto& in = clip.samples;
  out.samples.row(kX) = static_cast<float>(p.sign_x) * in.row(p.swap_xy ? kY : kX);
  out.samples.row(kY) = static_cast<float>(p.sign_y) * in.row(p.swap_xy ? kX : kY);
  out.samples.row(kZ) = static_cast<float>(p.z_sign) * in.row(kZ);
  return out;
}

// ---------------------------------------------------------------------------
// frequency / time

FeatureTensor pitch_shift(const FeatureTensor& features, int shift_bins, int max_shift) {
  if (std::abs(shift_bins) > max_shift)
    throw Error(Errc::ShiftOutOfRange, "shift " + std::to_string(shift_bins) + " exceeds range " +
                                           std::to_string(max_shift));
  if (shift_bins == 0) return features;
  const Index bins = features.bins();
  FeatureTensor out(features.channels(), bins, features.frames());
  for (Index c = 0; c < features.channels(); ++c) {
    auto src = features.channel(c);
    auto dst = out.channel(c);
    for (Index f = 0; f < bins; ++f) dst.row(f) = src.row(std::clamp<Index>(f - shift_bins, 0, bins - 1));
  }
  return out;
}

namespace {

void require_label_alignment(const FeatureTensor& features, const AccdoaTensor& labels) {
  if (labels.frames() != label_frames_for(features.frames()))
    throw Error(Errc::ShapeMismatch, "label frames (" + std::to_string(labels.frames()) +
                                         ") must equal feature frames / 8 (" +
                                         std::to_string(label_frames_for(features.frames())) + ")");
}

Index positive_mod(Index a, Index n) {
  Index r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

std::pair<FeatureTensor, AccdoaTensor> frame_shift(const FeatureTensor& features, const AccdoaTensor& labels,
                                                   Index offset) {
  if (offset % kFeatureFramesPerLabelFrame != 0)
    throw Error(Errc::NonAlignedOffset, "offset " + std::to_string(offset) + " is not a multiple of 8");
  require_label_alignment(features, labels);
  const Index label_span = labels.frames();
  const Index span = label_span * kFeatureFramesPerLabelFrame;
  if (span == 0) return {features, labels};

  const Index shift = positive_mod(offset, span);
  const Index label_shift = shift / kFeatureFramesPerLabelFrame;
  FeatureTensor out_f = features;
  AccdoaTensor out_l(labels.channels(), labels.bins(), labels.frames());
  for (Index c = 0; c < features.channels(); ++c) {
    auto src = features.channel(c);
    auto dst = out_f.channel(c);
    dst.leftCols(span).rightCols(span - shift) = src.leftCols(span - shift);
    dst.leftCols(shift) = src.leftCols(span).rightCols(shift);
  }
  for (Index c = 0; c < labels.channels(); ++c) {
    auto src = labels.channel(c);
    auto dst = out_l.channel(c);
    dst.rightCols(label_span - label_shift) = src.leftCols(label_span - label_shift);
    dst.leftCols(label_shift) = src.rightCols(label_shift);
  }
  return {std::move(out_f), std::move(out_l)};
}

std::pair<FeatureTensor, AccdoaTensor> time_mask(const FeatureTensor& features, const AccdoaTensor& labels,
                                                 Index start, Index length, double ratio_min, double ratio_max) {
  require_label_alignment(features, labels);
  const Index frames = features.frames();
  if (start < 0 || length < 0 || start + length > frames)
    throw Error(Errc::FrameOutOfRange, "mask [" + std::to_string(start) + ", " + std::to_string(start + length) +
                                           ") exceeds " + std::to_string(frames) + " frames");
  if (start % kFeatureFramesPerLabelFrame != 0 || length % kFeatureFramesPerLabelFrame != 0)
    throw Error(Errc::Misaligned, "mask bounds must be multiples of 8 feature frames");
  const double ratio = frames == 0 ? 0.0 : static_cast<double>(length) / static_cast<double>(frames);
  if (ratio < ratio_min || ratio > ratio_max)
    throw Error(Errc::RatioOutOfRange, "mask ratio " + std::to_string(ratio) + " outside [" +
                                           std::to_string(ratio_min) + ", " + std::to_string(ratio_max) + "]");

  FeatureTensor out_f = features;
  AccdoaTensor out_l = labels;
  if (length == 0) return {std::move(out_f), std::move(out_l)};
  for (Index c = 0; c < features.channels(); ++c) out_f.channel(c).middleCols(start, length).setZero();
  const Index l0 = start / kFeatureFramesPerLabelFrame;
  const Index l1 = std::min(labels.frames(), (start + length) / kFeatureFramesPerLabelFrame);
  if (l1 > l0)
    for (Index c = 0; c < labels.channels(); ++c) out_l.channel(c).middleCols(l0, l1 - l0).setZero();
  return {std::move(out_f), std::move(out_l)};
}

// ---------------------------------------------------------------------------
// moderate mixup

std::pair<FeatureTensor, AccdoaTensor> moderate_mixup(const FeatureTensor& feat_a, const AccdoaTensor& lab_a,
                                                      const FeatureTensor& feat_b, const AccdoaTensor& lab_b,
                                                      double lambda) {
  require_same_shape(feat_a, feat_b, "mixup features differ in shape");
  require_same_shape(lab_a, lab_b, "mixup labels differ in shape");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(Errc::InvalidArgument, "lambda must lie in [0, 1]");

  const auto wa = static_cast<float>(lambda);
  const auto wb = static_cast<float>(1.0 - lambda);
  FeatureTensor mixed(feat_a.channels(), feat_a.bins(), feat_a.frames());
  mixed.values() = wa * feat_a.values() + wb * feat_b.values();
  return {std::move(mixed), lambda >= 0.5 ? lab_a : lab_b};
}

double sample_lambda(SeededRng& rng, double alpha) {
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "beta alpha must be > 0");
  std::gamma_distribution<double> gamma(alpha, 1.0);
  const double x = gamma(rng);
  const double y = gamma(rng);
  if (x + y == 0.0) return std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.0;  // both underflowed
  return std::clamp(x / (x + y), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// config

AugmentConfig AugmentConfig::identity() {
  AugmentConfig c;
  c.cs_prob = 0.0;
  c.ps_range = 0;
  c.fs_prob = 0.0;
  c.tm_prob = 0.0;
  c.mm_prob = 0.0;
  c.mode = AugmentMode::Custom;
  return c;
}

bool AugmentConfig::frame_shift_enabled() const { return mode != AugmentMode::TmMm && fs_prob > 0.0; }
bool AugmentConfig::time_mask_enabled() const { return mode != AugmentMode::FsMm && tm_prob > 0.0; }

void AugmentConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidArgument, std::string(name) + " must lie in [0, 1]");
  };
  prob(cs_prob, "cs_prob");
  prob(fs_prob, "fs_prob");
  prob(tm_prob, "tm_prob");
  prob(mm_prob, "mm_prob");
  if (ps_range < 0) throw Error(Errc::InvalidArgument, "ps_range must be >= 0");
  if (!(tm_ratio_min > 0.0 && tm_ratio_min <= tm_ratio_max && tm_ratio_max < 1.0))
    throw Error(Errc::InvalidArgument, "need 0 < tm_ratio_min <= tm_ratio_max < 1");
  if (!(mm_beta_alpha > 0.0)) throw Error(Errc::InvalidArgument, "mm_beta_alpha must be > 0");
}

AugmentMode parse_mode(const std::string& text) {
  std::string s;
  for (char ch : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (s == "fs+mm" || s == "fs_mm") return AugmentMode::FsMm;
  if (s == "tm+mm" || s == "tm_mm") return AugmentMode::TmMm;
  if (s == "all") return AugmentMode::All;
  if (s == "custom") return AugmentMode::Custom;
  throw Error(Errc::InvalidArgument, "unknown mode '" + text + "'");
}

std::string to_string(AugmentMode mode) {
  switch (mode) {
    case AugmentMode::FsMm: return "FS+MM";
    case AugmentMode::TmMm: return "TM+MM";
    case AugmentMode::All: return "all";
    case AugmentMode::Custom: return "custom";
  }
  return "custom";
}

namespace {

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || value.empty())
    throw Error(Errc::InvalidArgument, "bad value for " + key + ": '" + value + "'");
  return out;
}

std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_value(AugmentConfig& config, const std::string& key, const std::string& value) {
  if (key == "cs_prob") config.cs_prob = parse_value<double>(key, value);
  else if (key == "ps_range") config.ps_range = parse_value<int>(key, value);
  else if (key == "fs_prob") config.fs_prob = parse_value<double>(key, value);
  else if (key == "tm_prob") config.tm_prob = parse_value<double>(key, value);
  else if (key == "tm_ratio_min") config.tm_ratio_min = parse_value<double>(key, value);
  else if (key == "tm_ratio_max") config.tm_ratio_max = parse_value<double>(key, value);
  else if (key == "mm_prob") config.mm_prob = parse_value<double>(key, value);
  else if (key == "mm_beta_alpha") config.mm_beta_alpha = parse_value<double>(key, value);
  else if (key == "mode") config.mode = parse_mode(value);
  else if (key == "seed") config.seed = parse_value<std::uint64_t>(key, value);
  else throw Error(Errc::InvalidArgument, "unknown config key '" + key + "'");
}

AugmentConfig parse_augment_config(std::istream& in, AugmentConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim_copy(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::InvalidArgument, "config line " + std::to_string(line_no) + ": expected key=value");
    set_config_value(base, trim_copy(line.substr(0, eq)), trim_copy(line.substr(eq + 1)));
  }
  base.validate();
  return base;
}

std::string format_augment_config(const AugmentConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "cs_prob=" << c.cs_prob << "\nps_range=" << c.ps_range << "\nfs_prob=" << c.fs_prob
      << "\ntm_prob=" << c.tm_prob << "\ntm_ratio_min=" << c.tm_ratio_min << "\ntm_ratio_max=" << c.tm_ratio_max
      << "\nmm_prob=" << c.mm_prob << "\nmm_beta_alpha=" << c.mm_beta_alpha << "\nmode=" << to_string(c.mode)
      << "\nseed=" << c.seed << '\n';
  return out.str();
}

std::vector<std::string> config_warnings(const AugmentConfig& config) {
  std::vector<std::string> out;
  if (config.mode == AugmentMode::All || (config.frame_shift_enabled() && config.time_mask_enabled()))
    out.emplace_back(
        "frame shift and time masking are both enabled; combining both time-axis augmentations "
        "with moderate mixup degraded performance in the reference experiments");
  return out;
}

// ---------------------------------------------------------------------------
// pipeline

AugmentResult augment_pipeline(const Sample& a, const Sample& b, const AugmentConfig& config, SeededRng& rng) {
  config.validate();
  AugmentResult result{a, {}};
  Sample& s = result.sample;
  AugmentTrace& trace = result.trace;

  auto coin = [&rng](double p) { return p > 0.0 && std::bernoulli_distribution(p)(rng); };

  if (coin(config.cs_prob)) {
    const int idx = std::uniform_int_distribution<int>(0, 15)(rng);
    std::tie(s.features, s.labels) = channel_swap(s.features, s.labels, enumerate_swap_patterns()[idx]);
    trace.swap_pattern = idx;
  }

  if (config.ps_range > 0) {
    const int shift = std::uniform_int_distribution<int>(-config.ps_range, config.ps_range)(rng);
    s.features = pitch_shift(s.features, shift, config.ps_range);
    trace.pitch_shift = shift;
  }

  if (config.frame_shift_enabled() && coin(config.fs_prob)) {
    require_label_alignment(s.features, s.labels);
    if (s.labels.frames() > 0) {
      const Index k = std::uniform_int_distribution<Index>(0, s.labels.frames() - 1)(rng);
      const Index offset = k * kFeatureFramesPerLabelFrame;
      std::tie(s.features, s.labels) = frame_shift(s.features, s.labels, offset);
      trace.frame_offset = offset;
    }
  }

  if (config.time_mask_enabled() && coin(config.tm_prob)) {
    const Index frames = s.features.frames();
    const double ratio = std::uniform_real_distribution<double>(config.tm_ratio_min, config.tm_ratio_max)(rng);
    // Feasible aligned lengths: multiples of 8 whose ratio lies in range.
    const double unit = static_cast<double>(kFeatureFramesPerLabelFrame);
    auto lo = static_cast<Index>(std::ceil(config.tm_ratio_min * static_cast<double>(frames) / unit));
    auto hi = static_cast<Index>(std::floor(config.tm_ratio_max * static_cast<double>(frames) / unit));
    auto in_range = [&](Index m) {
      const double r = static_cast<double>(m * kFeatureFramesPerLabelFrame) / static_cast<double>(frames);
      return r >= config.tm_ratio_min && r <= config.tm_ratio_max;
    };
    while (lo <= hi && !in_range(lo)) ++lo;
    while (hi >= lo && !in_range(hi)) --hi;
    if (frames > 0 && lo <= hi) {
      const auto target = static_cast<Index>(std::llround(ratio * static_cast<double>(frames) / unit));
      const Index length = std::clamp(target, lo, hi) * kFeatureFramesPerLabelFrame;
      const Index slots = (frames - length) / kFeatureFramesPerLabelFrame;
      const Index start = std::uniform_int_distribution<Index>(0, slots)(rng) * kFeatureFramesPerLabelFrame;
      std::tie(s.features, s.labels) =
          time_mask(s.features, s.labels, start, length, config.tm_ratio_min, config.tm_ratio_max);
      trace.time_mask = std::pair(start, length);
    }
  }

  if (coin(config.mm_prob)) {
    const double lambda = sample_lambda(rng, config.mm_beta_alpha);
    std::tie(s.features, s.labels) = moderate_mixup(s.features, s.labels, b.features, b.labels, lambda);
    trace.lambda = lambda;
  }
  return result;
}

}  // namespace seld
