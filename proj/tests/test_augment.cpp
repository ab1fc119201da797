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


#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"

#include "oracles.hpp"
#include "seld/accdoa.hpp"
#include "seld/augment.hpp"

using namespace seld;

namespace {

FeatureTensor random_features(SeededRng& rng, Index bins, Index frames) {
  FeatureTensor f(7, bins, frames);
  std::normal_distribution<float> g;
  for (Index i = 0; i < f.size(); ++i) f.values()[i] = g(rng);
  return f;
}

AccdoaTensor random_labels(SeededRng& rng, Index frames) {
  std::uniform_real_distribution<double> az(-180.0, 180.0), el(-90.0, 90.0);
  std::bernoulli_distribution on(0.3);
  EventList e;
  for (int t = 0; t < frames; ++t)
    for (int c = 0; c < kNumClasses; ++c)
      if (on(rng)) e.push_back({t, c, az(rng), el(rng)});
  return encode(e, frames);
}

// Index of a matrix within the pattern list, by exact comparison.
int find_matrix(const Eigen::Matrix3d& m) {
  const auto& all = enumerate_swap_patterns();
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].matrix() == m) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("sixteen distinct patterns, identity first") {
  const auto& all = enumerate_swap_patterns();
  REQUIRE(all.size() == 16);
  CHECK(all[0].matrix() == Eigen::Matrix3d::Identity());
  std::set<std::tuple<int, int, int>> maps;
  for (const auto& p : all) {
    maps.insert({p.az_sign, p.az_quarter, p.el_sign});
    const Eigen::Matrix3d m = p.matrix();
    CHECK((m.transpose() * m - Eigen::Matrix3d::Identity()).norm() == 0.0);
  }
  CHECK(maps.size() == 16);
}

TEST_CASE("horizontal maps follow the transform table") {
  // (s, k) -> images of the x and y axes.
  struct Row { int s, k; Eigen::Vector3d ex, ey; };
  const Row table[] = {
      {1, 0, {1, 0, 0}, {0, 1, 0}},   {1, 1, {0, 1, 0}, {-1, 0, 0}},
      {1, 2, {-1, 0, 0}, {0, -1, 0}}, {1, 3, {0, -1, 0}, {1, 0, 0}},
      {-1, 0, {1, 0, 0}, {0, -1, 0}}, {-1, 1, {0, 1, 0}, {1, 0, 0}},
      {-1, 2, {-1, 0, 0}, {0, 1, 0}}, {-1, 3, {0, -1, 0}, {-1, 0, 0}},
  };
  for (const Row& r : table) {
    const Eigen::Matrix3d m = make_swap_pattern(r.s, r.k, 1).matrix();
    CHECK(m * Eigen::Vector3d::UnitX() == r.ex);
    CHECK(m * Eigen::Vector3d::UnitY() == r.ey);
    CHECK(m(2, 2) == 1.0);
    CHECK(make_swap_pattern(r.s, r.k, -1).matrix()(2, 2) == -1.0);
  }
}

TEST_CASE("pattern matrices agree with their label maps") {
  SeededRng rng(7);
  std::uniform_real_distribution<double> az(-180.0, 180.0), el(-90.0, 90.0);
  for (const auto& p : enumerate_swap_patterns()) {
    CHECK((p.matrix() * Eigen::Vector3d::UnitX() -
           oracle::unit(p.map_azimuth(0.0), p.map_elevation(0.0))).norm() < 1e-12);
    for (int i = 0; i < 50; ++i) {
      const double a = az(rng), e = el(rng);
      CHECK((p.matrix() * oracle::unit(a, e) - oracle::unit(p.map_azimuth(a), p.map_elevation(e))).norm() < 1e-12);
    }
  }
}

TEST_CASE("group table: closure, composition and inverses") {
  const auto& all = enumerate_swap_patterns();
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(pattern_index(all[i]) == static_cast<int>(i));
    int inverse_found = -1;
    for (std::size_t j = 0; j < 16; ++j) {
      const int product = find_matrix(all[j].matrix() * all[i].matrix());
      REQUIRE(product >= 0);
      CHECK(compose(all[i], all[j]) == all[product]);
      if (product == 0) inverse_found = static_cast<int>(j);
    }
    REQUIRE(inverse_found >= 0);
    CHECK(inverse(all[i]) == all[inverse_found]);
  }
}

TEST_CASE("channel swap: +90 azimuth example and exact inverse") {
  SeededRng rng(8);
  const FeatureTensor f = random_features(rng, 12, 16);
  const AccdoaTensor l = random_labels(rng, 2);

  const SwapPattern plus90 = make_swap_pattern(1, 1, 1);
  AccdoaTensor unit_x(3, 13, 1);
  unit_x(0, 0, 0) = 1.0;
  const AccdoaTensor turned = swap_label_axes(unit_x, plus90);
  CHECK(turned(0, 0, 0) == 0.0);
  CHECK(turned(1, 0, 0) == 1.0);
  const FeatureTensor sf = swap_feature_channels(f, plus90);
  CHECK((sf.channel(4) == -f.channel(5)).all());  // I_x' = -I_y
  CHECK((sf.channel(5) == f.channel(4)).all());   // I_y' = I_x
  CHECK((sf.channel(kY) == f.channel(kX)).all());
  CHECK((sf.channel(kX) == f.channel(kY)).all());
  CHECK((sf.channel(kW) == f.channel(kW)).all());

  for (const auto& p : enumerate_swap_patterns()) {
    const auto [f1, l1] = channel_swap(f, l, p);
    const auto [f2, l2] = channel_swap(f1, l1, inverse(p));
    CHECK(f2 == f);
    CHECK(l2 == l);
  }
  const auto [fi, li] = channel_swap(f, l, enumerate_swap_patterns()[0]);
  CHECK(fi == f);
  CHECK(li == l);
}

TEST_CASE("pitch shift") {
  SeededRng rng(9);
  const FeatureTensor f = random_features(rng, 30, 5);
  CHECK(pitch_shift(f, 0) == f);
  const FeatureTensor up = pitch_shift(f, 3);
  for (Index c = 0; c < 7; ++c)
    for (Index b = 0; b < 30; ++b)
      for (Index t = 0; t < 5; ++t) CHECK(up(c, b, t) == f(c, std::max<Index>(b - 3, 0), t));

  for (int k = 1; k <= 10; ++k) {
    const FeatureTensor back = pitch_shift(pitch_shift(f, k), -k);
    for (Index c = 0; c < 7; ++c)
      for (Index b = 0; b < 30; ++b)
        for (Index t = 0; t < 5; ++t) {
          if (b < 30 - k) CHECK(back(c, b, t) == f(c, b, t));
          else CHECK(back(c, b, t) == f(c, 29 - k, t));
        }
  }
  CHECK_THROWS_AS(pitch_shift(f, 11), Error);
  CHECK_THROWS_AS(pitch_shift(f, -11), Error);
}

TEST_CASE("frame shift laws") {
  SeededRng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const Index tl = std::uniform_int_distribution<Index>(1, 12)(rng);
    const Index extra = std::uniform_int_distribution<Index>(0, 7)(rng);
    const FeatureTensor f = random_features(rng, 6, tl * 8 + extra);
    const AccdoaTensor l = random_labels(rng, tl);

    const auto [f0, l0] = frame_shift(f, l, 0);
    CHECK(f0 == f);
    CHECK(l0 == l);
    const auto [fc, lc] = frame_shift(f, l, 8 * tl);
    CHECK(fc == f);
    CHECK(lc == l);

    std::uniform_int_distribution<Index> pick(0, 2 * tl);
    const Index a = 8 * pick(rng), b = 8 * pick(rng);
    const auto [fa, la] = frame_shift(f, l, a);
    const auto [fab, lab] = frame_shift(fa, la, b);
    const auto [fs, ls] = frame_shift(f, l, (a + b) % (8 * tl));
    CHECK(fab == fs);
    CHECK(lab == ls);

    // Direct recomputation of a single shift.
    for (Index c = 0; c < 7; ++c)
      for (Index t = 0; t < f.frames(); ++t) {
        const Index src = t < 8 * tl ? ((t - a) % (8 * tl) + 8 * tl) % (8 * tl) : t;
        CHECK(fa(c, 0, t) == f(c, 0, src));
      }
  }
  SeededRng r2(11);
  CHECK_THROWS_AS(frame_shift(random_features(r2, 2, 16), random_labels(r2, 2), 3), Error);
}

TEST_CASE("time mask") {
  SeededRng rng(12);
  const FeatureTensor f = random_features(rng, 4, 800);
  const AccdoaTensor l = random_labels(rng, 100);
  const auto [mf, ml] = time_mask(f, l, 160, 80);
  for (Index t = 0; t < 800; ++t) {
    const bool masked = t >= 160 && t < 240;
    for (Index c = 0; c < 7; ++c)
      for (Index b = 0; b < 4; ++b) CHECK(mf(c, b, t) == (masked ? 0.0f : f(c, b, t)));
  }
  int zeroed = 0;
  for (Index t = 0; t < 100; ++t) {
    const bool masked = t >= 20 && t < 30;
    bool all_zero = true;
    for (Index a = 0; a < 3; ++a)
      for (Index c = 0; c < 13; ++c) {
        if (!masked) CHECK(ml(a, c, t) == l(a, c, t));
        all_zero = all_zero && ml(a, c, t) == 0.0;
      }
    if (masked && all_zero) ++zeroed;
  }
  CHECK(zeroed == 10);

  CHECK_THROWS_AS(time_mask(f, l, 4, 80), Error);     // misaligned start
  CHECK_THROWS_AS(time_mask(f, l, 0, 200), Error);    // ratio above 1/10
  CHECK_THROWS_AS(time_mask(f, l, 0, 8), Error);      // ratio below 1/20
  CHECK_THROWS_AS(time_mask(f, l, 760, 80), Error);   // runs past the end
  const auto [f0, l0] = time_mask(f, l, 0, 0, 0.0, 0.1);
  CHECK(f0 == f);
  CHECK(l0 == l);
}

TEST_CASE("moderate mixup keeps the dominant label") {
  SeededRng rng(13);
  const FeatureTensor fa = random_features(rng, 4, 16), fb = random_features(rng, 4, 16);
  const AccdoaTensor la = random_labels(rng, 2), lb = random_labels(rng, 2);
  const auto [f1, l1] = moderate_mixup(fa, la, fb, lb, 1.0);
  CHECK(f1 == fa);
  CHECK(l1 == la);
  const auto [f0, l0] = moderate_mixup(fa, la, fb, lb, 0.0);
  CHECK(f0 == fb);
  CHECK(l0 == lb);
  const auto [f7, l7] = moderate_mixup(fa, la, fb, lb, 0.7);
  CHECK(l7 == la);
  for (Index i = 0; i < f7.size(); ++i)
    CHECK(f7.values()[i] == doctest::Approx(0.7 * fa.values()[i] + 0.3 * fb.values()[i]).epsilon(1e-6));
  CHECK(moderate_mixup(fa, la, fb, lb, 0.5).second == la);
  CHECK(moderate_mixup(fa, la, fb, lb, 0.4999).second == lb);
  CHECK_THROWS_AS(moderate_mixup(fa, la, random_features(rng, 4, 8), lb, 0.5), Error);
}

TEST_CASE("beta sampling") {
  SeededRng rng(14);
  constexpr int n = 100000;
  int middle = 0;
  double mean_uniform = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_lambda(rng, 0.2);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
    middle += x >= 0.4 && x <= 0.6;
    mean_uniform += sample_lambda(rng, 1.0) / n;
  }
  const double p = oracle::incomplete_beta(0.6, 0.2, 0.2) - oracle::incomplete_beta(0.4, 0.2, 0.2);
  CHECK(p < 0.12);
  const double observed = static_cast<double>(middle) / n;
  CHECK(observed < 0.12);
  CHECK(std::abs(observed - p) < 5.0 * std::sqrt(p * (1 - p) / n));
  CHECK(std::abs(mean_uniform - 0.5) < 0.01);

  // Empirical CDF against the oracle at a few points.
  SeededRng r2(15);
  std::vector<double> draws(20000);
  for (double& d : draws) d = sample_lambda(r2, 0.2);
  for (double x : {0.01, 0.1, 0.3, 0.5, 0.8, 0.95}) {
    const double emp = static_cast<double>(std::count_if(draws.begin(), draws.end(), [x](double d) { return d <= x; })) /
                       static_cast<double>(draws.size());
    CHECK(std::abs(emp - oracle::incomplete_beta(x, 0.2, 0.2)) < 0.015);
  }
}

TEST_CASE("incomplete beta oracle sanity") {
  CHECK(oracle::incomplete_beta(0.3, 1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(oracle::incomplete_beta(0.5, 0.2, 0.2) == doctest::Approx(0.5).epsilon(1e-9));
  // I_x(2, 2) = 3x^2 - 2x^3
  CHECK(oracle::incomplete_beta(0.25, 2.0, 2.0) == doctest::Approx(3 * 0.0625 - 2 * 0.015625).epsilon(1e-9));
}

TEST_CASE("pipeline: identity, determinism, pattern frequencies") {
  SeededRng rng(16);
  const Sample a{random_features(rng, 20, 80), random_labels(rng, 10)};
  const Sample b{random_features(rng, 20, 80), random_labels(rng, 10)};

  SeededRng r0(1);
  const auto id = augment_pipeline(a, b, AugmentConfig::identity(), r0);
  CHECK(id.sample.features == a.features);
  CHECK(id.sample.labels == a.labels);

  AugmentConfig cfg;
  cfg.mode = AugmentMode::All;
  SeededRng r1(99), r2(99), r3(100);
  bool differs = false;
  for (int i = 0; i < 20; ++i) {
    const auto x = augment_pipeline(a, b, cfg, r1);
    const auto y = augment_pipeline(a, b, cfg, r2);
    const auto z = augment_pipeline(a, b, cfg, r3);
    CHECK(x.sample.features == y.sample.features);
    CHECK(x.sample.labels == y.sample.labels);
    differs = differs || !(x.sample.features == z.sample.features);
  }
  CHECK(differs);

  AugmentConfig cs = AugmentConfig::identity();
  cs.cs_prob = 1.0;
  std::vector<int> counts(16, 0);
  SeededRng r4(5);
  const Sample tiny{random_features(rng, 2, 8), random_labels(rng, 1)};
  constexpr int trials = 16000;
  for (int i = 0; i < trials; ++i) ++counts[*augment_pipeline(tiny, tiny, cs, r4).trace.swap_pattern];
  for (int c : counts) CHECK(std::abs(static_cast<double>(c) / trials - 1.0 / 16.0) < 0.01);
}

TEST_CASE("pipeline output labels stay valid") {
  SeededRng rng(17);
  AugmentConfig cfg;
  cfg.mode = AugmentMode::All;
  cfg.cs_prob = cfg.fs_prob = cfg.tm_prob = cfg.mm_prob = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Sample a{random_features(rng, 20, 160), random_labels(rng, 20)};
    const Sample b{random_features(rng, 20, 160), random_labels(rng, 20)};
    const auto out = augment_pipeline(a, b, cfg, rng);
    for (Index c = 0; c < 13; ++c)
      for (Index t = 0; t < 20; ++t) {
        const double n = Eigen::Vector3d(out.sample.labels(0, c, t), out.sample.labels(1, c, t),
                                         out.sample.labels(2, c, t)).norm();
        CHECK((std::abs(n) < 1e-9 || std::abs(n - 1.0) < 1e-9));
      }
  }
}

TEST_CASE("config parsing and warnings") {
  std::istringstream in("# comment\nmode = tm_mm\ncs_prob = 0.25\nseed = 3\n");
  const AugmentConfig c = parse_augment_config(in);
  CHECK(c.mode == AugmentMode::TmMm);
  CHECK(c.cs_prob == 0.25);
  CHECK(c.seed == 3);
  CHECK_FALSE(c.frame_shift_enabled());
  CHECK(c.time_mask_enabled());

  std::istringstream again(format_augment_config(c));
  const AugmentConfig d = parse_augment_config(again);
  CHECK(format_augment_config(d) == format_augment_config(c));

  std::istringstream unknown("cs_probability = 0.1\n");
  CHECK_THROWS_AS(parse_augment_config(unknown), Error);
  std::istringstream bad("cs_prob = 1.5\n");
  CHECK_THROWS_AS(parse_augment_config(bad), Error);

  AugmentConfig all;
  all.mode = AugmentMode::All;
  CHECK_FALSE(config_warnings(all).empty());
  CHECK(config_warnings(AugmentConfig{}).empty());
}
