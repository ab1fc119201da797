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


// Independent reference implementations used as test oracles. None of
// these call into the library routines they are compared against.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

#include <Eigen/Core>

#include "seld/tensor.hpp"
#include "seld/types.hpp"

namespace oracle {

using seld::Index;

inline double rad(double deg) { return deg * std::numbers::pi / 180.0; }

inline Eigen::Vector3d unit(double az, double el) {
  return {std::cos(rad(el)) * std::cos(rad(az)), std::cos(rad(el)) * std::sin(rad(az)), std::sin(rad(el))};
}

inline double acos_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

// Direct O(N^2) DFT of one Hann-windowed frame.
inline std::vector<std::complex<double>> windowed_dft(const Eigen::RowVectorXf& x, Index start, Index n) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  for (Index k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
      const double ph = -2.0 * std::numbers::pi * static_cast<double>(k * i % n) / n;
      acc += w * static_cast<double>(x[start + i]) * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

// Minimum-cost assignment by exhaustive permutation search.
struct BruteAssignment {
  std::vector<std::pair<int, int>> pairs;
  double total = 0.0;
};

inline BruteAssignment brute_assignment(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  BruteAssignment best;
  best.total = std::numeric_limits<double>::infinity();
  if (rows == 0 || cols == 0) {
    best.total = 0.0;
    return best;
  }
  const bool flip = rows > cols;
  const int small = flip ? cols : rows;
  const int large = flip ? rows : cols;
  std::vector<int> perm(static_cast<std::size_t>(large));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    double total = 0.0;
    for (int i = 0; i < small; ++i) total += flip ? cost(perm[i], i) : cost(i, perm[i]);
    if (total < best.total - 1e-12) {
      best.total = total;
      best.pairs.clear();
      for (int i = 0; i < small; ++i) best.pairs.push_back(flip ? std::pair(perm[i], i) : std::pair(i, perm[i]));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::sort(best.pairs.begin(), best.pairs.end());
  return best;
}

// Segment-based SELD scoring written straight from the scoring rules,
// with exhaustive assignment per (segment, class) cell.
struct Scores {
  double er = 0.0, f1 = 0.0, le = 0.0, lr = 0.0;
};

inline Scores brute_scores(const seld::EventList& preds, const seld::EventList& refs, int n_classes,
                           bool macro = true, double threshold = 20.0, int segment_len = 10) {
  using Cell = std::map<std::pair<int, int>, std::vector<std::pair<double, double>>>;
  auto cells = [&](const seld::EventList& events) {
    Cell out;
    for (const auto& e : events) {
      auto& v = out[{e.frame / segment_len, e.class_id}];
      std::pair<double, double> d(e.azimuth, e.elevation);
      if (std::find(v.begin(), v.end(), d) == v.end()) v.push_back(d);
    }
    return out;
  };
  const Cell pc = cells(preds), rc = cells(refs);
  std::set<int> segs;
  for (auto& [k, _] : pc) segs.insert(k.first);
  for (auto& [k, _] : rc) segs.insert(k.first);

  std::vector<int> tp(n_classes), fp(n_classes), fn(n_classes), nref(n_classes), nmatch(n_classes);
  std::vector<double> dsum(n_classes);
  double err = 0.0, ntot = 0.0;
  for (int s : segs) {
    int sfp = 0, sfn = 0, sn = 0;
    for (int c = 0; c < n_classes; ++c) {
      std::vector<std::pair<double, double>> p, r;
      if (auto it = pc.find({s, c}); it != pc.end()) p = it->second;
      if (auto it = rc.find({s, c}); it != rc.end()) r = it->second;
      Eigen::MatrixXd cost(p.size(), r.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
          cost(i, j) = acos_distance(unit(p[i].first, p[i].second), unit(r[j].first, r[j].second));
      const auto a = brute_assignment(cost);
      int ctp = 0, cfp = static_cast<int>(p.size() - a.pairs.size()), cfn = static_cast<int>(r.size() - a.pairs.size());
      for (auto [i, j] : a.pairs) {
        const double d = cost(i, j);
        if (d < threshold) ++ctp; else { ++cfp; ++cfn; }
        dsum[c] += d;
      }
      tp[c] += ctp; fp[c] += cfp; fn[c] += cfn;
      nref[c] += static_cast<int>(r.size());
      nmatch[c] += static_cast<int>(a.pairs.size());
      sfp += cfp; sfn += cfn; sn += static_cast<int>(r.size());
    }
    err += std::min(sfp, sfn) + std::max(0, sfn - sfp) + std::max(0, sfp - sfn);
    ntot += sn;
  }

  Scores out;
  out.er = ntot > 0 ? err / ntot : 0.0;
  if (preds.empty() && refs.empty()) return {0.0, 100.0, 0.0, 100.0};
  auto f1_of = [](double t, double p, double n) { return t + p + n > 0 ? 200.0 * t / (2.0 * t + p + n) : 0.0; };
  if (!macro) {
    double t = 0, p = 0, n = 0, m = 0, r = 0, d = 0;
    for (int c = 0; c < n_classes; ++c) { t += tp[c]; p += fp[c]; n += fn[c]; m += nmatch[c]; r += nref[c]; d += dsum[c]; }
    out.f1 = f1_of(t, p, n);
    out.le = m > 0 ? d / m : 180.0;
    out.lr = r > 0 ? 100.0 * m / r : 0.0;
    return out;
  }
  double f1s = 0, les = 0, lrs = 0;
  int nf = 0, nr = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (tp[c] + fp[c] + fn[c] > 0) { f1s += f1_of(tp[c], fp[c], fn[c]); ++nf; }
    if (nref[c] > 0) {
      les += nmatch[c] > 0 ? dsum[c] / nmatch[c] : 180.0;
      lrs += 100.0 * nmatch[c] / nref[c];
      ++nr;
    }
  }
  out.f1 = nf > 0 ? f1s / nf : 0.0;
  out.le = nr > 0 ? les / nr : 180.0;
  out.lr = nr > 0 ? lrs / nr : 0.0;
  return out;
}

// Regularized incomplete beta I_x(a, b) by composite Simpson quadrature.
// For a < 1 the substitution t = u^(1/a) removes the endpoint singularity
// at 0; symmetry handles x > 1/2.
inline double incomplete_beta(double x, double a, double b, int panels = 20000) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > 0.5) return 1.0 - incomplete_beta(1.0 - x, b, a, panels);
  const double beta = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  const bool substitute = a < 1.0;
  const double upper = substitute ? std::pow(x, a) : x;
  auto g = [&](double u) {
    if (substitute) return std::pow(1.0 - std::pow(u, 1.0 / a), b - 1.0) / a;
    return std::pow(u, a - 1.0) * std::pow(1.0 - u, b - 1.0);
  };
  const double h = upper / panels;
  double s = g(0.0) + g(upper);
  for (int i = 1; i < panels; ++i) s += g(i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0 / beta;
}

// Squeeze-and-excitation written as explicit loops over one SE block.
inline std::vector<double> se_gate(const std::vector<double>& z, const Eigen::MatrixXd& w1, const Eigen::VectorXd& b1,
                                   const Eigen::MatrixXd& w2, const Eigen::VectorXd& b2) {
  const Index h = w1.rows(), d = w1.cols();
  std::vector<double> hidden(h), gate(d);
  for (Index i = 0; i < h; ++i) {
    double acc = b1[i];
    for (Index j = 0; j < d; ++j) acc += w1(i, j) * z[j];
    hidden[i] = acc > 0.0 ? acc : 0.0;
  }
  for (Index i = 0; i < d; ++i) {
    double acc = b2[i];
    for (Index j = 0; j < h; ++j) acc += w2(i, j) * hidden[j];
    gate[i] = 1.0 / (1.0 + std::exp(-acc));
  }
  return gate;
}

}  // namespace oracle
