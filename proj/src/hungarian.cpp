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


#include <algorithm>
#include <limits>
#include <vector>

#include "seld/metrics.hpp"

namespace seld {

// Shortest augmenting path with row/column potentials; O(n^2 m) for an
// n x m matrix with n <= m.
Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  Assignment result;
  if (cost.rows() == 0 || cost.cols() == 0) return result;
  if (!cost.allFinite()) throw Error(Errc::InvalidArgument, "assignment costs must be finite");

  const bool transposed = cost.rows() > cost.cols();
  const Eigen::MatrixXd a = transposed ? Eigen::MatrixXd(cost.transpose()) : cost;
  const auto n = static_cast<int>(a.rows());
  const auto m = static_cast<int>(a.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // 1-based; column 0 is a virtual sink.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_v(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double reduced = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < min_v[j]) {
          min_v[j] = reduced;
          way[j] = j0;
        }
        if (min_v[j] < delta) {
          delta = min_v[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_v[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= m; ++j) {
    if (match[j] == 0) continue;
    const int row = match[j] - 1;
    const int col = j - 1;
    result.pairs.emplace_back(transposed ? col : row, transposed ? row : col);
    result.total_cost += a(row, col);
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

}  // namespace seld
