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

#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "seld/accdoa.hpp"
#include "seld/types.hpp"

namespace seld {

// ---------------------------------------------------------------------------
// Assignment

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col)
  double total_cost = 0.0;
};

/// Minimum-cost assignment on a rectangular cost matrix (Hungarian method);
/// min(rows, cols) pairs are produced.
Assignment solve_assignment(const Eigen::MatrixXd& cost);

// ---------------------------------------------------------------------------
// Segments

struct CellKey {
  int segment = 0;
  int class_id = 0;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// Distinct DoAs per (segment, class), deduplicated by exact (az, el).
using SegmentView = std::map<CellKey, std::vector<std::pair<double, double>>>;

SegmentView segment_events(const EventList& events, int segment_len = kLabelFramesPerSegment);

struct CellMatch {
  std::vector<std::pair<int, int>> pairs;  // (pred index, ref index)
  std::vector<double> distances;           // degrees, per pair
  int unmatched_preds = 0;
  int unmatched_refs = 0;
};

CellMatch match_cell(const std::vector<Eigen::Vector3d>& preds, const std::vector<Eigen::Vector3d>& refs);

// ---------------------------------------------------------------------------
// Scores

enum class Averaging { Macro, Micro };

struct ClassScores {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int n_refs = 0;
  int n_matched = 0;
  double distance_sum = 0.0;
  double f1 = 0.0;  // percent
  double le = 0.0;  // degrees
  double lr = 0.0;  // percent
};

struct SeldScores {
  double er = 0.0;
  double f1 = 0.0;   // percent
  double le = 0.0;   // degrees
  double lr = 0.0;   // percent
  bool er_undefined = false;  // no reference events; er reported as 0
  std::vector<ClassScores> per_class;
};

struct ScoreOptions {
  double spatial_threshold = 20.0;  // a hit needs distance strictly below this
  int n_classes = kNumClasses;
  int segment_len = kLabelFramesPerSegment;
  Averaging averaging = Averaging::Macro;
};

SeldScores compute_seld_scores(const EventList& preds, const EventList& refs, const ScoreOptions& options = {});

struct SweepRow {
  double threshold = 0.0;
  std::size_t decoded_events = 0;
  SeldScores scores;
};

std::vector<SweepRow> threshold_sweep(const AccdoaTensor& prediction, const EventList& refs,
                                      const std::vector<double>& thresholds = {0.3, 0.5, 0.7},
                                      const ScoreOptions& options = {});

/// "metric,value,class_0,...": one row each for ER, F1, LE, LR.
void write_score_csv(const SeldScores& scores, std::ostream& out);
/// Aligned table, one row per threshold.
void write_sweep_table(const std::vector<SweepRow>& rows, std::ostream& out);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
/// "ER 0.00 F1 100.0 LE 0.0 LR 100.0"
std::string summary_line(const SeldScores& scores);

}  // namespace seld
