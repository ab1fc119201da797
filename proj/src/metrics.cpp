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


#include "seld/metrics.hpp"

#include "seld/dataset_io.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace seld {

SegmentView segment_events(const EventList& events, int segment_len) {
  if (segment_len <= 0) throw Error(Errc::InvalidArgument, "segment length must be positive");
  SegmentView view;
  for (const Event& e : events) {
    if (e.frame < 0) throw Error(Errc::FrameOutOfRange, "negative frame index");
    auto& doas = view[{e.frame / segment_len, e.class_id}];
    const std::pair<double, double> doa(e.azimuth, e.elevation);
    if (std::find(doas.begin(), doas.end(), doa) == doas.end()) doas.push_back(doa);
  }
  return view;
}

CellMatch match_cell(const std::vector<Eigen::Vector3d>& preds, const std::vector<Eigen::Vector3d>& refs) {
  CellMatch out;
  Eigen::MatrixXd cost(static_cast<Index>(preds.size()), static_cast<Index>(refs.size()));
  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t j = 0; j < refs.size(); ++j)
      cost(static_cast<Index>(i), static_cast<Index>(j)) = angular_distance(preds[i], refs[j]);
  const Assignment a = solve_assignment(cost);
  out.pairs = a.pairs;
  for (auto [i, j] : a.pairs) out.distances.push_back(cost(i, j));
  out.unmatched_preds = static_cast<int>(preds.size() - a.pairs.size());
  out.unmatched_refs = static_cast<int>(refs.size() - a.pairs.size());
  return out;
}

namespace {

std::vector<Eigen::Vector3d> to_vectors(const std::vector<std::pair<double, double>>& doas) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(doas.size());
  for (auto [az, el] : doas) out.push_back(doa_to_unit_vector(az, el));
  return out;
}

double percent(double num, double den) { return den > 0.0 ? 100.0 * num / den : 0.0; }

}  // namespace

SeldScores compute_seld_scores(const EventList& preds, const EventList& refs, const ScoreOptions& options) {
  validate_events(preds, options.n_classes);
  validate_events(refs, options.n_classes);

  const SegmentView pred_view = segment_events(preds, options.segment_len);
  const SegmentView ref_view = segment_events(refs, options.segment_len);

  SeldScores scores;
  scores.per_class.assign(static_cast<std::size_t>(options.n_classes), {});

  std::set<int> segments;
  for (const auto& [key, _] : pred_view) segments.insert(key.segment);
  for (const auto& [key, _] : ref_view) segments.insert(key.segment);

  static const std::vector<std::pair<double, double>> kNone;
  double errors = 0.0;
  double n_total = 0.0;
  for (int seg : segments) {
    int seg_fp = 0, seg_fn = 0, seg_n = 0;
    for (int c = 0; c < options.n_classes; ++c) {
      auto pit = pred_view.find({seg, c});
      auto rit = ref_view.find({seg, c});
      const auto& p = pit == pred_view.end() ? kNone : pit->second;
      const auto& r = rit == ref_view.end() ? kNone : rit->second;
      if (p.empty() && r.empty()) continue;

      const CellMatch m = match_cell(to_vectors(p), to_vectors(r));
      ClassScores& cs = scores.per_class[static_cast<std::size_t>(c)];
      int tp = 0, fp = m.unmatched_preds, fn = m.unmatched_refs;
      for (double d : m.distances) {
        if (d < options.spatial_threshold) {
          ++tp;
        } else {
          ++fp;
          ++fn;
        }
        cs.distance_sum += d;
      }
      cs.tp += tp;
      cs.fp += fp;
      cs.fn += fn;
      cs.n_refs += static_cast<int>(r.size());
      cs.n_matched += static_cast<int>(m.pairs.size());
      seg_fp += fp;
      seg_fn += fn;
      seg_n += static_cast<int>(r.size());
    }
    const int substitutions = std::min(seg_fp, seg_fn);
    const int deletions = std::max(0, seg_fn - seg_fp);
    const int insertions = std::max(0, seg_fp - seg_fn);
    errors += substitutions + deletions + insertions;
    n_total += seg_n;
  }

  // Per-class figures.
  int tp = 0, fp = 0, fn = 0, n_refs = 0, n_matched = 0;
  double distance_sum = 0.0;
  for (ClassScores& cs : scores.per_class) {
    cs.f1 = percent(2.0 * cs.tp, 2.0 * cs.tp + cs.fp + cs.fn);
    cs.le = cs.n_matched > 0 ? cs.distance_sum / cs.n_matched : 180.0;
    cs.lr = percent(cs.n_matched, cs.n_refs);
    tp += cs.tp;
    fp += cs.fp;
    fn += cs.fn;
    n_refs += cs.n_refs;
    n_matched += cs.n_matched;
    distance_sum += cs.distance_sum;
  }

  scores.er_undefined = n_total == 0.0;
  scores.er = scores.er_undefined ? 0.0 : errors / n_total;

  if (preds.empty() && refs.empty()) {
    scores.f1 = 100.0;
    scores.le = 0.0;
    scores.lr = 100.0;
    return scores;
  }

  if (options.averaging == Averaging::Micro) {
    scores.f1 = percent(2.0 * tp, 2.0 * tp + fp + fn);
    scores.le = n_matched > 0 ? distance_sum / n_matched : 180.0;
    scores.lr = percent(n_matched, n_refs);
    return scores;
  }

  double f1_sum = 0.0, le_sum = 0.0, lr_sum = 0.0;
  int f1_classes = 0, ref_classes = 0;
  for (const ClassScores& cs : scores.per_class) {
    if (cs.tp + cs.fp + cs.fn > 0) {
      f1_sum += cs.f1;
      ++f1_classes;
    }
    if (cs.n_refs > 0) {
      le_sum += cs.le;
      lr_sum += cs.lr;
      ++ref_classes;
    }
  }
  scores.f1 = f1_classes > 0 ? f1_sum / f1_classes : 0.0;
  scores.le = ref_classes > 0 ? le_sum / ref_classes : 180.0;
  scores.lr = ref_classes > 0 ? lr_sum / ref_classes : 0.0;
  return scores;
}

std::vector<SweepRow> threshold_sweep(const AccdoaTensor& prediction, const EventList& refs,
                                      const std::vector<double>& thresholds, const ScoreOptions& options) {
  std::vector<SweepRow> rows;
  for (double th : thresholds) {
    const EventList decoded = decode(prediction, th);
    rows.push_back({th, decoded.size(), compute_seld_scores(decoded, refs, options)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// reports

void write_score_csv(const SeldScores& s, std::ostream& out) {
  out << "metric,value";
  for (std::size_t c = 0; c < s.per_class.size(); ++c) out << ",class_" << c;
  out << '\n';
  auto row = [&](const char* name, double value, auto per_class) {
    out << name << ',' << value;
    for (const ClassScores& cs : s.per_class) out << ',' << per_class(cs);
    out << '\n';
  };
  row("ER", s.er, [](const ClassScores&) { return std::string(); });
  row("F1", s.f1, [](const ClassScores& cs) { return std::to_string(cs.f1); });
  row("LE", s.le, [](const ClassScores& cs) { return cs.n_refs > 0 ? std::to_string(cs.le) : std::string(); });
  row("LR", s.lr, [](const ClassScores& cs) { return cs.n_refs > 0 ? std::to_string(cs.lr) : std::string(); });
}

std::string summary_line(const SeldScores& s) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "ER %.2f F1 %.1f LE %.1f LR %.1f", s.er, s.f1, s.le, s.lr);
  return buf;
}

void write_sweep_table(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << std::left << std::setw(15) << "SED threshold" << std::right << std::setw(8) << "ER" << std::setw(8)
      << "F1(%)" << std::setw(8) << "LE(deg)" << std::setw(8) << "LR(%)" << '\n';
  for (const SweepRow& r : rows) {
    out << std::left << std::setw(15) << r.threshold << std::right << std::fixed << std::setprecision(2)
        << std::setw(8) << r.scores.er << std::setprecision(1) << std::setw(8) << r.scores.f1 << std::setw(8)
        << r.scores.le << std::setw(8) << r.scores.lr << '\n';
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  }
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "threshold,events,ER,F1,LE,LR\n";
  for (const SweepRow& r : rows)
    out << r.threshold << ',' << r.decoded_events << ',' << r.scores.er << ',' << r.scores.f1 << ',' << r.scores.le
        << ',' << r.scores.lr << '\n';
}

}  // namespace seld
