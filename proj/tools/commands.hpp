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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seld/augment.hpp"

namespace seld::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kSuccess = 0, kInputError = 1, kInternalError = 2 };

struct RunConfig {
  std::string subcommand;

  // shared
  std::vector<fs::path> inputs;
  fs::path output;
  int n_classes = kNumClasses;
  std::uint64_t seed = 17;
  int threads = 1;

  // extract / stats
  fs::path manifest;
  fs::path out_dir;
  fs::path stats;
  bool refit_stats = false;

  // augment / encode
  fs::path features;
  fs::path labels;
  fs::path partner_features;
  fs::path partner_labels;
  fs::path out_features;
  fs::path out_labels;
  fs::path config_file;
  std::map<std::string, std::string> config_overrides;
  AugmentConfig augment;
  Index frames = -1;

  // decode / score / ensemble
  fs::path pred;
  fs::path ref;
  fs::path report;
  fs::path out_csv;
  double threshold = 0.5;
  bool threshold_sweep = false;
  std::vector<double> thresholds = {0.3, 0.5, 0.7};
  bool micro = false;

  // gradcheck
  std::string shape = "4,6,5";
  int ratio = 2;
  int seeds = 5;
  double eps = 1e-5;
  bool corrupt_backward = false;
};

int cmd_extract(const RunConfig& run);
int cmd_stats(const RunConfig& run);
int cmd_augment(const RunConfig& run);
int cmd_encode(const RunConfig& run);
int cmd_decode(const RunConfig& run);
int cmd_score(const RunConfig& run);
int cmd_gradcheck(const RunConfig& run);
int cmd_ensemble(const RunConfig& run);
int cmd_synth(const RunConfig& run);

}  // namespace seld::cli
