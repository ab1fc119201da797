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


#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace seld;
using namespace seld::cli;

namespace {

void add_augment_flags(CLI::App* app, RunConfig& run) {
  // Each flag maps onto the config key of the same name; flags win over --config.
  static const char* kKeys[] = {"cs_prob", "ps_range",      "fs_prob", "tm_prob", "tm_ratio_min",
                                "tm_ratio_max", "mm_prob", "mm_beta_alpha", "mode"};
  for (const char* key : kKeys) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    app->add_option_function<std::string>(
        flag, [&run, key](const std::string& v) { run.config_overrides[key] = v; }, std::string("override ") + key);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seld: SALSA features, augmentation, ACCDOA and SELD scoring"};
  app.require_subcommand(1);
  RunConfig run;
  std::optional<std::uint64_t> seed;

  auto* extract = app.add_subcommand("extract", "extract SALSA features for every clip in a manifest");
  extract->add_option("--manifest", run.manifest, "manifest file")->required();
  extract->add_option("--out-dir", run.out_dir, "output directory")->required();
  extract->add_option("--stats", run.stats, "normalization stats; fitted and written if missing");
  extract->add_flag("--refit", run.refit_stats, "refit stats even if the file exists");
  extract->add_option("--threads", run.threads)->check(CLI::PositiveNumber);

  auto* stats = app.add_subcommand("stats", "fit normalization stats");
  stats->add_option("features", run.inputs, "feature files");
  stats->add_option("--manifest", run.manifest, "fit from a manifest's audio instead");
  stats->add_option("--out", run.output)->required();
  stats->add_option("--threads", run.threads)->check(CLI::PositiveNumber);

  auto* augment = app.add_subcommand("augment", "augment one feature/label pair");
  augment->add_option("--features", run.features)->required();
  augment->add_option("--labels", run.labels, "label CSV or ACCDOA tensor")->required();
  augment->add_option("--partner-features", run.partner_features, "mixup partner features");
  augment->add_option("--partner-labels", run.partner_labels, "mixup partner labels");
  augment->add_option("--config", run.config_file, "key=value config file");
  augment->add_option("--seed", seed);
  augment->add_option("--out-features", run.out_features)->required();
  augment->add_option("--out-labels", run.out_labels)->required();
  add_augment_flags(augment, run);

  auto* encode = app.add_subcommand("encode", "label CSV -> ACCDOA tensor");
  encode->add_option("--labels", run.labels)->required();
  auto* frames_opt = encode->add_option("--frames", run.frames, "label frames");
  encode->add_option("--features", run.features, "take label frames from a feature file")->excludes(frames_opt);
  encode->add_option("--out", run.output)->required();

  auto* decode = app.add_subcommand("decode", "ACCDOA tensor -> label CSV");
  decode->add_option("--tensor", run.pred)->required();
  decode->add_option("--threshold", run.threshold)->check(CLI::PositiveNumber);
  decode->add_option("--out", run.output)->required();

  auto* score = app.add_subcommand("score", "segment-based SELD metrics");
  score->add_option("--pred", run.pred, "prediction CSV or ACCDOA tensor")->required();
  score->add_option("--ref", run.ref, "reference CSV")->required();
  score->add_option("--threshold", run.threshold)->check(CLI::PositiveNumber);
  score->add_flag("--threshold-sweep", run.threshold_sweep, "score at each of --thresholds");
  score->add_option("--thresholds", run.thresholds)->delimiter(',');
  score->add_option("--report", run.report, "CSV report path");
  score->add_flag("--micro", run.micro, "micro-average F1/LE/LR");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the SE blocks");
  gradcheck->add_option("--shape", run.shape, "C,F,T");
  gradcheck->add_option("--ratio", run.ratio);
  gradcheck->add_option("--seeds", run.seeds);
  gradcheck->add_option("--eps", run.eps);
  gradcheck->add_option("--seed", seed, "first seed");
  gradcheck->add_flag("--corrupt-backward", run.corrupt_backward, "negative control")->group("");

  auto* ensemble = app.add_subcommand("ensemble", "average ACCDOA tensors and decode");
  ensemble->add_option("tensors", run.inputs)->required();
  ensemble->add_option("--out", run.output)->required();
  ensemble->add_option("--csv", run.out_csv, "decoded CSV (default: --out with .csv)");
  ensemble->add_option("--threshold", run.threshold)->check(CLI::PositiveNumber);
  ensemble->add_option("--threads", run.threads)->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "write the bundled two-second synthetic scene");
  synth->add_option("--out-dir", run.out_dir)->required();
  synth->add_option("--seed", seed);

  for (auto* sub : {extract, stats, augment, encode, score, ensemble})
    sub->add_option("--classes", run.n_classes, "number of classes")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kInputError;
  }

  run.subcommand = app.get_subcommands().front()->get_name();
  if (seed) {
    run.seed = *seed;
    run.augment.seed = *seed;
  }

  try {
    if (run.subcommand == "extract") return cmd_extract(run);
    if (run.subcommand == "stats") {
      if (run.inputs.empty() == run.manifest.empty())
        throw Error(Errc::InvalidArgument, "give either feature files or --manifest");
      return cmd_stats(run);
    }
    if (run.subcommand == "augment") {
      // An explicit --seed beats any seed in the config file.
      if (seed) run.config_overrides["seed"] = std::to_string(*seed);
      return cmd_augment(run);
    }
    if (run.subcommand == "encode") return cmd_encode(run);
    if (run.subcommand == "decode") return cmd_decode(run);
    if (run.subcommand == "score") return cmd_score(run);
    if (run.subcommand == "gradcheck") return cmd_gradcheck(run);
    if (run.subcommand == "ensemble") return cmd_ensemble(run);
    if (run.subcommand == "synth") return cmd_synth(run);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::InvariantViolation ? kInternalError : kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}
