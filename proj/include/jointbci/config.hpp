// Copyright 2026 The jointbci Authors
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

#ifndef JOINTBCI_CONFIG_HPP
#define JOINTBCI_CONFIG_HPP

#include <string>
#include <vector>

#include "jointbci/bandpass.hpp"
#include "jointbci/metrics.hpp"
#include "jointbci/paradigm.hpp"
#include "jointbci/spl.hpp"
#include "jointbci/subject.hpp"

namespace jointbci {

struct DecoderConfig {
  double svm_c = 1.0;
  int n_pairs = 3;
  BandpassSpec bandpass;  // defaults to 8-30 Hz, order 4
  std::vector<std::string> channel_subset;  // empty = use all channels
  double calib_bound = 50.0;

  TrainOptions train_options(double val_fraction) const;
};

struct PaceConfig {
  double lambda0 = 0.2;
  double dlambda = 0.05;
  double val_fraction = 0.25;
};

struct OutputConfig {
  bool export_epochs = false;
  bool include_window_traces = false;
  IntraMetric intra_metric = IntraMetric::ConcatStd;
};

struct ReplayConfig {
  int trials_per_session = 0;  // 0: derive sessions from session config
};

/// One experiment, fully specified. Every field has a sensible default;
/// a config file only overrides what it mentions.
struct ExperimentConfig {
  SessionConfig session;
  SubjectParams subject;
  GenerationParams generation;
  DecoderConfig decoder;
  PaceConfig pace;
  OutputConfig output;
  ReplayConfig replay;
  std::uint64_t seed = 0;  // default; the CLI --seed flag overrides

  void validate() const;
  bool mi_window_exceeds_trial() const;
};

/// Paper montage: 20 electrodes over the sensorimotor strip, CPz reference.
ChannelLayout default_layout();

ExperimentConfig default_config();

/// Parse a JSON config file over the defaults. Unknown keys and invariant
/// violations raise ParameterError naming the offending field.
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON rendering of a config (sorted keys, all fields).
std::string config_to_json(const ExperimentConfig& config);

ExperimentConfig config_from_json_text(const std::string& text);

/// Stable 64-bit digest of the canonicalized config, as hex.
std::string config_hash(const ExperimentConfig& config);

}  // namespace jointbci

#endif  // JOINTBCI_CONFIG_HPP
