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

#ifndef JOINTBCI_PARADIGM_HPP
#define JOINTBCI_PARADIGM_HPP

#include <cstdint>
#include <vector>

#include "jointbci/metrics.hpp"
#include "jointbci/subject.hpp"
#include "jointbci/svm.hpp"

namespace jointbci {

struct ExperimentConfig;  // defined in config.hpp

enum class LearnMode { Joint, CoAdaptive };

/// Session structure and online scoring parameters.
struct SessionConfig {
  int n_sessions = 5;          // calibration + feedback sessions
  int trials_per_class = 20;   // per class, per feedback session
  int calibration_trials_per_class = 0;  // 0 means trials_per_class
  double threshold_t = 0.7;    // successful-trial threshold
  double alpha = 0.2;          // feedback pace
  double window_s = 1.0;       // online scoring window
  double hop_s = 1.0 / 60.0;   // one display frame
  double mi_start_s = 0.5;     // analysis window inside the MI period
  double mi_end_s = 4.5;
  double slice_window_s = 1.0;  // pseudo-online fixed-slice grid
  double slice_hop_s = 1.0;
  LearnMode mode = LearnMode::Joint;

  void validate() const;
  int calibration_per_class() const {
    return calibration_trials_per_class > 0 ? calibration_trials_per_class
                                            : trials_per_class;
  }
};

/// Target brightness pair driven by the decoder posterior. The two values
/// always sum to one and stay inside [0, 1].
struct FeedbackState {
  double c_left = 0.5;
  double c_right = 0.5;
  long update_count = 0;
};

/// c_left += alpha * (p_left - 0.5) * 2, clamped to [0, 1];
/// c_right mirrors it exactly.
void update_feedback(FeedbackState& state, double p_left, double alpha);

/// Outcome of one scored trial.
struct TrialOutcome {
  Label label = Label::Left;
  InstructionKind instruction = InstructionKind::None;
  bool pair_first = true;
  std::vector<std::uint8_t> window_correct;
  double accuracy = 0.0;  // mean(window_correct), exactly
  bool success = false;   // accuracy >= threshold
  double mean_p_left = 0.0;
  std::vector<double> decision_trace;
};

/// Hard-label scoring of a trial from its per-window feature vectors.
TrialOutcome score_trial(const DecoderModel& model,
                         const std::vector<Eigen::VectorXd>& window_features,
                         Label label, double threshold_t);

/// Copy when the pair-first trial met the threshold, New otherwise;
/// the co-adaptive baseline never issues instructions.
InstructionKind next_instruction(const TrialOutcome& previous, LearnMode mode);

/// Optional side outputs of a run, for model export.
struct ExperimentArtifacts {
  TrainedDecoder final_decoder;       // trained after the last session
  std::string training_data_digest;   // over everything it saw
};

/// Run a full experiment: calibration, per-session decoder updates
/// (self-paced in Joint mode, plain retraining in CoAdaptive mode),
/// copy/new pairing, per-window feedback. Deterministic given the seed.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::uint64_t seed,
                                std::vector<Epoch>* exported_epochs = nullptr,
                                ExperimentArtifacts* artifacts = nullptr);

/// Pseudo-online pass over recorded trials: sessions are rebuilt from the
/// configured session sizes, decoders retrain at the same boundaries, and
/// trials are scored on the fixed-slice grid. Same report schema.
ExperimentReport run_replay(const ExperimentConfig& config,
                            const std::vector<Epoch>& epochs,
                            std::uint64_t seed,
                            ExperimentArtifacts* artifacts = nullptr);

}  // namespace jointbci

#endif  // JOINTBCI_PARADIGM_HPP
