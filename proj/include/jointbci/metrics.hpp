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

#ifndef JOINTBCI_METRICS_HPP
#define JOINTBCI_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jointbci/spl.hpp"
#include "jointbci/subject.hpp"

namespace jointbci {

/// Reading of the intra-class spread term in the separability ratio.
/// `ConcatStd` (default) is the Euclidean norm of the two concatenated
/// per-class per-dimension standard-deviation vectors; the alternatives
/// exist for sensitivity checks.
enum class IntraMetric { ConcatStd, SumNorms, PooledStd };

/// Between-class over within-class distance of two feature clouds
/// (rows are feature vectors). Population standard deviations throughout.
double feature_distance(const Eigen::MatrixXd& features_left,
                        const Eigen::MatrixXd& features_right,
                        IntraMetric metric = IntraMetric::ConcatStd);

/// Fraction of trials whose accuracy meets the threshold.
double success_proportion(const std::vector<double>& accuracies,
                          double threshold_t);

/// Moving average with the stated window, trailing and truncated at the
/// start so early values are real data.
std::vector<double> score_trajectory(const std::vector<double>& values,
                                     int window = 10);

/// sum(v_i s_i) / sum(v_i).
double weighted_score_mean(const std::vector<double>& decisions,
                           const std::vector<double>& weights);

/// Per-class Gaussian fit of decision values plus their weighted means.
struct ScoreDistribution {
  double mu_left = 0.0, sigma_left = 0.0;
  double mu_right = 0.0, sigma_right = 0.0;
  double weighted_mu_left = 0.0, weighted_mu_right = 0.0;
};

ScoreDistribution fit_score_distribution(
    const std::vector<double>& decisions_left,
    const std::vector<double>& weights_left,
    const std::vector<double>& decisions_right,
    const std::vector<double>& weights_right);

// ---------------------------------------------------------------------
// Experiment report

struct TrialRecord {
  int session = 0;           // 1-based
  int index_in_session = 0;  // 0-based
  int global_index = 0;
  Label label = Label::Left;
  InstructionKind instruction = InstructionKind::None;
  bool pair_first = true;
  std::string subject_mode;  // "good"/"bad", empty when replaying real data
  double accuracy = 0.0;     // online window accuracy; slice grid in replay
  double accuracy_slices = 0.0;  // pseudo-online fixed-slice accuracy
  bool success = false;
  double mean_decision = 0.0;
  double mean_p_left = 0.0;
  double final_c_left = 0.5;  // target brightness at the end of the trial
  int decoder_session = 0;    // boundary whose decoder scored this trial
  int n_windows = 0;
  std::vector<double> decision_trace;        // kept only when requested
  std::vector<std::uint8_t> window_correct;  // likewise
};

struct SessionSummary {
  int session = 0;
  double accuracy = 0.0;
  double success_proportion = 0.0;
  double distance = 0.0;  // feature separability under the evaluation bank
  double mu_left = 0.0, mu_right = 0.0;
  double sigma_left = 0.0, sigma_right = 0.0;
  double weighted_mu_left = 0.0, weighted_mu_right = 0.0;
};

struct ExperimentReport {
  std::string mode;  // "joint" or "coadaptive"
  std::uint64_t seed = 0;
  std::string config_hash;
  double online_accuracy = 0.0;  // best of the last two sessions
  std::vector<SessionSummary> sessions;
  std::vector<TrialRecord> trials;
  std::vector<double> trajectory_left;   // smoothed per-trial decisions
  std::vector<double> trajectory_right;
  std::vector<std::vector<SplIterationTrace>> training_traces;
};

}  // namespace jointbci

#endif  // JOINTBCI_METRICS_HPP
