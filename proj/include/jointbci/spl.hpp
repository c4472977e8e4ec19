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

#ifndef JOINTBCI_SPL_HPP
#define JOINTBCI_SPL_HPP

#include <cstdint>
#include <vector>

#include "jointbci/csp.hpp"
#include "jointbci/svm.hpp"

namespace jointbci {

/// Pace state of the self-paced loop: the recruited fraction, its
/// per-round increment, and the loss threshold derived from them.
struct PaceSchedule {
  double capital_lambda = 0.2;  // recruited fraction, in (0, 1]
  double delta_lambda = 0.05;   // increment per round, > 0
  double lambda = 0.5;          // loss threshold, in (0, 1)

  void validate() const;
};

/// Per-sample weights paired with the normalized losses they came from.
/// v_i is zero exactly when loss_i >= lambda and decreases with loss below.
struct SampleWeightVector {
  Eigen::VectorXd v;
  Eigen::VectorXd losses;
};

/// Closed-form weight for a normalized loss:
///   v = log(loss + (1 - lambda)) / log(1 - lambda)  when loss < lambda,
///   v = 0 otherwise.
double weight_from_loss(double loss, double lambda);

/// Self-paced objective
///   E = sum_i v_i L_i + (1 - lambda) v_i - (1 - lambda)^{v_i} / log(1 - lambda).
double spl_objective(const Eigen::VectorXd& losses, const Eigen::VectorXd& v,
                     double lambda);

/// Normalize raw losses into [0, 1) preserving order. The scale is chosen
/// so the largest loss sits strictly below the threshold clamp, keeping
/// full recruitment representable.
Eigen::VectorXd normalize_losses(const Eigen::VectorXd& raw);

/// Threshold so that about a `capital_lambda` fraction of samples has
/// normalized loss strictly below it (interpolated quantile, clamped to
/// [1e-6, 1 - 1e-6]; ties at the quantile break toward recruitment).
double lambda_from_pace(const Eigen::VectorXd& raw_losses,
                        double capital_lambda);

struct SplIterationTrace {
  int iteration = 0;
  double capital_lambda = 0.0;
  double lambda = 0.0;
  int recruited = 0;
  double train_mean_loss = 0.0;
  double val_accuracy = 0.0;
  bool class_fallback = false;  // a class emptied and its best sample was kept
};

/// A trial reduced to what training needs: its second moments and label.
struct TrainingSample {
  TrialMoments moments;
  Label label = Label::Left;
};

struct TrainedDecoder {
  SpatialFilterBank bank;
  DecoderModel model;
  SampleWeightVector weights;  // over the training split, at best_iteration
  int best_iteration = 0;
  double val_accuracy = 0.0;
  std::vector<SplIterationTrace> trace;
  // Decision values of the winning model on its training split, for
  // weighted score summaries.
  Eigen::VectorXd train_decisions;
  std::vector<Label> train_labels;
};

struct TrainOptions {
  double svm_c = 1.0;
  int n_pairs = 3;
  double val_fraction = 0.25;  // used by the single-set overload
  SvmOptions svm;
};

/// The full self-paced alternating loop: a seeded class-stratified subset
/// of ceil(lambda0 * N) samples starts the fit, each round raises the
/// recruited fraction, reselects samples by their loss under the previous
/// model, refits weighted CSP + weighted SVM with the closed-form weights,
/// and the round with the best validation accuracy wins (earliest on ties).
TrainedDecoder train_joint_decoder(const std::vector<TrainingSample>& train,
                                   const std::vector<TrainingSample>& val,
                                   double lambda0, double dlambda,
                                   std::uint64_t seed,
                                   const TrainOptions& options = {});

TrainedDecoder train_joint_decoder(const std::vector<Epoch>& train,
                                   const std::vector<Epoch>& val,
                                   double lambda0, double dlambda,
                                   std::uint64_t seed,
                                   const TrainOptions& options = {});

/// Convenience overloads: split off the last `val_fraction` of trials per
/// class as validation (temporal split, preserving class balance).
TrainedDecoder train_joint_decoder(const std::vector<TrainingSample>& data,
                                   double lambda0, double dlambda,
                                   std::uint64_t seed,
                                   const TrainOptions& options = {});

TrainedDecoder train_joint_decoder(const std::vector<Epoch>& data,
                                   double lambda0, double dlambda,
                                   std::uint64_t seed,
                                   const TrainOptions& options = {});

/// The RETRAIN baseline: unweighted CSP + SVM on everything, no pacing.
TrainedDecoder train_retrain_decoder(const std::vector<TrainingSample>& data,
                                     const TrainOptions& options = {});

TrainedDecoder train_retrain_decoder(const std::vector<Epoch>& data,
                                     const TrainOptions& options = {});

TrainingSample make_training_sample(const Epoch& epoch);

/// Per-class temporal split helper (last `val_fraction` of each class).
std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>>
split_train_val(const std::vector<TrainingSample>& data, double val_fraction);

}  // namespace jointbci

#endif  // JOINTBCI_SPL_HPP
