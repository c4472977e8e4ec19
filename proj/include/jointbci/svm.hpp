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

#ifndef JOINTBCI_SVM_HPP
#define JOINTBCI_SVM_HPP

#include <Eigen/Core>
#include <vector>

#include "jointbci/epoch.hpp"

namespace jointbci {

/// Linear soft-margin decoder with per-sample weights:
///   min_{w,b} 0.5 ||w||^2 + C sum_i v_i max(0, 1 - y_i (w.x_i + b))
/// plus a sigmoid posterior p_left(f) = 1 / (1 + exp(calib_a f + calib_b)).
struct DecoderModel {
  Eigen::VectorXd w;
  double b = 0.0;
  double C = 1.0;
  double calib_a = 0.0;
  double calib_b = 0.0;
};

struct Prediction {
  double decision = 0.0;
  Label label = Label::Left;  // sign(decision); 0 resolves to Left
  double p_left = 0.5;
};

struct SvmOptions {
  double tolerance = 1e-6;      // maximal KKT violation at convergence
  long max_steps_per_sample = 10000;
  double calib_bound = 50.0;    // |calib_a| clamp for separable fits
};

/// Fit by dual decomposition with maximal-violating-pair working-set
/// selection (two dual coordinates per step, upper bounds C*v_i). Fully
/// deterministic: ties resolve to the lowest sample index.
DecoderModel fit_weighted_svm(const Eigen::MatrixXd& features,  // n x d
                              const std::vector<int>& labels,   // +1/-1
                              const Eigen::VectorXd& weights,
                              double C,
                              const SvmOptions& options = {});

/// w.x + b, exactly.
double decision_value(const DecoderModel& model, const Eigen::VectorXd& x);

/// max(0, 1 - y f(x)); the sample weight is not folded in.
double per_sample_hinge_loss(const DecoderModel& model,
                             const Eigen::VectorXd& x, int y);

/// Primal objective at the model's (w, b) for a dataset.
double svm_objective(const DecoderModel& model, const Eigen::MatrixXd& features,
                     const std::vector<int>& labels,
                     const Eigen::VectorXd& weights);

/// Platt-style sigmoid fit of p(Left | decision) on (decision, label)
/// pairs with smoothed targets; writes calib_a <= 0 and calib_b into the
/// model. Separable fits are clamped to options.calib_bound.
void calibrate_posterior(DecoderModel& model, const Eigen::MatrixXd& features,
                         const std::vector<int>& labels,
                         const SvmOptions& options = {});

double posterior_left(const DecoderModel& model, double decision);

Prediction predict(const DecoderModel& model, const Eigen::VectorXd& x);

}  // namespace jointbci

#endif  // JOINTBCI_SVM_HPP
