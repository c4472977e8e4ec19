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

#ifndef JOINTBCI_CSP_HPP
#define JOINTBCI_CSP_HPP

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "jointbci/epoch.hpp"

namespace jointbci {

/// Fitted spatial filter bank. Rows of `filters` are the n_pairs filters
/// with the largest class-1 eigenvalues followed by the n_pairs with the
/// smallest; `eigenvalues` are the matching whitened class-1 eigenvalues,
/// so eigenvalue k for class 1 and class 2 sum to one.
struct SpatialFilterBank {
  Eigen::MatrixXd filters;     // (2*n_pairs) x channels
  Eigen::VectorXd eigenvalues; // 2*n_pairs, in [0, 1]
  int n_pairs = 0;

  Eigen::Index n_filters() const { return filters.rows(); }
  Eigen::Index channels() const { return filters.cols(); }
};

/// Second-moment summary of one trial window; lets covariance and
/// log-variance features be recomputed for many filter banks without
/// touching the raw samples again.
struct TrialMoments {
  Eigen::MatrixXd scatter;  // X * X^T
  Eigen::VectorXd sum;      // row sums of X
  Eigen::Index n_samples = 0;
};

TrialMoments trial_moments(const Eigen::MatrixXd& data);

/// Trace-normalized covariance X X^T / trace(X X^T).
Eigen::MatrixXd trial_covariance(const Eigen::MatrixXd& data);
Eigen::MatrixXd trial_covariance(const Epoch& epoch);
Eigen::MatrixXd trial_covariance(const TrialMoments& moments);

/// Per-class composite covariances. Weights are normalized to sum to one
/// within each class before averaging, which leaves the generalized
/// eigenproblem unchanged but keeps the composite well-scaled when the
/// number of recruited samples varies.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> weighted_composite_covariance(
    const std::vector<Eigen::MatrixXd>& covs,
    const std::vector<double>& weights, const std::vector<Label>& labels);

SpatialFilterBank fit_weighted_csp(const std::vector<Eigen::MatrixXd>& covs,
                                   const std::vector<double>& weights,
                                   const std::vector<Label>& labels,
                                   int n_pairs);

SpatialFilterBank fit_weighted_csp(const std::vector<Epoch>& epochs,
                                   const std::vector<double>& weights,
                                   const std::vector<Label>& labels,
                                   int n_pairs);

/// Log-variance features: feature_k = log(var_k / sum_j var_j) where var_k
/// is the sample variance of the k-th filter's projection over time.
Eigen::VectorXd extract_features(const SpatialFilterBank& bank,
                                 const Eigen::MatrixXd& slice);

/// Same features straight from cached moments (no re-projection).
Eigen::VectorXd extract_features(const SpatialFilterBank& bank,
                                 const TrialMoments& moments);

}  // namespace jointbci

#endif  // JOINTBCI_CSP_HPP
