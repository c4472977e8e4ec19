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

#include "jointbci/csp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace jointbci {

namespace {

// Deterministic sign convention: the largest-magnitude component of each
// filter is made positive, so serialized banks are reproducible.
void fix_signs(Eigen::MatrixXd& filters) {
  for (Eigen::Index r = 0; r < filters.rows(); ++r) {
    Eigen::Index imax = 0;
    filters.row(r).cwiseAbs().maxCoeff(&imax);
    if (filters(r, imax) < 0.0) filters.row(r) *= -1.0;
  }
}

}  // namespace

TrialMoments trial_moments(const Eigen::MatrixXd& data) {
  TrialMoments m;
  m.scatter = data * data.transpose();
  m.sum = data.rowwise().sum();
  m.n_samples = data.cols();
  return m;
}

Eigen::MatrixXd trial_covariance(const Eigen::MatrixXd& data) {
  if (data.cols() < 2)
    throw ParameterError("trial_covariance needs at least 2 samples");
  return trial_covariance(trial_moments(data));
}

Eigen::MatrixXd trial_covariance(const TrialMoments& moments) {
  const double tr = moments.scatter.trace();
  if (!(tr > 0.0))
    throw DegenerateError("trial_covariance: zero-signal trial (trace 0)");
  return moments.scatter / tr;
}

Eigen::MatrixXd trial_covariance(const Epoch& epoch) {
  if (epoch.samples() < 2)
    throw ParameterError("trial_covariance needs at least 2 samples");
  return trial_covariance(trial_moments(epoch.data));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> weighted_composite_covariance(
    const std::vector<Eigen::MatrixXd>& covs,
    const std::vector<double>& weights, const std::vector<Label>& labels) {
  if (covs.size() != weights.size() || covs.size() != labels.size())
    throw ParameterError("composite covariance: length mismatch");
  if (covs.empty()) throw ParameterError("composite covariance: empty input");

  double total[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < covs.size(); ++i) {
    if (weights[i] < 0.0)
      throw ParameterError("composite covariance: negative weight");
    total[labels[i] == Label::Left ? 0 : 1] += weights[i];
  }
  if (!(total[0] > 0.0) || !(total[1] > 0.0))
    throw DegenerateError(
        "composite covariance: a class has no positive weight");

  const Eigen::Index n = covs.front().rows();
  Eigen::MatrixXd r1 = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < covs.size(); ++i) {
    if (weights[i] == 0.0) continue;
    if (labels[i] == Label::Left)
      r1 += (weights[i] / total[0]) * covs[i];
    else
      r2 += (weights[i] / total[1]) * covs[i];
  }
  return {r1, r2};
}

SpatialFilterBank fit_weighted_csp(const std::vector<Eigen::MatrixXd>& covs,
                                   const std::vector<double>& weights,
                                   const std::vector<Label>& labels,
                                   int n_pairs) {
  if (n_pairs < 1) throw ParameterError("csp n_pairs must be >= 1");
  auto [r1, r2] = weighted_composite_covariance(covs, weights, labels);
  const Eigen::Index channels = r1.rows();
  if (2 * n_pairs > channels)
    throw ParameterError("csp: 2*n_pairs exceeds channel count");

  const Eigen::MatrixXd composite = r1 + r2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> whitener(composite);
  if (whitener.info() != Eigen::Success)
    throw DegenerateError("csp: composite covariance eigensolve failed");

  // Whitening with rank truncation; eigenvalues come ascending from Eigen.
  const Eigen::VectorXd evals = whitener.eigenvalues();
  const double eps_rank = 1e-10 * evals(channels - 1);
  Eigen::Index first_kept = 0;
  while (first_kept < channels && evals(first_kept) < eps_rank) ++first_kept;
  const Eigen::Index rank = channels - first_kept;
  if (rank < 2 * n_pairs)
    throw DegenerateError(
        "csp: composite covariance rank below 2*n_pairs retained dimensions");

  Eigen::MatrixXd whiten(rank, channels);
  for (Eigen::Index k = 0; k < rank; ++k)
    whiten.row(k) = whitener.eigenvectors().col(first_kept + k).transpose() /
                    std::sqrt(evals(first_kept + k));

  Eigen::MatrixXd s1 = whiten * r1 * whiten.transpose();
  s1 = 0.5 * (s1 + s1.transpose().eval());  // keep it exactly symmetric
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rotation(s1);
  if (rotation.info() != Eigen::Success)
    throw DegenerateError("csp: whitened eigensolve failed");

  SpatialFilterBank bank;
  bank.n_pairs = n_pairs;
  bank.filters.resize(2 * n_pairs, channels);
  bank.eigenvalues.resize(2 * n_pairs);
  // n_pairs largest first, then n_pairs smallest.
  for (int k = 0; k < n_pairs; ++k) {
    const Eigen::Index hi = rank - 1 - k;
    bank.filters.row(k) =
        rotation.eigenvectors().col(hi).transpose() * whiten;
    bank.eigenvalues(k) = rotation.eigenvalues()(hi);
  }
  for (int k = 0; k < n_pairs; ++k) {
    bank.filters.row(n_pairs + k) =
        rotation.eigenvectors().col(n_pairs - 1 - k).transpose() * whiten;
    bank.eigenvalues(n_pairs + k) = rotation.eigenvalues()(n_pairs - 1 - k);
  }
  fix_signs(bank.filters);
  return bank;
}

SpatialFilterBank fit_weighted_csp(const std::vector<Epoch>& epochs,
                                   const std::vector<double>& weights,
                                   const std::vector<Label>& labels,
                                   int n_pairs) {
  std::vector<Eigen::MatrixXd> covs;
  covs.reserve(epochs.size());
  for (const Epoch& ep : epochs) covs.push_back(trial_covariance(ep));
  return fit_weighted_csp(covs, weights, labels, n_pairs);
}

Eigen::VectorXd extract_features(const SpatialFilterBank& bank,
                                 const Eigen::MatrixXd& slice) {
  if (slice.rows() != bank.channels())
    throw ParameterError("extract_features: channel count mismatch");
  return extract_features(bank, trial_moments(slice));
}

Eigen::VectorXd extract_features(const SpatialFilterBank& bank,
                                 const TrialMoments& moments) {
  const Eigen::Index m = bank.n_filters();
  const double n = static_cast<double>(moments.n_samples);
  Eigen::VectorXd variances(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::VectorXd w = bank.filters.row(k).transpose();
    const double second = w.dot(moments.scatter * w) / n;
    const double mean = w.dot(moments.sum) / n;
    // Round-off can push a constant projection slightly negative.
    variances(k) = std::max(0.0, second - mean * mean);
  }
  const double total = variances.sum();
  if (!(total > 0.0))
    throw DegenerateError("extract_features: zero projected variance");
  return (variances / total).array().log().matrix();
}

}  // namespace jointbci
