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

#include "jointbci/metrics.hpp"

#include <cmath>

namespace jointbci {

namespace {

// Column-wise population standard deviations.
Eigen::VectorXd column_std(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd mean = m.colwise().mean();
  Eigen::VectorXd out(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    out(c) = std::sqrt((m.col(c).array() - mean(c)).square().mean());
  return out;
}

}  // namespace

double feature_distance(const Eigen::MatrixXd& features_left,
                        const Eigen::MatrixXd& features_right,
                        IntraMetric metric) {
  if (features_left.rows() < 2 || features_right.rows() < 2)
    throw ParameterError("feature_distance: need >= 2 vectors per class");
  if (features_left.cols() != features_right.cols())
    throw ParameterError("feature_distance: dimension mismatch");

  const Eigen::VectorXd mean_l = features_left.colwise().mean();
  const Eigen::VectorXd mean_r = features_right.colwise().mean();
  const double inter = (mean_l - mean_r).norm();

  const Eigen::VectorXd std_l = column_std(features_left);
  const Eigen::VectorXd std_r = column_std(features_right);

  double intra = 0.0;
  switch (metric) {
    case IntraMetric::ConcatStd:
      intra = std::sqrt(std_l.squaredNorm() + std_r.squaredNorm());
      break;
    case IntraMetric::SumNorms:
      intra = std_l.norm() + std_r.norm();
      break;
    case IntraMetric::PooledStd: {
      const double nl = static_cast<double>(features_left.rows());
      const double nr = static_cast<double>(features_right.rows());
      const Eigen::VectorXd pooled =
          ((nl * std_l.array().square() + nr * std_r.array().square()) /
           (nl + nr))
              .sqrt();
      intra = pooled.norm();
      break;
    }
  }
  if (!(intra > 0.0))
    throw DegenerateError("feature_distance: zero intra-class spread");
  return inter / intra;
}

double success_proportion(const std::vector<double>& accuracies,
                          double threshold_t) {
  if (accuracies.empty())
    throw ParameterError("success_proportion: empty input");
  std::size_t hits = 0;
  for (double a : accuracies)
    if (a >= threshold_t) ++hits;
  return static_cast<double>(hits) / static_cast<double>(accuracies.size());
}

std::vector<double> score_trajectory(const std::vector<double>& values,
                                     int window) {
  if (window < 1) throw ParameterError("score_trajectory: window must be >= 1");
  std::vector<double> out(values.size());
  for (std::size_t t = 0; t < values.size(); ++t) {
    const std::size_t first =
        t + 1 >= static_cast<std::size_t>(window) ? t + 1 - window : 0;
    double acc = 0.0;
    for (std::size_t i = first; i <= t; ++i) acc += values[i];
    out[t] = acc / static_cast<double>(t - first + 1);
  }
  return out;
}

double weighted_score_mean(const std::vector<double>& decisions,
                           const std::vector<double>& weights) {
  if (decisions.size() != weights.size())
    throw ParameterError("weighted_score_mean: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    num += weights[i] * decisions[i];
    den += weights[i];
  }
  if (!(den > 0.0))
    throw DegenerateError("weighted_score_mean: weights sum to zero");
  return num / den;
}

ScoreDistribution fit_score_distribution(
    const std::vector<double>& decisions_left,
    const std::vector<double>& weights_left,
    const std::vector<double>& decisions_right,
    const std::vector<double>& weights_right) {
  if (decisions_left.size() < 2 || decisions_right.size() < 2)
    throw ParameterError("fit_score_distribution: need >= 2 per class");

  auto moments = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return std::pair<double, double>(mean, std::sqrt(var));
  };

  ScoreDistribution d;
  std::tie(d.mu_left, d.sigma_left) = moments(decisions_left);
  std::tie(d.mu_right, d.sigma_right) = moments(decisions_right);
  d.weighted_mu_left = weighted_score_mean(decisions_left, weights_left);
  d.weighted_mu_right = weighted_score_mean(decisions_right, weights_right);
  return d;
}

}  // namespace jointbci
