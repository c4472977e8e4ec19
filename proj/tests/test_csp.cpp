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

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "jointbci/csp.hpp"
#include "jointbci/rng.hpp"

using namespace jointbci;

namespace {

// Largest principal angle between the row spaces of two filter banks,
// via the projection residual (accurate for tiny angles).
double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qa(a.transpose());
  const Eigen::HouseholderQR<Eigen::MatrixXd> qb(b.transpose());
  const Eigen::MatrixXd qa_thin =
      qa.householderQ() * Eigen::MatrixXd::Identity(a.cols(), a.rows());
  const Eigen::MatrixXd qb_thin =
      qb.householderQ() * Eigen::MatrixXd::Identity(b.cols(), b.rows());
  const Eigen::MatrixXd residual =
      qb_thin - qa_thin * (qa_thin.transpose() * qb_thin);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  return std::asin(std::min(1.0, svd.singularValues().maxCoeff()));
}

// Gaussian trials with per-channel scales; the classic two-class setup
// where each class concentrates variance on its own channel.
std::vector<Eigen::MatrixXd> gaussian_trials(Rng& rng, int n_trials,
                                             const Eigen::VectorXd& scales,
                                             int samples = 200) {
  std::vector<Eigen::MatrixXd> covs;
  for (int t = 0; t < n_trials; ++t) {
    Eigen::MatrixXd x(scales.size(), samples);
    for (Eigen::Index c = 0; c < scales.size(); ++c)
      for (int s = 0; s < samples; ++s) x(c, s) = scales(c) * rng.normal();
    covs.push_back(trial_covariance(x));
  }
  return covs;
}

}  // namespace

TEST_CASE("trial covariance is trace normalized") {
  Eigen::MatrixXd eye(2, 2);
  eye << 1, 0, 0, 1;
  const Eigen::MatrixXd r = trial_covariance(eye);
  CHECK(r(0, 0) == doctest::Approx(0.5));
  CHECK(r(1, 1) == doctest::Approx(0.5));
  CHECK(r(0, 1) == doctest::Approx(0.0));

  Eigen::MatrixXd ones(2, 2);
  ones << 1, 1, 1, 1;
  const Eigen::MatrixXd r2 = trial_covariance(ones);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(r2(i, j) == doctest::Approx(0.5));

  Rng rng(3);
  Eigen::MatrixXd x(4, 50);
  for (int c = 0; c < 4; ++c)
    for (int s = 0; s < 50; ++s) x(c, s) = rng.normal();
  const Eigen::MatrixXd r3 = trial_covariance(x);
  CHECK(r3.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((r3 - r3.transpose()).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(trial_covariance(Eigen::MatrixXd::Zero(3, 10)),
                  DegenerateError);
}

TEST_CASE("weighted composite covariance normalizes within class") {
  Rng rng(11);
  auto covs = gaussian_trials(rng, 4, Eigen::Vector2d(1.0, 2.0));
  const std::vector<Label> labels{Label::Left, Label::Left, Label::Right,
                                  Label::Right};

  SUBCASE("equal weights reduce to the class mean") {
    auto [r1, r2] = weighted_composite_covariance(covs, {1, 1, 1, 1}, labels);
    const Eigen::MatrixXd mean1 = 0.5 * (covs[0] + covs[1]);
    CHECK((r1 - mean1).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("zero weight excludes a sample") {
    auto [r1, r2] = weighted_composite_covariance(covs, {1, 0, 1, 1}, labels);
    CHECK((r1 - covs[0]).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("3:1 weights mix as 0.75/0.25") {
    auto [r1, r2] = weighted_composite_covariance(covs, {3, 1, 1, 1}, labels);
    const Eigen::MatrixXd expected = 0.75 * covs[0] + 0.25 * covs[1];
    CHECK((r1 - expected).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("all-zero class weight is a degenerate error") {
    CHECK_THROWS_AS(weighted_composite_covariance(covs, {0, 0, 1, 1}, labels),
                    DegenerateError);
  }
}

TEST_CASE("identical class covariances give eigenvalues of one half") {
  Rng rng(5);
  auto covs = gaussian_trials(rng, 2, Eigen::Vector4d(1.0, 0.5, 2.0, 1.5));
  // Same covariance presented under both labels.
  const std::vector<Eigen::MatrixXd> both{covs[0], covs[0]};
  const auto bank = fit_weighted_csp(
      both, {1.0, 1.0}, {Label::Left, Label::Right}, 2);
  for (Eigen::Index k = 0; k < bank.eigenvalues.size(); ++k)
    CHECK(bank.eigenvalues(k) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("equal weights match an independent generalized-eigen oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::VectorXd scale1(6), scale2(6);
    for (int c = 0; c < 6; ++c) {
      scale1(c) = 0.5 + rng.uniform();
      scale2(c) = 0.5 + rng.uniform();
    }
    auto covs = gaussian_trials(rng, 8, scale1);
    auto covs2 = gaussian_trials(rng, 8, scale2);
    std::vector<Eigen::MatrixXd> all = covs;
    all.insert(all.end(), covs2.begin(), covs2.end());
    std::vector<Label> labels(8, Label::Left);
    labels.insert(labels.end(), 8, Label::Right);
    std::vector<double> ones(16, 1.0);

    const auto bank = fit_weighted_csp(all, ones, labels, 3);

    // Oracle: plain generalized eigenproblem R1 v = mu (R1 + R2) v on the
    // unweighted class means.
    Eigen::MatrixXd r1 = Eigen::MatrixXd::Zero(6, 6);
    Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 8; ++i) r1 += all[i] / 8.0;
    for (int i = 8; i < 16; ++i) r2 += all[i] / 8.0;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(r1, r1 + r2);
    Eigen::MatrixXd oracle(6, 6);
    for (int k = 0; k < 3; ++k) {
      oracle.row(k) = ges.eigenvectors().col(5 - k).transpose();
      oracle.row(3 + k) = ges.eigenvectors().col(2 - k).transpose();
    }
    CHECK(max_principal_angle(bank.filters, oracle) < 1e-6);

    // Both class covariances diagonalized, diagonals complementary.
    const Eigen::MatrixXd d1 = bank.filters * r1 * bank.filters.transpose();
    const Eigen::MatrixXd d2 = bank.filters * r2 * bank.filters.transpose();
    for (int i = 0; i < 6; ++i) {
      CHECK(d1(i, i) + d2(i, i) == doctest::Approx(1.0).epsilon(1e-8));
      for (int j = 0; j < 6; ++j)
        if (i != j) {
          CHECK(std::abs(d1(i, j)) < 1e-6);
          CHECK(std::abs(d2(i, j)) < 1e-6);
        }
    }
    CHECK(bank.eigenvalues(0) >= bank.eigenvalues(1));
  }
}

TEST_CASE("two-channel synthetic recovers the discriminative direction") {
  Rng rng(23);
  auto class1 = gaussian_trials(rng, 30, Eigen::Vector2d(4.0, 1.0));
  auto class2 = gaussian_trials(rng, 30, Eigen::Vector2d(1.0, 4.0));
  std::vector<Eigen::MatrixXd> all = class1;
  all.insert(all.end(), class2.begin(), class2.end());
  std::vector<Label> labels(30, Label::Left);
  labels.insert(labels.end(), 30, Label::Right);

  const auto bank = fit_weighted_csp(all, std::vector<double>(60, 1.0),
                                     labels, 1);
  // Projected variance ratio along the top filter.
  Eigen::MatrixXd r1 = Eigen::MatrixXd::Zero(2, 2),
                  r2 = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < 30; ++i) r1 += all[i] / 30.0;
  for (int i = 30; i < 60; ++i) r2 += all[i] / 30.0;
  const Eigen::VectorXd w = bank.filters.row(0).transpose();
  const double v1 = w.dot(r1 * w), v2 = w.dot(r2 * w);
  CHECK(v1 / (v1 + v2) > 0.9);
  CHECK(bank.eigenvalues(0) > 0.9);
}

TEST_CASE("weighting invariances") {
  Rng rng(31);
  auto covs = gaussian_trials(rng, 10, Eigen::Vector4d(2.0, 1.0, 0.7, 1.4));
  std::vector<Label> labels;
  std::vector<double> weights;
  for (int i = 0; i < 10; ++i) {
    labels.push_back(i % 2 == 0 ? Label::Left : Label::Right);
    weights.push_back(0.2 + rng.uniform());
  }
  const auto bank = fit_weighted_csp(covs, weights, labels, 2);

  SUBCASE("joint permutation leaves the subspace unchanged") {
    std::vector<std::size_t> perm{7, 2, 9, 0, 4, 6, 1, 8, 3, 5};
    std::vector<Eigen::MatrixXd> pc;
    std::vector<double> pw;
    std::vector<Label> pl;
    for (auto i : perm) {
      pc.push_back(covs[i]);
      pw.push_back(weights[i]);
      pl.push_back(labels[i]);
    }
    const auto permuted = fit_weighted_csp(pc, pw, pl, 2);
    CHECK(max_principal_angle(bank.filters, permuted.filters) < 1e-8);
  }

  SUBCASE("duplicating a trial equals doubling its weight") {
    auto covs2 = covs;
    auto weights2 = weights;
    auto labels2 = labels;
    covs2.push_back(covs[4]);
    weights2.push_back(weights[4]);
    labels2.push_back(labels[4]);
    auto weights3 = weights;
    weights3[4] *= 2.0;
    const auto dup = fit_weighted_csp(covs2, weights2, labels2, 2);
    const auto dbl = fit_weighted_csp(covs, weights3, labels, 2);
    CHECK((dup.filters - dbl.filters).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("rank and size guards") {
  Rng rng(41);
  auto covs = gaussian_trials(rng, 4, Eigen::Vector2d(1.0, 1.0));
  const std::vector<Label> labels{Label::Left, Label::Left, Label::Right,
                                  Label::Right};
  CHECK_THROWS_AS(fit_weighted_csp(covs, {1, 1, 1, 1}, labels, 2),
                  ParameterError);  // 2*n_pairs > channels

  // Rank-1 data cannot support two filter pairs.
  Eigen::MatrixXd rank1 = Eigen::MatrixXd::Zero(4, 4);
  rank1(0, 0) = 1.0;
  std::vector<Eigen::MatrixXd> degenerate(4, rank1);
  CHECK_THROWS_AS(fit_weighted_csp(degenerate, {1, 1, 1, 1}, labels, 2),
                  DegenerateError);
}

TEST_CASE("log-variance features") {
  // Identity filter bank over six channels isolates per-channel variance.
  SpatialFilterBank bank;
  bank.n_pairs = 3;
  bank.filters = Eigen::MatrixXd::Identity(6, 6);
  bank.eigenvalues = Eigen::VectorXd::Constant(6, 0.5);

  // Alternating +-1 rows: zero mean, unit variance.
  Eigen::MatrixXd slice(6, 100);
  for (int c = 0; c < 6; ++c)
    for (int s = 0; s < 100; ++s) slice(c, s) = (s % 2 == 0) ? 1.0 : -1.0;

  SUBCASE("equal variances give log(1/6)") {
    const Eigen::VectorXd f = extract_features(bank, slice);
    for (int k = 0; k < 6; ++k)
      CHECK(f(k) == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-12));
  }

  SUBCASE("variance pattern (4,1,1,1,1,1) puts log(4/9) first") {
    Eigen::MatrixXd skewed = slice;
    skewed.row(0) *= 2.0;
    const Eigen::VectorXd f = extract_features(bank, skewed);
    CHECK(f(0) == doctest::Approx(std::log(4.0 / 9.0)).epsilon(1e-12));
    CHECK(f(1) == doctest::Approx(std::log(1.0 / 9.0)).epsilon(1e-12));
  }

  SUBCASE("positive scaling cancels") {
    Rng rng(70);
    Eigen::MatrixXd noisy(6, 80);
    for (int c = 0; c < 6; ++c)
      for (int s = 0; s < 80; ++s) noisy(c, s) = rng.normal();
    const Eigen::VectorXd f1 = extract_features(bank, noisy);
    const Eigen::VectorXd f2 = extract_features(bank, (10.0 * noisy).eval());
    CHECK((f1 - f2).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("zero variance everywhere is degenerate") {
    CHECK_THROWS_AS(extract_features(bank, Eigen::MatrixXd::Zero(6, 10)),
                    DegenerateError);
  }

  SUBCASE("channel mismatch is a parameter error") {
    CHECK_THROWS_AS(extract_features(bank, Eigen::MatrixXd::Zero(4, 10)),
                    ParameterError);
  }
}
