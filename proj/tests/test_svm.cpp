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

#include <cmath>

#include "jointbci/rng.hpp"
#include "jointbci/svm.hpp"

using namespace jointbci;

namespace {

struct Dataset {
  Eigen::MatrixXd x;
  std::vector<int> y;
  Eigen::VectorXd v;
};

Dataset random_dataset(Rng& rng, int n, int d, double label_noise = 0.0) {
  Dataset ds;
  ds.x.resize(n, d);
  ds.v.resize(n);
  Eigen::VectorXd truth(d);
  for (int k = 0; k < d; ++k) truth(k) = rng.normal();
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) ds.x(i, k) = rng.normal();
    int y = ds.x.row(i).dot(truth) + 0.3 * rng.normal() >= 0 ? 1 : -1;
    if (label_noise > 0.0 && rng.uniform() < label_noise) y = -y;
    ds.y.push_back(y);
    ds.v(i) = 0.25 + rng.uniform();
  }
  // Both classes must appear.
  ds.y[0] = 1;
  ds.y[1] = -1;
  return ds;
}

// Independent check: plain projected subgradient descent on (w, b) with a
// decaying step, tracking the best objective seen.
double subgradient_best_objective(const Dataset& ds, double c, long iters) {
  const Eigen::Index n = ds.x.rows(), d = ds.x.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  DecoderModel probe;
  probe.C = c;
  double best = std::numeric_limits<double>::infinity();
  for (long t = 1; t <= iters; ++t) {
    Eigen::VectorXd grad = w;
    double grad_b = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double margin =
          ds.y[static_cast<std::size_t>(i)] * (w.dot(ds.x.row(i)) + b);
      if (margin < 1.0) {
        grad -= c * ds.v(i) * ds.y[static_cast<std::size_t>(i)] *
                ds.x.row(i).transpose();
        grad_b -= c * ds.v(i) * ds.y[static_cast<std::size_t>(i)];
      }
    }
    const double eta = 1.0 / (1.0 + 0.05 * static_cast<double>(t));
    w -= eta * grad;
    b -= eta * grad_b;
    if (t % 50 == 0 || t == iters) {
      probe.w = w;
      probe.b = b;
      best = std::min(best, svm_objective(probe, ds.x, ds.y, ds.v));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("two opposite points on a line give the analytic max margin") {
  Eigen::MatrixXd x(2, 1);
  x << -1.0, 1.0;
  const std::vector<int> y{-1, 1};
  const DecoderModel model =
      fit_weighted_svm(x, y, Eigen::Vector2d(1.0, 1.0), 100.0);
  CHECK(model.w(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(model.b) < 1e-6);
}

TEST_CASE("zero-weight samples do not influence the fit") {
  Rng rng(8);
  Dataset ds = random_dataset(rng, 12, 3);
  const DecoderModel base = fit_weighted_svm(ds.x, ds.y, ds.v, 1.0);

  Dataset padded = ds;
  padded.x.conservativeResize(13, 3);
  padded.x.row(12) << 50.0, -3.0, 7.0;  // far off, but weightless
  padded.y.push_back(-1);
  padded.v.conservativeResize(13);
  padded.v(12) = 0.0;
  const DecoderModel with_ghost = fit_weighted_svm(padded.x, padded.y,
                                                   padded.v, 1.0);

  CHECK(std::abs(svm_objective(base, ds.x, ds.y, ds.v) -
                 svm_objective(with_ghost, ds.x, ds.y, ds.v)) < 1e-8);
  CHECK((base.w - with_ghost.w).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(base.b - with_ghost.b) < 1e-8);
}

TEST_CASE("class-symmetric data has zero bias") {
  Rng rng(9);
  Eigen::MatrixXd x(20, 2);
  std::vector<int> y;
  for (int i = 0; i < 10; ++i) {
    const double a = rng.normal() + 2.0, b = rng.normal();
    x.row(2 * i) << a, b;
    x.row(2 * i + 1) << -a, -b;
    y.push_back(1);
    y.push_back(-1);
  }
  const DecoderModel model =
      fit_weighted_svm(x, y, Eigen::VectorXd::Ones(20), 1.0);
  CHECK(std::abs(model.b) < 1e-6);
}

TEST_CASE("decision values and hinge losses") {
  DecoderModel model;
  model.w = Eigen::Vector2d(1.0, -1.0);
  model.b = 0.5;

  CHECK(decision_value(model, Eigen::Vector2d(0.0, 0.0)) == 0.5);
  CHECK(decision_value(model, Eigen::Vector2d(2.0, 1.0)) == 1.5);
  CHECK_THROWS_AS(decision_value(model, Eigen::Vector3d(1, 2, 3)),
                  ParameterError);

  // Affine identity: f(x+y) + b = f(x) + f(y).
  const Eigen::Vector2d p(0.3, -0.7), q(1.1, 0.4);
  CHECK(decision_value(model, p + q) + model.b ==
        doctest::Approx(decision_value(model, p) + decision_value(model, q)));

  // Hinge.
  CHECK(per_sample_hinge_loss(model, Eigen::Vector2d(2.0, 0.0), 1) == 0.0);
  DecoderModel on_boundary;
  on_boundary.w = Eigen::VectorXd::Ones(1);
  on_boundary.b = 0.0;
  CHECK(per_sample_hinge_loss(on_boundary, Eigen::VectorXd::Zero(1), 1) == 1.0);
  DecoderModel half;
  half.w = Eigen::VectorXd::Ones(1);
  half.b = 0.5;
  CHECK(per_sample_hinge_loss(half, Eigen::VectorXd::Zero(1), -1) == 1.5);
  CHECK_THROWS_AS(per_sample_hinge_loss(half, Eigen::VectorXd::Zero(1), 2),
                  ParameterError);
}

TEST_CASE("fit rejects degenerate inputs") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 0, 2, 0, -1, 0, -2, 0;
  const std::vector<int> y{1, 1, -1, -1};
  CHECK_THROWS_AS(
      fit_weighted_svm(x, y, Eigen::Vector4d(1, 1, 0, 0), 1.0),
      DegenerateError);
  Eigen::MatrixXd bad = x;
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fit_weighted_svm(bad, y, Eigen::VectorXd::Ones(4), 1.0),
                  ParameterError);
  CHECK_THROWS_AS(fit_weighted_svm(x, y, Eigen::VectorXd::Ones(4), -1.0),
                  ParameterError);

  // Indistinguishable classes collapse to a zero weight vector.
  Eigen::MatrixXd same(4, 2);
  same << 1, 2, 1, 2, 1, 2, 1, 2;
  CHECK_THROWS_AS(fit_weighted_svm(same, y, Eigen::VectorXd::Ones(4), 1.0),
                  DegenerateError);
}

TEST_CASE("objective is locally (hence globally) optimal") {
  Rng rng(12);
  for (int rep = 0; rep < 5; ++rep) {
    Dataset ds = random_dataset(rng, 16, 3, 0.1);
    const DecoderModel model = fit_weighted_svm(ds.x, ds.y, ds.v, 1.0);
    const double base = svm_objective(model, ds.x, ds.y, ds.v);
    for (int k = 0; k < 20; ++k) {
      DecoderModel nudged = model;
      Eigen::VectorXd delta(model.w.size() + 1);
      for (Eigen::Index i = 0; i < delta.size(); ++i) delta(i) = rng.normal();
      delta *= 1e-3 / delta.norm();
      nudged.w += delta.head(model.w.size());
      nudged.b += delta(model.w.size());
      CHECK(svm_objective(nudged, ds.x, ds.y, ds.v) >= base - 1e-6);
    }
  }
}

TEST_CASE("duplicated sample equals doubled weight") {
  Rng rng(13);
  Dataset ds = random_dataset(rng, 10, 2);

  Dataset doubled = ds;
  doubled.v(3) *= 2.0;
  const DecoderModel dbl = fit_weighted_svm(doubled.x, doubled.y, doubled.v, 1.0);

  Dataset dup = ds;
  dup.x.conservativeResize(11, 2);
  dup.x.row(10) = ds.x.row(3);
  dup.y.push_back(ds.y[3]);
  dup.v.conservativeResize(11);
  dup.v(10) = ds.v(3);
  const DecoderModel two = fit_weighted_svm(dup.x, dup.y, dup.v, 1.0);

  CHECK(std::abs(svm_objective(dbl, doubled.x, doubled.y, doubled.v) -
                 svm_objective(two, doubled.x, doubled.y, doubled.v)) < 1e-6);
  CHECK((dbl.w - two.w).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("weights and C interact only through their product") {
  Rng rng(14);
  Dataset ds = random_dataset(rng, 14, 3);
  const DecoderModel a = fit_weighted_svm(ds.x, ds.y, (2.0 * ds.v).eval(), 1.0);
  const DecoderModel b = fit_weighted_svm(ds.x, ds.y, ds.v, 2.0);
  CHECK(a.w == b.w);  // identical solver trajectory, bit for bit
  CHECK(a.b == b.b);
}

TEST_CASE("solver matches a brute-force subgradient oracle") {
  Rng rng(15);
  for (int rep = 0; rep < 3; ++rep) {
    Dataset ds = random_dataset(rng, 20, 4, 0.15);
    const double c = 1.0;
    const DecoderModel model = fit_weighted_svm(ds.x, ds.y, ds.v, c);
    const double mine = svm_objective(model, ds.x, ds.y, ds.v);
    const double oracle = subgradient_best_objective(ds, c, 200000);
    CHECK(mine <= oracle + 1e-4 * std::max(1.0, oracle));
    CHECK(mine >= oracle - 1e-3 * std::max(1.0, oracle));
  }
}

TEST_CASE("posterior calibration") {
  SUBCASE("balanced symmetric decisions center the sigmoid") {
    Eigen::MatrixXd x(20, 1);
    std::vector<int> y;
    Rng rng(16);
    for (int i = 0; i < 10; ++i) {
      const double m = 0.5 + rng.uniform();
      x(2 * i, 0) = m;
      x(2 * i + 1, 0) = -m;
      y.push_back(1);
      y.push_back(-1);
    }
    DecoderModel model;
    model.w = Eigen::VectorXd::Ones(1);
    model.b = 0.0;
    calibrate_posterior(model, x, y);
    CHECK(model.calib_a < 0.0);
    CHECK(posterior_left(model, 0.0) == doctest::Approx(0.5).epsilon(0.01));
  }

  SUBCASE("posterior is monotone in the decision value") {
    DecoderModel model;
    model.w = Eigen::VectorXd::Ones(1);
    model.calib_a = -1.7;
    model.calib_b = 0.2;
    double prev = 0.0;
    for (double f = -4.0; f <= 4.0; f += 0.25) {
      const double p = posterior_left(model, f);
      CHECK(p >= prev);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      prev = p;
    }
  }

  SUBCASE("decisions (-2,-1,+1,+2) with labels R,R,L,L order the posterior") {
    Eigen::MatrixXd x(4, 1);
    x << -2.0, -1.0, 1.0, 2.0;
    const std::vector<int> y{-1, -1, 1, 1};
    DecoderModel model;
    model.w = Eigen::VectorXd::Ones(1);
    model.b = 0.0;
    calibrate_posterior(model, x, y);
    CHECK(posterior_left(model, 2.0) > 0.5);
    CHECK(posterior_left(model, -2.0) < 0.5);
    CHECK(model.calib_a <= 0.0);
  }

  SUBCASE("perfectly separable fits stay within the configured bound") {
    Eigen::MatrixXd x(6, 1);
    x << -3, -2, -1, 1, 2, 3;
    const std::vector<int> y{-1, -1, -1, 1, 1, 1};
    DecoderModel model;
    model.w = Eigen::VectorXd::Ones(1);
    SvmOptions options;
    options.calib_bound = 5.0;
    calibrate_posterior(model, x, y, options);
    CHECK(model.calib_a >= -5.0);
    CHECK(model.calib_a <= 0.0);
  }

  SUBCASE("single-class calibration is degenerate") {
    Eigen::MatrixXd x(2, 1);
    x << 1.0, 2.0;
    DecoderModel model;
    model.w = Eigen::VectorXd::Ones(1);
    CHECK_THROWS_AS(calibrate_posterior(model, x, {1, 1}), DegenerateError);
  }
}

TEST_CASE("prediction ties break toward Left") {
  DecoderModel model;
  model.w = Eigen::VectorXd::Ones(1);
  model.b = 0.0;
  const Prediction pred = predict(model, Eigen::VectorXd::Zero(1));
  CHECK(pred.decision == 0.0);
  CHECK(pred.label == Label::Left);
}
