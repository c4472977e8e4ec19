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

#include "jointbci/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jointbci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// Dual problem:  min 0.5 a^T Q a - e^T a,  0 <= a_i <= C v_i,
//                sum_i y_i a_i = 0,  with Q_ij = y_i y_j x_i.x_j.
// The equality constraint carries the unregularized bias, so steps move a
// maximal-violating pair (i from I_up, j from I_low) along the feasible
// direction, as in standard SMO solvers. The primal vector
// u = sum_i a_i y_i x_i is maintained incrementally.
DecoderModel fit_weighted_svm(const Eigen::MatrixXd& features,
                              const std::vector<int>& labels,
                              const Eigen::VectorXd& weights, double C,
                              const SvmOptions& options) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (n < 2) throw ParameterError("svm: need at least two samples");
  if (static_cast<Eigen::Index>(labels.size()) != n ||
      weights.size() != n)
    throw ParameterError("svm: labels/weights length mismatch");
  if (!(C > 0.0)) throw ParameterError("svm: C must be positive");
  if (!features.allFinite())
    throw ParameterError("svm: non-finite feature values");

  double class_weight[2] = {0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] != 1 &&
        labels[static_cast<std::size_t>(i)] != -1)
      throw ParameterError("svm: labels must be +1 or -1");
    if (weights(i) < 0.0) throw ParameterError("svm: negative sample weight");
    class_weight[labels[static_cast<std::size_t>(i)] == 1 ? 0 : 1] +=
        weights(i);
  }
  if (!(class_weight[0] > 0.0) || !(class_weight[1] > 0.0))
    throw DegenerateError("svm: a class has no positive weight");

  Eigen::VectorXd bound(n);
  for (Eigen::Index i = 0; i < n; ++i) bound(i) = C * weights(i);

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(d);  // = sum a_i y_i x_i
  const long max_steps =
      options.max_steps_per_sample * std::max<long>(static_cast<long>(n), 10);

  double m_val = 0.0, big_m_val = 0.0;
  for (long step = 0; step < max_steps; ++step) {
    // Working-set selection: maximal violating pair on -y_t grad_t.
    m_val = -kInf;
    big_m_val = kInf;
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      const int yt = labels[static_cast<std::size_t>(t)];
      // val = -y_t G_t = y_t - u.x_t, with G_t = y_t (u.x_t) - 1
      const double val = static_cast<double>(yt) - u.dot(features.row(t));
      const bool in_up = (yt == 1 && alpha(t) < bound(t)) ||
                         (yt == -1 && alpha(t) > 0.0);
      const bool in_low = (yt == 1 && alpha(t) > 0.0) ||
                          (yt == -1 && alpha(t) < bound(t));
      if (in_up && val > m_val) {
        m_val = val;
        i = t;
      }
      if (in_low && val < big_m_val) {
        big_m_val = val;
        j = t;
      }
    }
    if (i < 0 || j < 0 || m_val - big_m_val < options.tolerance) break;

    const int yi = labels[static_cast<std::size_t>(i)];
    const int yj = labels[static_cast<std::size_t>(j)];
    const Eigen::VectorXd xi = features.row(i).transpose();
    const Eigen::VectorXd xj = features.row(j).transpose();

    // Feasible direction: da_i = +y_i t, da_j = -y_j t keeps sum y a fixed.
    const double quad = (xi - xj).squaredNorm();
    double t_step = (m_val - big_m_val) / std::max(quad, 1e-12);
    const double cap_i =
        yi == 1 ? bound(i) - alpha(i) : alpha(i);
    const double cap_j =
        yj == 1 ? alpha(j) : bound(j) - alpha(j);
    t_step = std::min(t_step, std::min(cap_i, cap_j));

    alpha(i) += yi == 1 ? t_step : -t_step;
    alpha(j) -= yj == 1 ? t_step : -t_step;
    // Clamp away accumulated round-off at the box edges.
    alpha(i) = std::clamp(alpha(i), 0.0, bound(i));
    alpha(j) = std::clamp(alpha(j), 0.0, bound(j));
    u += t_step * (xi - xj);
  }

  DecoderModel model;
  model.w = u;
  model.C = C;

  // Bias from the KKT conditions: average y_t - u.x_t over free support
  // vectors, midpoint of the violation bounds when none are free.
  double acc = 0.0;
  int free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0.0 && alpha(t) < bound(t)) {
      acc += labels[static_cast<std::size_t>(t)] - u.dot(features.row(t));
      ++free_count;
    }
  }
  model.b = free_count > 0 ? acc / free_count : 0.5 * (m_val + big_m_val);

  if (model.w.lpNorm<Eigen::Infinity>() == 0.0)
    throw DegenerateError("svm: fit produced an all-zero weight vector");
  return model;
}

double decision_value(const DecoderModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.w.size())
    throw ParameterError("decision_value: feature dimension mismatch");
  return model.w.dot(x) + model.b;
}

double per_sample_hinge_loss(const DecoderModel& model,
                             const Eigen::VectorXd& x, int y) {
  if (y != 1 && y != -1)
    throw ParameterError("hinge loss: label must be +1 or -1");
  return std::max(0.0, 1.0 - y * decision_value(model, x));
}

double svm_objective(const DecoderModel& model,
                     const Eigen::MatrixXd& features,
                     const std::vector<int>& labels,
                     const Eigen::VectorXd& weights) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < features.rows(); ++i)
    loss += weights(i) *
            per_sample_hinge_loss(model, features.row(i).transpose(),
                                  labels[static_cast<std::size_t>(i)]);
  return 0.5 * model.w.squaredNorm() + model.C * loss;
}

// Sigmoid fit after Platt, with the Newton iteration of Lin, Lin & Weng
// (2007). Deterministic; at most 100 iterations.
void calibrate_posterior(DecoderModel& model, const Eigen::MatrixXd& features,
                         const std::vector<int>& labels,
                         const SvmOptions& options) {
  const Eigen::Index n = features.rows();
  long n_pos = 0, n_neg = 0;
  for (int y : labels) (y == 1 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    throw DegenerateError("calibration: both classes required");

  Eigen::VectorXd f(n), t(n);
  const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
  const double t_neg = 1.0 / (n_neg + 2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    f(i) = decision_value(model, features.row(i).transpose());
    t(i) = labels[static_cast<std::size_t>(i)] == 1 ? t_pos : t_neg;
  }

  double a = 0.0;
  double b = std::log((n_neg + 1.0) / (n_pos + 1.0));
  const double min_step = 1e-10, sigma = 1e-12;

  auto nll = [&](double aa, double bb) {
    double val = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = aa * f(i) + bb;
      // Numerically safe log(1 + e^z) split.
      if (z >= 0.0)
        val += t(i) * z + std::log1p(std::exp(-z));
      else
        val += (t(i) - 1.0) * z + std::log1p(std::exp(z));
    }
    return val;
  };

  double fval = nll(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = a * f(i) + b;
      const double p = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z))
                                : 1.0 / (1.0 + std::exp(z));
      const double q = 1.0 - p;
      h11 += f(i) * f(i) * p * q;
      h22 += p * q;
      h21 += f(i) * p * q;
      const double dd = t(i) - p;
      g1 += f(i) * dd;
      g2 += dd;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double grad_dot = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= min_step) {
      const double new_a = a + step * da;
      const double new_b = b + step * db;
      const double new_f = nll(new_a, new_b);
      if (new_f < fval + 1e-4 * step * grad_dot) {
        a = new_a;
        b = new_b;
        fval = new_f;
        break;
      }
      step /= 2.0;
    }
    if (step < min_step) break;
  }

  // The posterior must rise with the Left-side decision value, and stay
  // bounded on separable fits.
  model.calib_a = std::clamp(a, -options.calib_bound, 0.0);
  model.calib_b = std::clamp(b, -options.calib_bound, options.calib_bound);
}

double posterior_left(const DecoderModel& model, double decision) {
  const double z = model.calib_a * decision + model.calib_b;
  return z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z))
                  : 1.0 / (1.0 + std::exp(z));
}

Prediction predict(const DecoderModel& model, const Eigen::VectorXd& x) {
  Prediction pred;
  pred.decision = decision_value(model, x);
  pred.label = label_from_sign(pred.decision);
  pred.p_left = posterior_left(model, pred.decision);
  return pred;
}

}  // namespace jointbci
