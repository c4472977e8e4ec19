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

#include "jointbci/spl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jointbci/rng.hpp"

namespace jointbci {

void PaceSchedule::validate() const {
  if (!(capital_lambda > 0.0 && capital_lambda <= 1.0))
    throw ParameterError("pace.capital_lambda must be in (0, 1]");
  if (!(delta_lambda > 0.0))
    throw ParameterError("pace.delta_lambda must be positive");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ParameterError("pace.lambda must be in (0, 1)");
}

double weight_from_loss(double loss, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ParameterError("weight_from_loss: lambda must be in (0, 1)");
  if (!(loss >= 0.0))
    throw ParameterError("weight_from_loss: loss must be >= 0");
  if (loss >= lambda) return 0.0;
  return std::log(loss + (1.0 - lambda)) / std::log(1.0 - lambda);
}

double spl_objective(const Eigen::VectorXd& losses, const Eigen::VectorXd& v,
                     double lambda) {
  if (losses.size() != v.size())
    throw ParameterError("spl_objective: length mismatch");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ParameterError("spl_objective: lambda must be in (0, 1)");
  const double log1ml = std::log(1.0 - lambda);
  double e = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) >= 0.0 && v(i) <= 1.0))
      throw ParameterError("spl_objective: weights must lie in [0, 1]");
    e += v(i) * losses(i) + (1.0 - lambda) * v(i) -
         std::pow(1.0 - lambda, v(i)) / log1ml;
  }
  return e;
}

Eigen::VectorXd normalize_losses(const Eigen::VectorXd& raw) {
  if (raw.size() == 0) throw ParameterError("normalize_losses: empty input");
  for (Eigen::Index i = 0; i < raw.size(); ++i)
    if (!std::isfinite(raw(i)) || raw(i) < 0.0)
      throw ParameterError("normalize_losses: losses must be finite and >= 0");
  const double max = raw.maxCoeff();
  // Hinge losses carry a natural unit (1 = on the decision boundary), so
  // the scale is floored: when every loss is far below one margin unit the
  // samples are all easy and none should be squashed against the threshold
  // by pure relative normalization. The 1.001 margin keeps the largest
  // loss strictly below the threshold clamp so full recruitment stays
  // expressible; ordering is preserved either way.
  constexpr double kLossFloor = 1e-3;
  const double denom = std::max(max, kLossFloor) * 1.001 + 1e-12;
  return raw / denom;
}

double lambda_from_pace(const Eigen::VectorXd& raw_losses,
                        double capital_lambda) {
  if (raw_losses.size() == 0)
    throw ParameterError("lambda_from_pace: empty losses");
  if (!(capital_lambda > 0.0 && capital_lambda <= 1.0))
    throw ParameterError("lambda_from_pace: capital_lambda must be in (0, 1]");

  const Eigen::VectorXd normalized = normalize_losses(raw_losses);
  std::vector<double> sorted(normalized.data(),
                             normalized.data() + normalized.size());
  std::sort(sorted.begin(), sorted.end());

  const double pos = capital_lambda * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double quantile = sorted[lo] + frac * (sorted[hi] - sorted[lo]);

  double lambda = std::clamp(quantile, 1e-6, 1.0 - 1e-6);
  // Ties at the threshold break toward recruitment.
  for (Eigen::Index i = 0; i < normalized.size(); ++i)
    if (normalized(i) == lambda) {
      lambda = std::nextafter(lambda, 1.0);
      break;
    }
  return lambda;
}

TrainingSample make_training_sample(const Epoch& epoch) {
  epoch.validate();
  if (epoch.samples() < 2)
    throw ParameterError("training sample needs at least 2 samples");
  return {trial_moments(epoch.data), epoch.label};
}

std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>>
split_train_val(const std::vector<TrainingSample>& data, double val_fraction) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw ParameterError("val_fraction must be in (0, 1)");
  std::vector<std::size_t> left, right;
  for (std::size_t i = 0; i < data.size(); ++i)
    (data[i].label == Label::Left ? left : right).push_back(i);
  if (left.size() < 2 || right.size() < 2)
    throw DegenerateError("split_train_val: need >= 2 trials per class");

  std::vector<std::size_t> val_idx;
  for (const auto* cls : {&left, &right}) {
    const auto n_val = std::min(
        cls->size() - 1,
        std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::lround(val_fraction * static_cast<double>(cls->size())))));
    val_idx.insert(val_idx.end(), cls->end() - static_cast<long>(n_val),
                   cls->end());
  }
  std::sort(val_idx.begin(), val_idx.end());

  std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (next < val_idx.size() && val_idx[next] == i) {
      out.second.push_back(data[i]);
      ++next;
    } else {
      out.first.push_back(data[i]);
    }
  }
  return out;
}

namespace {

struct PreparedSet {
  std::vector<TrialMoments> moments;
  std::vector<Eigen::MatrixXd> covs;  // train only
  std::vector<Label> labels;
  std::vector<int> signs;
};

PreparedSet prepare(const std::vector<TrainingSample>& samples,
                    bool with_covs) {
  PreparedSet set;
  set.moments.reserve(samples.size());
  set.labels.reserve(samples.size());
  for (const TrainingSample& s : samples) {
    set.moments.push_back(s.moments);
    if (with_covs) set.covs.push_back(trial_covariance(set.moments.back()));
    set.labels.push_back(s.label);
    set.signs.push_back(label_sign(s.label));
  }
  return set;
}

std::vector<TrainingSample> to_samples(const std::vector<Epoch>& epochs) {
  std::vector<TrainingSample> out;
  out.reserve(epochs.size());
  for (const Epoch& ep : epochs) out.push_back(make_training_sample(ep));
  return out;
}

Eigen::MatrixXd all_features(const SpatialFilterBank& bank,
                             const PreparedSet& set) {
  Eigen::MatrixXd feats(static_cast<Eigen::Index>(set.moments.size()),
                        bank.n_filters());
  for (std::size_t i = 0; i < set.moments.size(); ++i)
    feats.row(static_cast<Eigen::Index>(i)) =
        extract_features(bank, set.moments[i]).transpose();
  return feats;
}

double accuracy_on(const SpatialFilterBank& bank, const DecoderModel& model,
                   const PreparedSet& set) {
  int correct = 0;
  for (std::size_t i = 0; i < set.moments.size(); ++i) {
    const Eigen::VectorXd f = extract_features(bank, set.moments[i]);
    if (label_from_sign(decision_value(model, f)) == set.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.moments.size());
}

void require_both_classes(const std::vector<Label>& labels, const char* what) {
  bool has_left = false, has_right = false;
  for (Label l : labels) (l == Label::Left ? has_left : has_right) = true;
  if (!has_left || !has_right)
    throw DegenerateError(std::string(what) + ": both classes required");
}

// A class whose recruited weights all vanished keeps its single
// lowest-loss sample, so CSP and SVM stay well-posed.
bool apply_class_fallback(Eigen::VectorXd& v, const Eigen::VectorXd& raw,
                          const std::vector<Label>& labels) {
  bool used = false;
  for (Label cls : {Label::Left, Label::Right}) {
    double mass = 0.0;
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (labels[static_cast<std::size_t>(i)] != cls) continue;
      mass += v(i);
      if (best < 0 || raw(i) < raw(best)) best = i;
    }
    if (mass == 0.0 && best >= 0) {
      v(best) = 1.0;
      used = true;
    }
  }
  return used;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

TrainedDecoder train_joint_decoder(const std::vector<TrainingSample>& train,
                                   const std::vector<TrainingSample>& val,
                                   double lambda0, double dlambda,
                                   std::uint64_t seed,
                                   const TrainOptions& options) {
  if (!(lambda0 > 0.0 && lambda0 <= 1.0))
    throw ParameterError("train_joint_decoder: lambda0 must be in (0, 1]");
  if (!(dlambda > 0.0))
    throw ParameterError("train_joint_decoder: dlambda must be positive");
  if (train.empty() || val.empty())
    throw ParameterError("train_joint_decoder: empty train or val set");

  PreparedSet train_set = prepare(train, true);
  PreparedSet val_set = prepare(val, false);
  require_both_classes(train_set.labels, "train set");
  require_both_classes(val_set.labels, "validation set");

  const Eigen::Index n = static_cast<Eigen::Index>(train.size());

  // Seeded class-stratified starting subset of about lambda0 * N samples.
  Eigen::VectorXd v_fit = Eigen::VectorXd::Zero(n);
  {
    Rng rng(seed);
    for (Label cls : {Label::Left, Label::Right}) {
      std::vector<Eigen::Index> members;
      for (Eigen::Index i = 0; i < n; ++i)
        if (train_set.labels[static_cast<std::size_t>(i)] == cls)
          members.push_back(i);
      const auto take = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::ceil(lambda0 * static_cast<double>(members.size()))));
      rng.shuffle(members);
      for (std::size_t k = 0; k < take && k < members.size(); ++k)
        v_fit(members[k]) = 1.0;
    }
  }

  TrainedDecoder best;
  best.best_iteration = -1;
  PaceSchedule pace{lambda0, dlambda, 0.5};
  bool pending_fallback = false;
  int k = 0;

  while (true) {
    const SpatialFilterBank bank = fit_weighted_csp(
        train_set.covs, to_std(v_fit), train_set.labels, options.n_pairs);
    const Eigen::MatrixXd feats = all_features(bank, train_set);

    DecoderModel model = fit_weighted_svm(feats, train_set.signs, v_fit,
                                          options.svm_c, options.svm);

    // Posterior calibrated on the recruited samples only.
    {
      std::vector<Eigen::Index> rec;
      for (Eigen::Index i = 0; i < n; ++i)
        if (v_fit(i) > 0.0) rec.push_back(i);
      Eigen::MatrixXd rec_feats(static_cast<Eigen::Index>(rec.size()),
                                feats.cols());
      std::vector<int> rec_signs;
      for (std::size_t r = 0; r < rec.size(); ++r) {
        rec_feats.row(static_cast<Eigen::Index>(r)) = feats.row(rec[r]);
        rec_signs.push_back(train_set.signs[static_cast<std::size_t>(rec[r])]);
      }
      calibrate_posterior(model, rec_feats, rec_signs, options.svm);
    }

    const double val_acc = accuracy_on(bank, model, val_set);

    Eigen::VectorXd raw(n);
    for (Eigen::Index i = 0; i < n; ++i)
      raw(i) = per_sample_hinge_loss(model, feats.row(i).transpose(),
                                     train_set.signs[static_cast<std::size_t>(i)]);
    pace.lambda = lambda_from_pace(raw, pace.capital_lambda);
    pace.validate();
    const Eigen::VectorXd normalized = normalize_losses(raw);
    Eigen::VectorXd v_report(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v_report(i) = weight_from_loss(normalized(i), pace.lambda);

    SplIterationTrace row;
    row.iteration = k;
    row.capital_lambda = pace.capital_lambda;
    row.lambda = pace.lambda;
    row.recruited = static_cast<int>((v_report.array() > 0.0).count());
    row.train_mean_loss = normalized.mean();
    row.val_accuracy = val_acc;
    row.class_fallback = pending_fallback;
    best.trace.push_back(row);
    pending_fallback = false;

    if (best.best_iteration < 0 || val_acc > best.val_accuracy) {
      best.bank = bank;
      best.model = model;
      best.weights = {v_report, normalized};
      best.best_iteration = k;
      best.val_accuracy = val_acc;
      best.train_decisions.resize(n);
      for (Eigen::Index i = 0; i < n; ++i)
        best.train_decisions(i) = decision_value(model, feats.row(i).transpose());
      best.train_labels = train_set.labels;
    }

    if (pace.capital_lambda >= 1.0 - 1e-12) break;
    pace.capital_lambda = std::min(1.0, pace.capital_lambda + pace.delta_lambda);
    ++k;

    // The widened threshold reselects samples under the current losses
    // before the next fit.
    const double lambda_next = lambda_from_pace(raw, pace.capital_lambda);
    for (Eigen::Index i = 0; i < n; ++i)
      v_fit(i) = weight_from_loss(normalized(i), lambda_next);
    pending_fallback = apply_class_fallback(v_fit, raw, train_set.labels);
  }
  return best;
}

TrainedDecoder train_joint_decoder(const std::vector<Epoch>& train,
                                   const std::vector<Epoch>& val,
                                   double lambda0, double dlambda,
                                   std::uint64_t seed,
                                   const TrainOptions& options) {
  return train_joint_decoder(to_samples(train), to_samples(val), lambda0,
                             dlambda, seed, options);
}

TrainedDecoder train_joint_decoder(const std::vector<TrainingSample>& data,
                                   double lambda0, double dlambda,
                                   std::uint64_t seed,
                                   const TrainOptions& options) {
  auto [train, val] = split_train_val(data, options.val_fraction);
  return train_joint_decoder(train, val, lambda0, dlambda, seed, options);
}

TrainedDecoder train_joint_decoder(const std::vector<Epoch>& data,
                                   double lambda0, double dlambda,
                                   std::uint64_t seed,
                                   const TrainOptions& options) {
  return train_joint_decoder(to_samples(data), lambda0, dlambda, seed,
                             options);
}

TrainedDecoder train_retrain_decoder(const std::vector<TrainingSample>& data,
                                     const TrainOptions& options) {
  PreparedSet set = prepare(data, true);
  require_both_classes(set.labels, "training set");

  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  TrainedDecoder out;
  out.bank = fit_weighted_csp(set.covs, to_std(ones), set.labels,
                              options.n_pairs);
  const Eigen::MatrixXd feats = all_features(out.bank, set);
  out.model = fit_weighted_svm(feats, set.signs, ones, options.svm_c,
                               options.svm);
  calibrate_posterior(out.model, feats, set.signs, options.svm);

  Eigen::VectorXd raw(n);
  for (Eigen::Index i = 0; i < n; ++i)
    raw(i) = per_sample_hinge_loss(out.model, feats.row(i).transpose(),
                                   set.signs[static_cast<std::size_t>(i)]);
  out.weights = {ones, normalize_losses(raw)};
  out.best_iteration = 0;
  out.val_accuracy = accuracy_on(out.bank, out.model, set);
  out.train_decisions.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.train_decisions(i) = decision_value(out.model, feats.row(i).transpose());
  out.train_labels = set.labels;

  SplIterationTrace row;
  row.capital_lambda = 1.0;
  row.lambda = 1.0 - 1e-6;
  row.recruited = static_cast<int>(n);
  row.train_mean_loss = out.weights.losses.mean();
  row.val_accuracy = out.val_accuracy;
  out.trace.push_back(row);
  return out;
}

TrainedDecoder train_retrain_decoder(const std::vector<Epoch>& data,
                                     const TrainOptions& options) {
  return train_retrain_decoder(to_samples(data), options);
}

}  // namespace jointbci
