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

#include "jointbci/paradigm.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "jointbci/bandpass.hpp"
#include "jointbci/config.hpp"
#include "jointbci/model_io.hpp"
#include "jointbci/rng.hpp"

namespace jointbci {

void update_feedback(FeedbackState& state, double p_left, double alpha) {
  if (!(p_left >= 0.0 && p_left <= 1.0))
    throw ParameterError("update_feedback: p_left must be in [0, 1]");
  if (!(alpha > 0.0))
    throw ParameterError("update_feedback: alpha must be positive");
  state.c_left =
      std::clamp(state.c_left + alpha * (p_left - 0.5) * 2.0, 0.0, 1.0);
  state.c_right = 1.0 - state.c_left;
  ++state.update_count;
}

TrialOutcome score_trial(const DecoderModel& model,
                         const std::vector<Eigen::VectorXd>& window_features,
                         Label label, double threshold_t) {
  if (window_features.empty())
    throw ParameterError("score_trial: at least one window required");
  TrialOutcome out;
  out.label = label;
  int correct = 0;
  double p_sum = 0.0;
  for (const Eigen::VectorXd& f : window_features) {
    const Prediction pred = predict(model, f);
    const bool hit = pred.label == label;
    out.window_correct.push_back(hit ? 1 : 0);
    out.decision_trace.push_back(pred.decision);
    p_sum += pred.p_left;
    if (hit) ++correct;
  }
  const auto n = static_cast<double>(window_features.size());
  out.accuracy = static_cast<double>(correct) / n;
  out.success = out.accuracy >= threshold_t;
  out.mean_p_left = p_sum / n;
  return out;
}

InstructionKind next_instruction(const TrialOutcome& previous,
                                 LearnMode mode) {
  if (mode == LearnMode::CoAdaptive) return InstructionKind::None;
  if (!previous.pair_first)
    throw ParameterError(
        "next_instruction: previous outcome is not a pair-first trial");
  return previous.success ? InstructionKind::Copy : InstructionKind::New;
}

namespace {

struct TrialSlot {
  Label label;
  bool pair_first;
};

// Balanced random order; every slot stands alone.
std::vector<TrialSlot> balanced_sequence(int per_class, Rng& rng) {
  std::vector<TrialSlot> slots;
  for (int i = 0; i < per_class; ++i) {
    slots.push_back({Label::Left, true});
    slots.push_back({Label::Right, true});
  }
  rng.shuffle(slots);
  return slots;
}

// Same-class first/next pairs in random pair order. An odd per-class
// count leaves one unpaired trial per class at a random position.
std::vector<TrialSlot> paired_sequence(int per_class, Rng& rng) {
  struct Unit {
    Label label;
    int len;
  };
  std::vector<Unit> units;
  for (Label cls : {Label::Left, Label::Right}) {
    for (int p = 0; p < per_class / 2; ++p) units.push_back({cls, 2});
    if (per_class % 2 == 1) units.push_back({cls, 1});
  }
  rng.shuffle(units);
  std::vector<TrialSlot> slots;
  for (const Unit& u : units) {
    slots.push_back({u.label, true});
    if (u.len == 2) slots.push_back({u.label, false});
  }
  return slots;
}

// Projection of one trial with running sums, so every overlapping window's
// log-variance features come out in O(filters) instead of a re-projection.
class WindowScorer {
 public:
  WindowScorer(const SpatialFilterBank& bank, const Eigen::MatrixXd& data)
      : n_filters_(bank.n_filters()) {
    const Eigen::MatrixXd z = bank.filters * data;
    cum1_.resize(n_filters_, z.cols() + 1);
    cum2_.resize(n_filters_, z.cols() + 1);
    cum1_.col(0).setZero();
    cum2_.col(0).setZero();
    for (Eigen::Index t = 0; t < z.cols(); ++t) {
      cum1_.col(t + 1) = cum1_.col(t) + z.col(t);
      cum2_.col(t + 1) = cum2_.col(t) + z.col(t).cwiseProduct(z.col(t));
    }
  }

  Eigen::VectorXd features(Eigen::Index first, Eigen::Index len) const {
    const double n = static_cast<double>(len);
    Eigen::VectorXd variances(n_filters_);
    for (Eigen::Index k = 0; k < n_filters_; ++k) {
      const double s1 = cum1_(k, first + len) - cum1_(k, first);
      const double s2 = cum2_(k, first + len) - cum2_(k, first);
      const double mean = s1 / n;
      variances(k) = std::max(0.0, s2 / n - mean * mean);
    }
    const double total = variances.sum();
    if (!(total > 0.0))
      throw DegenerateError("window features: zero projected variance");
    return (variances / total).array().log().matrix();
  }

 private:
  Eigen::Index n_filters_;
  Eigen::MatrixXd cum1_, cum2_;
};

struct WindowGrid {
  Eigen::Index first;
  Eigen::Index len;
};

std::vector<WindowGrid> window_grid(double fs, Eigen::Index total_samples,
                                    double start_s, double end_s,
                                    double window_s, double hop_s) {
  std::vector<WindowGrid> grid;
  const auto len = static_cast<Eigen::Index>(std::lround(window_s * fs));
  const double span = end_s - start_s - window_s;
  for (std::size_t k = 0;; ++k) {
    const double rel = static_cast<double>(k) * hop_s;
    if (rel > span + 1e-9) break;
    const auto first =
        static_cast<Eigen::Index>(std::lround((start_s + rel) * fs));
    if (first + len > total_samples) break;
    grid.push_back({first, len});
  }
  return grid;
}

std::vector<Eigen::VectorXd> grid_features(const WindowScorer& scorer,
                                           const std::vector<WindowGrid>& grid) {
  std::vector<Eigen::VectorXd> feats;
  feats.reserve(grid.size());
  for (const WindowGrid& w : grid) feats.push_back(scorer.features(w.first, w.len));
  return feats;
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

// Per-class weighted mean of the decoder's training scores; plain mean
// when the class carries no weight at the winning iteration.
std::pair<double, double> training_score_means(const TrainedDecoder& td) {
  double out[2] = {0.0, 0.0};
  for (int cls = 0; cls < 2; ++cls) {
    const Label want = cls == 0 ? Label::Left : Label::Right;
    std::vector<double> dec, w;
    for (std::size_t i = 0; i < td.train_labels.size(); ++i) {
      if (td.train_labels[i] != want) continue;
      dec.push_back(td.train_decisions(static_cast<Eigen::Index>(i)));
      w.push_back(td.weights.v(static_cast<Eigen::Index>(i)));
    }
    if (dec.empty()) continue;
    double mass = 0.0;
    for (double x : w) mass += x;
    out[cls] = mass > 0.0 ? weighted_score_mean(dec, w) : mean_of(dec);
  }
  return {out[0], out[1]};
}

ExperimentReport build_report(const ExperimentConfig& config,
                              std::uint64_t seed,
                              std::vector<TrialRecord> records,
                              const std::vector<TrainingSample>& samples,
                              const std::vector<TrainedDecoder>& decoders) {
  const int n_sessions = config.session.n_sessions;
  ExperimentReport report;
  report.mode =
      config.session.mode == LearnMode::Joint ? "joint" : "coadaptive";
  report.seed = seed;
  report.config_hash = config_hash(config);

  // Separability is judged under one bank fitted (unweighted) on the last
  // two sessions and applied everywhere.
  std::vector<Eigen::MatrixXd> eval_covs;
  std::vector<Label> eval_labels;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (records[i].session < n_sessions - 1) continue;
    eval_covs.push_back(trial_covariance(samples[i].moments));
    eval_labels.push_back(samples[i].label);
  }
  const SpatialFilterBank eval_bank = fit_weighted_csp(
      eval_covs, std::vector<double>(eval_covs.size(), 1.0), eval_labels,
      config.decoder.n_pairs);

  for (int s = 1; s <= n_sessions; ++s) {
    std::vector<double> accs;
    std::vector<double> dec_left, dec_right;
    std::vector<Eigen::VectorXd> feat_left, feat_right;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const TrialRecord& rec = records[i];
      if (rec.session != s) continue;
      accs.push_back(rec.accuracy);
      (rec.label == Label::Left ? dec_left : dec_right)
          .push_back(rec.mean_decision);
      (rec.label == Label::Left ? feat_left : feat_right)
          .push_back(extract_features(eval_bank, samples[i].moments));
    }

    SessionSummary sum;
    sum.session = s;
    sum.accuracy = mean_of(accs);
    sum.success_proportion =
        success_proportion(accs, config.session.threshold_t);

    Eigen::MatrixXd fl(static_cast<Eigen::Index>(feat_left.size()),
                       eval_bank.n_filters());
    Eigen::MatrixXd fr(static_cast<Eigen::Index>(feat_right.size()),
                       eval_bank.n_filters());
    for (std::size_t i = 0; i < feat_left.size(); ++i)
      fl.row(static_cast<Eigen::Index>(i)) = feat_left[i].transpose();
    for (std::size_t i = 0; i < feat_right.size(); ++i)
      fr.row(static_cast<Eigen::Index>(i)) = feat_right[i].transpose();
    sum.distance = feature_distance(fl, fr, config.output.intra_metric);

    const ScoreDistribution dist = fit_score_distribution(
        dec_left, std::vector<double>(dec_left.size(), 1.0), dec_right,
        std::vector<double>(dec_right.size(), 1.0));
    sum.mu_left = dist.mu_left;
    sum.mu_right = dist.mu_right;
    sum.sigma_left = dist.sigma_left;
    sum.sigma_right = dist.sigma_right;
    std::tie(sum.weighted_mu_left, sum.weighted_mu_right) =
        training_score_means(decoders[static_cast<std::size_t>(s - 1)]);
    report.sessions.push_back(sum);
  }

  report.online_accuracy =
      std::max(report.sessions[static_cast<std::size_t>(n_sessions - 1)].accuracy,
               report.sessions[static_cast<std::size_t>(n_sessions - 2)].accuracy);

  std::vector<double> traj_left, traj_right;
  for (const TrialRecord& rec : records)
    (rec.label == Label::Left ? traj_left : traj_right)
        .push_back(rec.mean_decision);
  report.trajectory_left = score_trajectory(traj_left, 10);
  report.trajectory_right = score_trajectory(traj_right, 10);

  for (const TrainedDecoder& td : decoders)
    report.training_traces.push_back(td.trace);

  if (!config.output.include_window_traces)
    for (TrialRecord& rec : records) {
      rec.decision_trace.clear();
      rec.window_correct.clear();
    }
  report.trials = std::move(records);
  return report;
}

TrainedDecoder train_boundary(const ExperimentConfig& config,
                              const std::vector<TrainingSample>& accumulated,
                              std::uint64_t seed, int session) {
  const TrainOptions opts =
      config.decoder.train_options(config.pace.val_fraction);
  try {
    if (config.session.mode == LearnMode::Joint)
      return train_joint_decoder(accumulated, config.pace.lambda0,
                                 config.pace.dlambda,
                                 derive_seed(seed, "train", session), opts);
    return train_retrain_decoder(accumulated, opts);
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "decoder update after session " << session << " failed: "
        << e.what();
    throw DegenerateError(msg.str());
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::uint64_t seed,
                                std::vector<Epoch>* exported_epochs,
                                ExperimentArtifacts* artifacts) {
  config.validate();
  const SessionConfig& sc = config.session;

  BandpassSpec bp = config.decoder.bandpass;
  bp.fs = config.generation.fs;
  const FilterCoefficients coeffs = design_bandpass(bp);

  Subject subject(config.subject, derive_seed(seed, "subject"));

  std::vector<TrainingSample> accumulated;
  std::vector<TrialRecord> records;
  std::vector<TrainedDecoder> decoders;
  std::vector<std::vector<TrialMoments>> calib_slices;

  std::uint64_t global_index = 0;
  for (int s = 1; s <= sc.n_sessions; ++s) {
    Rng label_rng(derive_seed(seed, "labels", static_cast<std::uint64_t>(s)));
    const bool feedback_session = s > 1;
    std::vector<TrialSlot> slots;
    if (!feedback_session)
      slots = balanced_sequence(sc.calibration_per_class(), label_rng);
    else if (sc.mode == LearnMode::Joint)
      slots = paired_sequence(sc.trials_per_class, label_rng);
    else
      slots = balanced_sequence(sc.trials_per_class, label_rng);

    const TrainedDecoder* decoder =
        feedback_session ? &decoders.back() : nullptr;
    std::optional<TrialOutcome> pair_first_outcome;

    for (std::size_t t = 0; t < slots.size(); ++t) {
      const TrialSlot& slot = slots[t];
      InstructionKind instruction = InstructionKind::None;
      if (feedback_session && sc.mode == LearnMode::Joint &&
          !slot.pair_first && pair_first_outcome)
        instruction = next_instruction(*pair_first_outcome, sc.mode);

      const Mode mode = subject.step_mode(instruction);
      const Epoch raw =
          subject.generate_trial(slot.label, config.generation, global_index);
      if (exported_epochs && config.output.export_epochs)
        exported_epochs->push_back(raw);

      const Epoch working = config.decoder.channel_subset.empty()
                                ? raw
                                : select_channels(raw, config.decoder.channel_subset);
      const Epoch filtered = apply_filter(coeffs, working);
      accumulated.push_back(
          make_training_sample(crop(filtered, sc.mi_start_s, sc.mi_end_s)));

      TrialRecord rec;
      rec.session = s;
      rec.index_in_session = static_cast<int>(t);
      rec.global_index = static_cast<int>(global_index);
      rec.label = slot.label;
      rec.instruction = instruction;
      rec.pair_first = slot.pair_first;
      rec.subject_mode = mode == Mode::Good ? "good" : "bad";

      if (!feedback_session) {
        // Scored retroactively once the first decoder exists.
        calib_slices.push_back({});
        for (const TrialSlice& sl :
             slice_trial(filtered, sc.mi_start_s, sc.mi_end_s,
                         sc.slice_window_s, sc.slice_hop_s))
          calib_slices.back().push_back(trial_moments(sl.data));
      } else {
        const WindowScorer scorer(decoder->bank, filtered.data);
        const auto online = window_grid(filtered.fs, filtered.samples(),
                                        sc.mi_start_s, sc.mi_end_s,
                                        sc.window_s, sc.hop_s);
        const auto slices = window_grid(filtered.fs, filtered.samples(),
                                        sc.mi_start_s, sc.mi_end_s,
                                        sc.slice_window_s, sc.slice_hop_s);

        TrialOutcome outcome =
            score_trial(decoder->model, grid_features(scorer, online),
                        slot.label, sc.threshold_t);
        outcome.instruction = instruction;
        outcome.pair_first = slot.pair_first;
        const TrialOutcome slice_outcome =
            score_trial(decoder->model, grid_features(scorer, slices),
                        slot.label, sc.threshold_t);

        FeedbackState fb;
        for (double d : outcome.decision_trace)
          update_feedback(fb, posterior_left(decoder->model, d), sc.alpha);

        rec.accuracy = outcome.accuracy;
        rec.accuracy_slices = slice_outcome.accuracy;
        rec.success = outcome.success;
        rec.mean_decision = mean_of(outcome.decision_trace);
        rec.mean_p_left = outcome.mean_p_left;
        rec.final_c_left = fb.c_left;
        rec.decoder_session = s - 1;
        rec.n_windows = static_cast<int>(outcome.window_correct.size());
        rec.decision_trace = outcome.decision_trace;
        rec.window_correct = outcome.window_correct;

        subject.apply_learning_update(outcome.success);
        if (slot.pair_first)
          pair_first_outcome = outcome;
        else
          pair_first_outcome.reset();
      }
      records.push_back(std::move(rec));
      ++global_index;
    }

    decoders.push_back(train_boundary(config, accumulated, seed, s));

    if (!feedback_session) {
      // Retroactive in-sample scoring of the calibration session on the
      // fixed-slice grid, with the decoder it just trained.
      const TrainedDecoder& td = decoders.back();
      for (std::size_t i = 0; i < calib_slices.size(); ++i) {
        std::vector<Eigen::VectorXd> feats;
        for (const TrialMoments& m : calib_slices[i])
          feats.push_back(extract_features(td.bank, m));
        const TrialOutcome outcome = score_trial(
            td.model, feats, records[i].label, sc.threshold_t);
        records[i].accuracy = outcome.accuracy;
        records[i].accuracy_slices = outcome.accuracy;
        records[i].success = outcome.success;
        records[i].mean_decision = mean_of(outcome.decision_trace);
        records[i].mean_p_left = outcome.mean_p_left;
        records[i].decoder_session = 1;
        records[i].n_windows = static_cast<int>(outcome.window_correct.size());
        records[i].decision_trace = outcome.decision_trace;
        records[i].window_correct = outcome.window_correct;
      }
      calib_slices.clear();
    }
  }

  if (artifacts) {
    artifacts->final_decoder = decoders.back();
    artifacts->training_data_digest = training_digest(accumulated);
  }
  return build_report(config, seed, std::move(records), accumulated, decoders);
}

ExperimentReport run_replay(const ExperimentConfig& config,
                            const std::vector<Epoch>& epochs,
                            std::uint64_t seed,
                            ExperimentArtifacts* artifacts) {
  config.validate();
  const SessionConfig& sc = config.session;
  if (epochs.empty()) throw DataError("replay: no trials in epoch data");

  // Session sizes: explicit chunking, or the configured session layout.
  std::vector<std::size_t> sizes;
  if (config.replay.trials_per_session > 0) {
    const auto chunk =
        static_cast<std::size_t>(config.replay.trials_per_session);
    for (std::size_t done = 0; done < epochs.size(); done += chunk)
      sizes.push_back(std::min(chunk, epochs.size() - done));
  } else {
    sizes.push_back(2 * static_cast<std::size_t>(sc.calibration_per_class()));
    for (int s = 2; s <= sc.n_sessions; ++s)
      sizes.push_back(2 * static_cast<std::size_t>(sc.trials_per_class));
    std::size_t total = 0;
    for (std::size_t n : sizes) total += n;
    if (total != epochs.size()) {
      std::ostringstream msg;
      msg << "replay: session layout expects " << total << " trials but the "
          << "epoch data holds " << epochs.size()
          << " (set replay.trials_per_session to chunk explicitly)";
      throw DataError(msg.str());
    }
  }
  if (sizes.size() < 2)
    throw DataError("replay: need at least two sessions of data");

  const double fs = epochs.front().fs;
  for (const Epoch& ep : epochs)
    if (ep.fs != fs || ep.layout.names != epochs.front().layout.names)
      throw DataError("replay: trials disagree on fs or channel layout");
  if (sc.mi_end_s > epochs.front().duration_s() + 1e-9)
    throw DataError("replay: analysis window exceeds recorded trial length");
  BandpassSpec bp = config.decoder.bandpass;
  bp.fs = fs;
  const FilterCoefficients coeffs = design_bandpass(bp);

  // Replay uses the configured session structure but the recorded number
  // of sessions when chunked explicitly.
  ExperimentConfig effective = config;
  effective.session.n_sessions = static_cast<int>(sizes.size());

  std::vector<TrainingSample> accumulated;
  std::vector<TrialRecord> records;
  std::vector<TrainedDecoder> decoders;
  std::vector<std::vector<TrialMoments>> first_session_slices;

  std::size_t next_trial = 0;
  for (std::size_t s = 1; s <= sizes.size(); ++s) {
    const bool scored_live = s > 1;
    for (std::size_t t = 0; t < sizes[s - 1]; ++t, ++next_trial) {
      const Epoch& raw = epochs[next_trial];
      const Epoch working =
          config.decoder.channel_subset.empty()
              ? raw
              : select_channels(raw, config.decoder.channel_subset);
      const Epoch filtered = apply_filter(coeffs, working);
      accumulated.push_back(
          make_training_sample(crop(filtered, sc.mi_start_s, sc.mi_end_s)));

      TrialRecord rec;
      rec.session = static_cast<int>(s);
      rec.index_in_session = static_cast<int>(t);
      rec.global_index = static_cast<int>(next_trial);
      rec.label = raw.label;

      std::vector<TrialMoments> slices;
      for (const TrialSlice& sl :
           slice_trial(filtered, sc.mi_start_s, sc.mi_end_s, sc.slice_window_s,
                       sc.slice_hop_s))
        slices.push_back(trial_moments(sl.data));

      if (scored_live) {
        const TrainedDecoder& td = decoders.back();
        std::vector<Eigen::VectorXd> feats;
        for (const TrialMoments& m : slices)
          feats.push_back(extract_features(td.bank, m));
        const TrialOutcome outcome =
            score_trial(td.model, feats, raw.label, sc.threshold_t);
        rec.accuracy = outcome.accuracy;
        rec.accuracy_slices = outcome.accuracy;
        rec.success = outcome.success;
        rec.mean_decision = mean_of(outcome.decision_trace);
        rec.mean_p_left = outcome.mean_p_left;
        rec.decoder_session = static_cast<int>(s) - 1;
        rec.n_windows = static_cast<int>(outcome.window_correct.size());
        rec.decision_trace = outcome.decision_trace;
        rec.window_correct = outcome.window_correct;
      } else {
        first_session_slices.push_back(std::move(slices));
      }
      records.push_back(std::move(rec));
    }

    decoders.push_back(
        train_boundary(effective, accumulated, seed, static_cast<int>(s)));

    if (s == 1) {
      const TrainedDecoder& td = decoders.back();
      for (std::size_t i = 0; i < first_session_slices.size(); ++i) {
        std::vector<Eigen::VectorXd> feats;
        for (const TrialMoments& m : first_session_slices[i])
          feats.push_back(extract_features(td.bank, m));
        const TrialOutcome outcome =
            score_trial(td.model, feats, records[i].label, sc.threshold_t);
        records[i].accuracy = outcome.accuracy;
        records[i].accuracy_slices = outcome.accuracy;
        records[i].success = outcome.success;
        records[i].mean_decision = mean_of(outcome.decision_trace);
        records[i].mean_p_left = outcome.mean_p_left;
        records[i].decoder_session = 1;
        records[i].n_windows = static_cast<int>(outcome.window_correct.size());
        records[i].decision_trace = outcome.decision_trace;
        records[i].window_correct = outcome.window_correct;
      }
      first_session_slices.clear();
    }
  }

  if (artifacts) {
    artifacts->final_decoder = decoders.back();
    artifacts->training_data_digest = training_digest(accumulated);
  }
  return build_report(effective, seed, std::move(records), accumulated,
                      decoders);
}

}  // namespace jointbci
