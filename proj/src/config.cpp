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

#include "jointbci/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace jointbci {

using nlohmann::json;

TrainOptions DecoderConfig::train_options(double val_fraction) const {
  TrainOptions opts;
  opts.svm_c = svm_c;
  opts.n_pairs = n_pairs;
  opts.val_fraction = val_fraction;
  opts.svm.calib_bound = calib_bound;
  return opts;
}

void SessionConfig::validate() const {
  if (n_sessions < 2) throw ParameterError("session.n_sessions must be >= 2");
  if (trials_per_class < 2)
    throw ParameterError("session.trials_per_class must be >= 2");
  if (calibration_trials_per_class < 0)
    throw ParameterError("session.calibration_trials_per_class must be >= 0");
  if (!(threshold_t > 0.0 && threshold_t < 1.0))
    throw ParameterError("session.threshold_t must be in (0, 1)");
  if (!(alpha > 0.0)) throw ParameterError("session.alpha must be positive");
  if (!(mi_start_s >= 0.0 && mi_end_s > mi_start_s))
    throw ParameterError("session.mi_start_s/mi_end_s must be ordered");
  if (!(window_s > 0.0 && window_s <= mi_end_s - mi_start_s))
    throw ParameterError("session.window_s must fit the analysis window");
  if (!(hop_s > 0.0)) throw ParameterError("session.hop_s must be positive");
  if (!(slice_window_s > 0.0 && slice_window_s <= mi_end_s - mi_start_s))
    throw ParameterError("session.slice_window_s must fit the analysis window");
  if (!(slice_hop_s > 0.0))
    throw ParameterError("session.slice_hop_s must be positive");
}

void ExperimentConfig::validate() const {
  session.validate();
  subject.validate();
  generation.validate();
  if (!(decoder.svm_c > 0.0))
    throw ParameterError("decoder.svm_c must be positive");
  if (decoder.n_pairs < 1)
    throw ParameterError("decoder.n_pairs must be >= 1");
  decoder.bandpass.validate();
  if (decoder.bandpass.fs != generation.fs)
    throw ParameterError("decoder.bandpass.fs must match generation.fs");
  if (!(decoder.calib_bound > 0.0))
    throw ParameterError("decoder.calib_bound must be positive");
  if (!(pace.lambda0 > 0.0 && pace.lambda0 <= 1.0))
    throw ParameterError("pace.lambda0 must be in (0, 1]");
  if (!(pace.dlambda > 0.0))
    throw ParameterError("pace.dlambda must be positive");
  if (!(pace.val_fraction > 0.0 && pace.val_fraction < 1.0))
    throw ParameterError("pace.val_fraction must be in (0, 1)");
  if (replay.trials_per_session < 0)
    throw ParameterError("replay.trials_per_session must be >= 0");
  if (mi_window_exceeds_trial())
    throw ParameterError("session.mi_end_s exceeds generation.trial_s");

  // The channel subset must name known channels and leave CSP feasible.
  std::vector<std::string> active = decoder.channel_subset.empty()
                                        ? generation.layout.names
                                        : decoder.channel_subset;
  for (const auto& name : active) generation.layout.index_of(name);
  if (static_cast<int>(active.size()) < 2 * decoder.n_pairs)
    throw ParameterError(
        "decoder.channel_subset too small for 2*n_pairs CSP filters");
}

bool ExperimentConfig::mi_window_exceeds_trial() const {
  return session.mi_end_s > generation.trial_s + 1e-9;
}

ChannelLayout default_layout() {
  ChannelLayout layout;
  layout.names = {"FC5", "FC3", "FC1", "FCz", "FC2", "FC4", "FC6",
                  "C5",  "C3",  "C1",  "Cz",  "C2",  "C4",  "C6",
                  "CP5", "CP3", "CP1", "CP2", "CP4", "CP6"};
  layout.reference = "CPz";
  return layout;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.generation.layout = default_layout();
  cfg.generation.left_hemisphere = {"FC5", "FC3", "FC1", "C5",  "C3",
                                    "C1",  "CP5", "CP3", "CP1"};
  cfg.generation.right_hemisphere = {"FC2", "FC4", "FC6", "C2",  "C4",
                                     "C6",  "CP2", "CP4", "CP6"};
  return cfg;
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ParameterError("config field '" + field + "': " + why);
}

class Reader {
 public:
  Reader(const json& j, std::string prefix)
      : j_(j), prefix_(std::move(prefix)) {
    if (!j.is_object()) bad_field(prefix_, "must be a JSON object");
  }

  ~Reader() = default;

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!consumed_.count(it.key()))
        bad_field(prefix_ + it.key(), "unknown field");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    consumed_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      bad_field(prefix_ + key, "wrong type");
    }
  }

  json child(const char* key) {
    consumed_.insert(key);
    return j_.at(key);
  }

 private:
  const json& j_;
  std::string prefix_;
  std::set<std::string> consumed_;
};

void read_session(const json& j, SessionConfig& s) {
  Reader r(j, "session.");
  r.get("n_sessions", s.n_sessions);
  r.get("trials_per_class", s.trials_per_class);
  r.get("calibration_trials_per_class", s.calibration_trials_per_class);
  r.get("threshold_t", s.threshold_t);
  r.get("alpha", s.alpha);
  r.get("window_s", s.window_s);
  r.get("hop_s", s.hop_s);
  r.get("mi_start_s", s.mi_start_s);
  r.get("mi_end_s", s.mi_end_s);
  r.get("slice_window_s", s.slice_window_s);
  r.get("slice_hop_s", s.slice_hop_s);
  std::string mode;
  r.get("mode", mode);
  if (!mode.empty()) {
    if (mode == "joint")
      s.mode = LearnMode::Joint;
    else if (mode == "coadaptive")
      s.mode = LearnMode::CoAdaptive;
    else
      bad_field("session.mode", "must be 'joint' or 'coadaptive'");
  }
  r.finish();
}

void read_subject(const json& j, SubjectParams& s) {
  Reader r(j, "subject.");
  r.get("p_gg", s.p_gg);
  r.get("p_bb", s.p_bb);
  r.get("delta_copy", s.delta_copy);
  r.get("delta_new", s.delta_new);
  r.get("eta_learn", s.eta_learn);
  r.finish();
}

void read_generation(const json& j, GenerationParams& g) {
  Reader r(j, "generation.");
  r.get("fs", g.fs);
  r.get("trial_s", g.trial_s);
  r.get("mu_hz", g.mu_hz);
  r.get("mu_amp", g.mu_amp);
  r.get("erd_depth_good", g.erd_depth_good);
  r.get("erd_depth_bad", g.erd_depth_bad);
  r.get("noise_sigma", g.noise_sigma);
  r.get("channels", g.layout.names);
  r.get("reference", g.layout.reference);
  r.get("left_hemisphere", g.left_hemisphere);
  r.get("right_hemisphere", g.right_hemisphere);
  r.finish();
}

void read_decoder(const json& j, DecoderConfig& d) {
  Reader r(j, "decoder.");
  r.get("svm_c", d.svm_c);
  r.get("n_pairs", d.n_pairs);
  r.get("low_hz", d.bandpass.low_hz);
  r.get("high_hz", d.bandpass.high_hz);
  r.get("filter_order", d.bandpass.order);
  r.get("channel_subset", d.channel_subset);
  r.get("calib_bound", d.calib_bound);
  r.finish();
}

void read_pace(const json& j, PaceConfig& p) {
  Reader r(j, "pace.");
  r.get("lambda0", p.lambda0);
  r.get("dlambda", p.dlambda);
  r.get("val_fraction", p.val_fraction);
  r.finish();
}

void read_output(const json& j, OutputConfig& o) {
  Reader r(j, "output.");
  r.get("export_epochs", o.export_epochs);
  r.get("include_window_traces", o.include_window_traces);
  std::string metric;
  r.get("intra_metric", metric);
  if (!metric.empty()) {
    if (metric == "concat_std")
      o.intra_metric = IntraMetric::ConcatStd;
    else if (metric == "sum_norms")
      o.intra_metric = IntraMetric::SumNorms;
    else if (metric == "pooled_std")
      o.intra_metric = IntraMetric::PooledStd;
    else
      bad_field("output.intra_metric",
                "must be concat_std, sum_norms or pooled_std");
  }
  r.finish();
}

void read_replay(const json& j, ReplayConfig& rep) {
  Reader r(j, "replay.");
  r.get("trials_per_session", rep.trials_per_session);
  r.finish();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg = default_config();
  Reader top(j, "");
  if (top.has("session")) read_session(top.child("session"), cfg.session);
  if (top.has("subject")) read_subject(top.child("subject"), cfg.subject);
  if (top.has("generation"))
    read_generation(top.child("generation"), cfg.generation);
  if (top.has("decoder")) read_decoder(top.child("decoder"), cfg.decoder);
  if (top.has("pace")) read_pace(top.child("pace"), cfg.pace);
  if (top.has("output")) read_output(top.child("output"), cfg.output);
  if (top.has("replay")) read_replay(top.child("replay"), cfg.replay);
  top.get("seed", cfg.seed);
  top.finish();

  cfg.decoder.bandpass.fs = cfg.generation.fs;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["session"] = {
      {"n_sessions", cfg.session.n_sessions},
      {"trials_per_class", cfg.session.trials_per_class},
      {"calibration_trials_per_class", cfg.session.calibration_trials_per_class},
      {"threshold_t", cfg.session.threshold_t},
      {"alpha", cfg.session.alpha},
      {"window_s", cfg.session.window_s},
      {"hop_s", cfg.session.hop_s},
      {"mi_start_s", cfg.session.mi_start_s},
      {"mi_end_s", cfg.session.mi_end_s},
      {"slice_window_s", cfg.session.slice_window_s},
      {"slice_hop_s", cfg.session.slice_hop_s},
      {"mode", cfg.session.mode == LearnMode::Joint ? "joint" : "coadaptive"}};
  j["subject"] = {{"p_gg", cfg.subject.p_gg},
                  {"p_bb", cfg.subject.p_bb},
                  {"delta_copy", cfg.subject.delta_copy},
                  {"delta_new", cfg.subject.delta_new},
                  {"eta_learn", cfg.subject.eta_learn}};
  j["generation"] = {{"fs", cfg.generation.fs},
                     {"trial_s", cfg.generation.trial_s},
                     {"mu_hz", cfg.generation.mu_hz},
                     {"mu_amp", cfg.generation.mu_amp},
                     {"erd_depth_good", cfg.generation.erd_depth_good},
                     {"erd_depth_bad", cfg.generation.erd_depth_bad},
                     {"noise_sigma", cfg.generation.noise_sigma},
                     {"channels", cfg.generation.layout.names},
                     {"reference", cfg.generation.layout.reference},
                     {"left_hemisphere", cfg.generation.left_hemisphere},
                     {"right_hemisphere", cfg.generation.right_hemisphere}};
  j["decoder"] = {{"svm_c", cfg.decoder.svm_c},
                  {"n_pairs", cfg.decoder.n_pairs},
                  {"low_hz", cfg.decoder.bandpass.low_hz},
                  {"high_hz", cfg.decoder.bandpass.high_hz},
                  {"filter_order", cfg.decoder.bandpass.order},
                  {"channel_subset", cfg.decoder.channel_subset},
                  {"calib_bound", cfg.decoder.calib_bound}};
  j["pace"] = {{"lambda0", cfg.pace.lambda0},
               {"dlambda", cfg.pace.dlambda},
               {"val_fraction", cfg.pace.val_fraction}};
  const char* metric = "concat_std";
  if (cfg.output.intra_metric == IntraMetric::SumNorms) metric = "sum_norms";
  if (cfg.output.intra_metric == IntraMetric::PooledStd) metric = "pooled_std";
  j["output"] = {{"export_epochs", cfg.output.export_epochs},
                 {"include_window_traces", cfg.output.include_window_traces},
                 {"intra_metric", metric}};
  j["replay"] = {{"trials_per_session", cfg.replay.trials_per_session}};
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string canon = config_to_json(config);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace jointbci
