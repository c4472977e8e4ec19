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

#include "jointbci/subject.hpp"

#include <algorithm>
#include <cmath>

namespace jointbci {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Paul Kellet's economy pink-noise filter; close enough to 1/f over the
// bands we care about and fully deterministic.
class PinkNoise {
 public:
  explicit PinkNoise(Rng& rng) : rng_(rng) {}

  double next() {
    const double white = rng_.normal();
    b0_ = 0.99765 * b0_ + white * 0.0990460;
    b1_ = 0.96300 * b1_ + white * 0.2965164;
    b2_ = 0.57000 * b2_ + white * 1.0526913;
    // Scaled toward unit variance.
    return (b0_ + b1_ + b2_ + white * 0.1848) * 0.25;
  }

 private:
  Rng& rng_;
  double b0_ = 0.0, b1_ = 0.0, b2_ = 0.0;
};

}  // namespace

void SubjectParams::validate() const {
  auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in01(p_gg) || !in01(p_bb))
    throw ParameterError("subject.p_gg/p_bb must be in [0, 1]");
  if (delta_copy < 0.0 || delta_new < 0.0)
    throw ParameterError("subject.delta_copy/delta_new must be >= 0");
  if (eta_learn < 0.0)
    throw ParameterError("subject.eta_learn must be >= 0");
}

void GenerationParams::validate() const {
  layout.validate();
  if (!(fs > 0.0)) throw ParameterError("generation.fs must be positive");
  if (!(trial_s > 0.0))
    throw ParameterError("generation.trial_s must be positive");
  if (!(mu_hz > 0.0 && mu_hz < fs / 2.0))
    throw ParameterError("generation.mu_hz must be in (0, fs/2)");
  if (!(noise_sigma > 0.0))
    throw ParameterError("generation.noise_sigma must be positive");
  if (!(erd_depth_good >= 0.0 && erd_depth_good <= 1.0) ||
      !(erd_depth_bad >= 0.0 && erd_depth_bad <= 1.0))
    throw ParameterError("generation.erd_depth must be in [0, 1]");
  if (!(erd_depth_good > erd_depth_bad))
    throw ParameterError(
        "generation.erd_depth_good must exceed erd_depth_bad");
  if (left_hemisphere.empty() || right_hemisphere.empty())
    throw ParameterError("generation hemisphere groups must be non-empty");
  for (const auto& name : left_hemisphere) layout.index_of(name);
  for (const auto& name : right_hemisphere) layout.index_of(name);
}

std::pair<double, double> steady_state(double p_gg, double p_bb) {
  if (!(p_gg >= 0.0 && p_gg <= 1.0 && p_bb >= 0.0 && p_bb <= 1.0))
    throw ParameterError("steady_state: probabilities must be in [0, 1]");
  const double denom = 2.0 - p_gg - p_bb;
  if (denom <= 0.0)
    throw DegenerateError(
        "steady_state: p_gg = p_bb = 1 has no unique stationary vector");
  return {(1.0 - p_bb) / denom, (1.0 - p_gg) / denom};
}

Subject::Subject(const SubjectParams& params, std::uint64_t seed)
    : params_(params), seed_(seed), rng_(derive_seed(seed, "mode-chain")) {
  params_.validate();
  // Initial mode drawn from the stationary distribution of the base chain.
  const double p_good = steady_state(params_.p_gg, params_.p_bb).first;
  mode_ = rng_.bernoulli(p_good) ? Mode::Good : Mode::Bad;
}

Mode Subject::step_mode(InstructionKind instruction) {
  double p_gg = params_.p_gg;
  double p_bb = params_.p_bb;
  // Instructions act on the strategy just exhibited: Copy reinforces a
  // Good state, New encourages escaping a Bad one.
  if (instruction == InstructionKind::Copy && mode_ == Mode::Good)
    p_gg = clamp01(p_gg + params_.delta_copy);
  else if (instruction == InstructionKind::New && mode_ == Mode::Bad)
    p_bb = clamp01(p_bb - params_.delta_new);

  const double stay = mode_ == Mode::Good ? p_gg : p_bb;
  const bool stays = rng_.bernoulli(stay);
  mode_ = stays ? mode_ : (mode_ == Mode::Good ? Mode::Bad : Mode::Good);
  return mode_;
}

void Subject::apply_learning_update(bool trial_success) {
  if (!trial_success || params_.eta_learn == 0.0) return;
  params_.p_gg = clamp01(params_.p_gg + params_.eta_learn);
  params_.p_bb = clamp01(params_.p_bb - params_.eta_learn);
}

Epoch Subject::generate_trial(Label label, const GenerationParams& params,
                              std::uint64_t trial_index) const {
  params.validate();
  Rng rng(derive_seed(seed_, "trial", trial_index));

  const auto channels = static_cast<Eigen::Index>(params.layout.size());
  const auto samples =
      static_cast<Eigen::Index>(std::lround(params.trial_s * params.fs));

  // Which channel group desynchronizes, and how deeply.
  const std::vector<std::string>* attenuated = nullptr;
  double depth = 0.0;
  if (mode_ == Mode::Good) {
    attenuated = label == Label::Left ? &params.right_hemisphere
                                      : &params.left_hemisphere;
    depth = params.erd_depth_good;
  } else {
    attenuated = rng.bernoulli(0.5) ? &params.right_hemisphere
                                    : &params.left_hemisphere;
    depth = params.erd_depth_bad;
  }
  std::vector<bool> is_attenuated(static_cast<std::size_t>(channels), false);
  for (const auto& name : *attenuated)
    is_attenuated[params.layout.index_of(name)] = true;

  Epoch ep;
  ep.fs = params.fs;
  ep.layout = params.layout;
  ep.label = label;
  ep.data.resize(channels, samples);

  const double dt = 1.0 / params.fs;
  for (Eigen::Index ch = 0; ch < channels; ++ch) {
    const double phase = kTwoPi * rng.uniform();
    const double amp =
        params.mu_amp *
        (is_attenuated[static_cast<std::size_t>(ch)] ? 1.0 - depth : 1.0);
    PinkNoise pink(rng);
    for (Eigen::Index t = 0; t < samples; ++t)
      ep.data(ch, t) =
          amp * std::sin(kTwoPi * params.mu_hz * dt * static_cast<double>(t) +
                         phase) +
          params.noise_sigma * pink.next();
  }
  // Quantize to float32 so a trial round-trips the epoch container
  // losslessly and replayed sessions match live ones bit for bit.
  ep.data = ep.data.cast<float>().cast<double>();
  return ep;
}

}  // namespace jointbci
