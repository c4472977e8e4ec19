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

#ifndef JOINTBCI_SUBJECT_HPP
#define JOINTBCI_SUBJECT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "jointbci/epoch.hpp"
#include "jointbci/rng.hpp"

namespace jointbci {

/// Latent signal-quality mode of the simulated subject.
enum class Mode { Good, Bad };

enum class InstructionKind { None, Copy, New };

/// Two-state chain parameters plus the paradigm couplings: instructions
/// modulate single transitions, successful trials drift the chain toward
/// staying Good.
struct SubjectParams {
  double p_gg = 0.5;         // stay-Good probability
  double p_bb = 0.8;         // stay-Bad probability
  double delta_copy = 0.35;  // Copy after a Good trial raises p_gg
  double delta_new = 0.35;   // New after a Bad trial lowers p_bb
  double eta_learn = 0.002;  // drift per successful trial; 0 disables

  void validate() const;
};

/// Synthetic generator settings: a mu rhythm over the motor strip on top
/// of 1/f-shaped noise, with the contralateral channel group attenuated
/// (event-related desynchronization) when the subject is in Good mode.
struct GenerationParams {
  ChannelLayout layout;
  double fs = 1000.0;
  double trial_s = 5.0;
  double mu_hz = 10.0;
  double mu_amp = 2.0;
  double erd_depth_good = 0.7;   // fractional mu attenuation, Good mode
  double erd_depth_bad = 0.05;   // shallow, applied to a random side
  double noise_sigma = 2.0;
  std::vector<std::string> left_hemisphere;   // attenuated for Right imagery
  std::vector<std::string> right_hemisphere;  // attenuated for Left imagery

  void validate() const;
};

/// Analytic stationary distribution of the two-state chain:
///   ( (1-p_bb)/(2-p_gg-p_bb), (1-p_gg)/(2-p_gg-p_bb) ).
std::pair<double, double> steady_state(double p_gg, double p_bb);

/// The simulated subject. Owns its mode, its drifting chain parameters
/// and a seeded stream; exactly one running session may drive it.
class Subject {
 public:
  Subject(const SubjectParams& params, std::uint64_t seed);

  Mode mode() const { return mode_; }
  const SubjectParams& params() const { return params_; }

  /// Draw the next mode. Copy after a Good trial uses p_gg + delta_copy;
  /// New after a Bad trial uses p_bb - delta_new; both clamped to [0, 1].
  Mode step_mode(InstructionKind instruction);

  /// Success nudges the chain: p_gg up, p_bb down, by eta_learn each.
  void apply_learning_update(bool trial_success);

  /// Synthesize one trial for the current mode. All draws come from a
  /// stream derived from (subject seed, trial_index), so the same seed and
  /// index reproduce the epoch bit-for-bit regardless of history.
  Epoch generate_trial(Label label, const GenerationParams& params,
                       std::uint64_t trial_index) const;

 private:
  SubjectParams params_;
  Mode mode_;
  std::uint64_t seed_;
  Rng rng_;
};

}  // namespace jointbci

#endif  // JOINTBCI_SUBJECT_HPP
