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

#include "jointbci/bandpass.hpp"
#include "jointbci/config.hpp"
#include "jointbci/subject.hpp"

using namespace jointbci;

namespace {

GenerationParams default_generation() {
  const ExperimentConfig cfg = default_config();
  return cfg.generation;
}

// Force the chain into a known mode by construction: p_gg=1/p_bb=0 pins
// Good, the reverse pins Bad.
Subject pinned_subject(Mode mode, std::uint64_t seed) {
  SubjectParams p;
  if (mode == Mode::Good) {
    p.p_gg = 1.0;
    p.p_bb = 0.0;
  } else {
    p.p_gg = 0.0;
    p.p_bb = 1.0;
  }
  p.eta_learn = 0.0;
  Subject s(p, seed);
  s.step_mode(InstructionKind::None);
  return s;
}

// Mu-band lateralization oracle: band-pass 8-13 Hz, compare hemisphere
// power. Left imagery suppresses the right hemisphere.
Label bandpower_oracle(const Epoch& ep, const GenerationParams& gen) {
  static const FilterCoefficients mu_band =
      design_bandpass({8.0, 13.0, 4, 1000.0});
  const Epoch filtered = apply_filter(mu_band, ep);
  auto group_power = [&](const std::vector<std::string>& names) {
    double acc = 0.0;
    for (const auto& name : names) {
      const auto row = static_cast<Eigen::Index>(ep.layout.index_of(name));
      acc += filtered.data.row(row).tail(filtered.samples() - 500).squaredNorm();
    }
    return acc / static_cast<double>(names.size());
  };
  const double left_power = group_power(gen.left_hemisphere);
  const double right_power = group_power(gen.right_hemisphere);
  return right_power < left_power ? Label::Left : Label::Right;
}

}  // namespace

TEST_CASE("steady state matches the analytic two-state solution") {
  SUBCASE("symmetric chain") {
    const auto [g, b] = steady_state(0.5, 0.5);
    CHECK(g == doctest::Approx(0.5));
    CHECK(b == doctest::Approx(0.5));
  }

  SUBCASE("worked example") {
    const auto [g, b] = steady_state(0.8, 0.4);
    CHECK(g == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(b == doctest::Approx(0.25).epsilon(1e-12));
  }

  SUBCASE("components always sum to one") {
    Rng rng(60);
    for (int k = 0; k < 50; ++k) {
      const double pg = rng.uniform() * 0.99, pb = rng.uniform() * 0.99;
      const auto [g, b] = steady_state(pg, pb);
      CHECK(g + b == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("absorbing-everywhere chain is degenerate") {
    CHECK_THROWS_AS(steady_state(1.0, 1.0), DegenerateError);
    CHECK_THROWS_AS(steady_state(1.2, 0.5), ParameterError);
  }

  SUBCASE("empirical mode frequencies match the analytic vector") {
    SubjectParams p;
    p.p_gg = 0.7;
    p.p_bb = 0.45;
    p.eta_learn = 0.0;
    Subject subject(p, 77);
    long good = 0;
    const long steps = 100000;
    for (long t = 0; t < steps; ++t)
      if (subject.step_mode(InstructionKind::None) == Mode::Good) ++good;
    const auto [g, b] = steady_state(p.p_gg, p.p_bb);
    CHECK(static_cast<double>(good) / steps == doctest::Approx(g).epsilon(0.02));
  }
}

TEST_CASE("eq-8-style monotonicity: better chains mean better mode odds") {
  double prev_ratio = 0.0;
  for (double pg = 0.1; pg < 0.95; pg += 0.2) {
    const auto [g, b] = steady_state(pg, 0.5);
    CHECK(g / b > prev_ratio);
    prev_ratio = g / b;
  }
  prev_ratio = steady_state(0.5, 0.9).first / steady_state(0.5, 0.9).second;
  for (double pb = 0.7; pb > 0.05; pb -= 0.2) {
    const auto [g, b] = steady_state(0.5, pb);
    CHECK(g / b > prev_ratio);
    prev_ratio = g / b;
  }
}

TEST_CASE("instructions modulate single transitions") {
  SUBCASE("a full New increment forces escape from Bad") {
    SubjectParams p;
    p.p_gg = 0.5;
    p.p_bb = 0.9;
    p.delta_new = 1.0;
    p.eta_learn = 0.0;
    Subject subject(p, 5);
    int escapes_checked = 0;
    for (int t = 0; t < 400; ++t) {
      const Mode before = subject.mode();
      const Mode after = subject.step_mode(
          before == Mode::Bad ? InstructionKind::New : InstructionKind::None);
      if (before == Mode::Bad) {
        CHECK(after == Mode::Good);
        ++escapes_checked;
      }
    }
    CHECK(escapes_checked > 10);
  }

  SUBCASE("a saturating Copy increment locks Good in place") {
    SubjectParams p;
    p.p_gg = 0.9;
    p.p_bb = 0.2;
    p.delta_copy = 0.5;  // clamps 0.9 + 0.5 to 1.0
    p.eta_learn = 0.0;
    Subject subject(p, 6);
    int stays_checked = 0;
    for (int t = 0; t < 400; ++t) {
      const Mode before = subject.mode();
      const Mode after = subject.step_mode(
          before == Mode::Good ? InstructionKind::Copy : InstructionKind::None);
      if (before == Mode::Good) {
        CHECK(after == Mode::Good);
        ++stays_checked;
      }
    }
    CHECK(stays_checked > 10);
  }

  SUBCASE("uninstructed transition frequencies match the base chain") {
    SubjectParams p;
    p.p_gg = 0.65;
    p.p_bb = 0.55;
    p.eta_learn = 0.0;
    Subject subject(p, 7);
    long gg = 0, g_total = 0, bb = 0, b_total = 0;
    Mode prev = subject.mode();
    for (int t = 0; t < 10000; ++t) {
      const Mode next = subject.step_mode(InstructionKind::None);
      if (prev == Mode::Good) {
        ++g_total;
        if (next == Mode::Good) ++gg;
      } else {
        ++b_total;
        if (next == Mode::Bad) ++bb;
      }
      prev = next;
    }
    CHECK(static_cast<double>(gg) / g_total ==
          doctest::Approx(p.p_gg).epsilon(0.04));
    CHECK(static_cast<double>(bb) / b_total ==
          doctest::Approx(p.p_bb).epsilon(0.04));
  }
}

TEST_CASE("the mode chain is memoryless") {
  SubjectParams p;
  p.p_gg = 0.6;
  p.p_bb = 0.7;
  p.eta_learn = 0.0;
  Subject subject(p, 8);
  std::vector<Mode> modes;
  for (int t = 0; t < 200000; ++t)
    modes.push_back(subject.step_mode(InstructionKind::None));

  // P(G | G) should not depend on the state two steps back.
  long ggg = 0, gg_total = 0, bgg = 0, bg_total = 0;
  for (std::size_t t = 2; t < modes.size(); ++t) {
    if (modes[t - 1] != Mode::Good) continue;
    if (modes[t - 2] == Mode::Good) {
      ++gg_total;
      if (modes[t] == Mode::Good) ++ggg;
    } else {
      ++bg_total;
      if (modes[t] == Mode::Good) ++bgg;
    }
  }
  const double cond_gg = static_cast<double>(ggg) / gg_total;
  const double cond_bg = static_cast<double>(bgg) / bg_total;
  CHECK(std::abs(cond_gg - cond_bg) < 0.02);
  CHECK(cond_gg == doctest::Approx(p.p_gg).epsilon(0.03));
}

TEST_CASE("learning drift") {
  SUBCASE("disabled drift leaves the chain untouched") {
    SubjectParams p;
    p.eta_learn = 0.0;
    Subject subject(p, 9);
    const double pg0 = subject.params().p_gg;
    for (int k = 0; k < 50; ++k) subject.apply_learning_update(true);
    CHECK(subject.params().p_gg == pg0);
  }

  SUBCASE("ten successes at 0.01 move (0.6, 0.6) to (0.7, 0.5)") {
    SubjectParams p;
    p.p_gg = 0.6;
    p.p_bb = 0.6;
    p.eta_learn = 0.01;
    Subject subject(p, 10);
    for (int k = 0; k < 10; ++k) subject.apply_learning_update(true);
    CHECK(subject.params().p_gg == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(subject.params().p_bb == doctest::Approx(0.5).epsilon(1e-12));
    subject.apply_learning_update(false);
    CHECK(subject.params().p_gg == doctest::Approx(0.7).epsilon(1e-12));
  }

  SUBCASE("probabilities stay in [0,1] under heavy fuzzing") {
    SubjectParams p;
    p.p_gg = 0.5;
    p.p_bb = 0.5;
    p.delta_copy = 0.9;
    p.delta_new = 0.9;
    p.eta_learn = 0.2;
    Subject subject(p, 11);
    Rng rng(12);
    for (int t = 0; t < 100000; ++t) {
      const auto instr = static_cast<InstructionKind>(rng.below(3));
      subject.step_mode(instr);
      subject.apply_learning_update(rng.bernoulli(0.5));
      CHECK(subject.params().p_gg >= 0.0);
      CHECK(subject.params().p_gg <= 1.0);
      CHECK(subject.params().p_bb >= 0.0);
      CHECK(subject.params().p_bb <= 1.0);
    }
  }

  SUBCASE("steady good odds never fall while successes accumulate") {
    SubjectParams p;
    p.p_gg = 0.5;
    p.p_bb = 0.8;
    p.eta_learn = 0.005;
    Subject subject(p, 13);
    Rng rng(14);
    double prev_good = steady_state(p.p_gg, p.p_bb).first;
    for (int session = 0; session < 10; ++session) {
      for (int t = 0; t < 20; ++t) {
        const Mode mode = subject.step_mode(InstructionKind::None);
        const double acc = mode == Mode::Good ? 0.8 : 0.5;
        subject.apply_learning_update(rng.bernoulli(acc));
      }
      const double good =
          steady_state(subject.params().p_gg, subject.params().p_bb).first;
      CHECK(good >= prev_good - 1e-12);
      prev_good = good;
    }
  }
}

TEST_CASE("trial generation") {
  const GenerationParams gen = default_generation();

  SUBCASE("same seed and index reproduce the epoch bit for bit") {
    Subject a = pinned_subject(Mode::Good, 21);
    Subject b = pinned_subject(Mode::Good, 21);
    const Epoch e1 = a.generate_trial(Label::Left, gen, 5);
    const Epoch e2 = b.generate_trial(Label::Left, gen, 5);
    CHECK(e1.data == e2.data);
    const Epoch e3 = a.generate_trial(Label::Left, gen, 6);
    CHECK(e1.data != e3.data);
  }

  SUBCASE("full depth and near-zero noise silence the contralateral side") {
    GenerationParams quiet = gen;
    quiet.erd_depth_good = 1.0;
    quiet.noise_sigma = 1e-9;
    Subject subject = pinned_subject(Mode::Good, 22);
    const Epoch ep = subject.generate_trial(Label::Left, quiet, 0);
    double contra = 0.0, ipsi = 0.0;
    for (const auto& name : quiet.right_hemisphere)
      contra += ep.data.row(static_cast<Eigen::Index>(ep.layout.index_of(name)))
                    .squaredNorm();
    for (const auto& name : quiet.left_hemisphere)
      ipsi += ep.data.row(static_cast<Eigen::Index>(ep.layout.index_of(name)))
                  .squaredNorm();
    CHECK(contra < 1e-6);
    CHECK(ipsi > 1.0);
  }

  SUBCASE("good-mode trials are decodable by the band-power oracle") {
    Subject subject = pinned_subject(Mode::Good, 23);
    int hits = 0;
    const int n = 200;
    for (int t = 0; t < n; ++t) {
      const Label truth = t % 2 == 0 ? Label::Left : Label::Right;
      const Epoch ep = subject.generate_trial(truth, gen,
                                              static_cast<std::uint64_t>(t));
      if (bandpower_oracle(ep, gen) == truth) ++hits;
    }
    CHECK(static_cast<double>(hits) / n > 0.9);
  }

  SUBCASE("bad-mode trials sit at chance for the same oracle") {
    Subject subject = pinned_subject(Mode::Bad, 24);
    int hits = 0;
    const int n = 200;
    for (int t = 0; t < n; ++t) {
      const Label truth = t % 2 == 0 ? Label::Left : Label::Right;
      const Epoch ep = subject.generate_trial(truth, gen,
                                              static_cast<std::uint64_t>(t));
      if (bandpower_oracle(ep, gen) == truth) ++hits;
    }
    CHECK(static_cast<double>(hits) / n == doctest::Approx(0.5).epsilon(0.14));
  }

  SUBCASE("generation parameter guards") {
    GenerationParams bad = gen;
    bad.erd_depth_bad = 0.9;  // must stay below erd_depth_good
    Subject subject = pinned_subject(Mode::Good, 25);
    CHECK_THROWS_AS(subject.generate_trial(Label::Left, bad, 0),
                    ParameterError);
    GenerationParams empty = gen;
    empty.left_hemisphere.clear();
    CHECK_THROWS_AS(subject.generate_trial(Label::Left, empty, 0),
                    ParameterError);
  }
}
