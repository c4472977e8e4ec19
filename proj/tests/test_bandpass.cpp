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
#include "jointbci/rng.hpp"

using namespace jointbci;

namespace {

Epoch make_epoch(const Eigen::MatrixXd& data, double fs) {
  Epoch ep;
  ep.data = data;
  ep.fs = fs;
  ep.layout.reference = "REF";
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    ep.layout.names.push_back("ch" + std::to_string(i));
  return ep;
}

double db(double mag) { return 20.0 * std::log10(mag); }

// Peak amplitude over the last second of a filtered sine, well past the
// transient.
double steady_amplitude(const FilterCoefficients& coeffs, double freq_hz,
                        double fs, double seconds = 4.0) {
  const auto n = static_cast<Eigen::Index>(seconds * fs);
  Eigen::MatrixXd x(1, n);
  for (Eigen::Index t = 0; t < n; ++t)
    x(0, t) = std::sin(2.0 * M_PI * freq_hz * static_cast<double>(t) / fs);
  const Eigen::MatrixXd y = apply_filter(coeffs, x);
  return y.row(0).tail(static_cast<Eigen::Index>(fs)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("bandpass spec validation") {
  CHECK_THROWS_AS(design_bandpass({30, 8, 4, 1000}), ParameterError);
  CHECK_THROWS_AS(design_bandpass({8, 30, 3, 1000}), ParameterError);
  CHECK_THROWS_AS(design_bandpass({8, 30, 0, 1000}), ParameterError);
  CHECK_THROWS_AS(design_bandpass({8, 600, 4, 1000}), ParameterError);
  CHECK_THROWS_AS(design_bandpass({0, 30, 4, 1000}), ParameterError);
  CHECK_NOTHROW(design_bandpass({8, 30, 4, 1000}));
}

TEST_CASE("8-30 Hz order-4 design hits the band-pass landmarks") {
  const FilterCoefficients coeffs = design_bandpass({8, 30, 4, 1000});
  CHECK(coeffs.sections.size() == 4);

  // Band edges at -3 dB, within half a dB.
  CHECK(std::abs(db(std::abs(coeffs.response(8.0))) + 3.0103) < 0.5);
  CHECK(std::abs(db(std::abs(coeffs.response(30.0))) + 3.0103) < 0.5);

  // Geometric band center is essentially untouched.
  const double fc = std::sqrt(8.0 * 30.0);
  CHECK(std::abs(coeffs.response(fc)) >= 0.99);

  // Stop band.
  CHECK(db(std::abs(coeffs.response(2.0))) < -20.0);
  CHECK(db(std::abs(coeffs.response(60.0))) < -20.0);
  CHECK(std::abs(coeffs.response(0.0)) < 1e-9);
}

TEST_CASE("all cascade poles are strictly inside the unit circle") {
  for (const BandpassSpec spec :
       {BandpassSpec{8, 30, 4, 1000}, BandpassSpec{8, 13, 2, 250},
        BandpassSpec{1, 40, 6, 500}}) {
    const FilterCoefficients coeffs = design_bandpass(spec);
    for (const auto& pole : coeffs.poles()) CHECK(std::abs(pole) < 1.0);
  }
}

TEST_CASE("apply_filter is causal, shape-preserving and kills DC") {
  const FilterCoefficients coeffs = design_bandpass({8, 30, 4, 1000});

  SUBCASE("zero input stays zero") {
    Epoch ep = make_epoch(Eigen::MatrixXd::Zero(3, 500), 1000.0);
    const Epoch out = apply_filter(coeffs, ep);
    CHECK(out.data.cwiseAbs().maxCoeff() == 0.0);
    CHECK(out.label == ep.label);
    CHECK(out.layout.names == ep.layout.names);
  }

  SUBCASE("DC input decays to nothing") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 4000);
    const Eigen::MatrixXd y = apply_filter(coeffs, x);
    CHECK(y.row(0).tail(500).cwiseAbs().maxCoeff() < 1e-3);
  }

  SUBCASE("15 Hz sine passes at the designed gain") {
    const double measured = steady_amplitude(coeffs, 15.0, 1000.0);
    const double expected = std::abs(coeffs.response(15.0));
    CHECK(measured == doctest::Approx(expected).epsilon(0.02));
    CHECK(measured > 0.9);
  }

  SUBCASE("2 Hz sine is rejected") {
    CHECK(steady_amplitude(coeffs, 2.0, 1000.0) < 0.1);
  }
}

TEST_CASE("filtering is causal") {
  const FilterCoefficients coeffs = design_bandpass({8, 30, 4, 1000});
  Eigen::MatrixXd impulse = Eigen::MatrixXd::Zero(1, 1000);
  impulse(0, 600) = 1.0;
  const Eigen::MatrixXd y = apply_filter(coeffs, impulse);
  CHECK(y.row(0).head(600).cwiseAbs().maxCoeff() == 0.0);
  CHECK(y.row(0).tail(400).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("filtering is linear to 1e-9") {
  const FilterCoefficients coeffs = design_bandpass({8, 30, 4, 1000});
  Rng rng(99);
  Eigen::MatrixXd x(2, 600), y(2, 600);
  for (Eigen::Index r = 0; r < 2; ++r)
    for (Eigen::Index c = 0; c < 600; ++c) {
      x(r, c) = rng.normal();
      y(r, c) = rng.normal();
    }
  const double a = 1.7, b = -0.4;
  const Eigen::MatrixXd lhs = apply_filter(coeffs, (a * x + b * y).eval());
  const Eigen::MatrixXd rhs =
      a * apply_filter(coeffs, x) + b * apply_filter(coeffs, y);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}
