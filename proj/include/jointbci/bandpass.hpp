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

#ifndef JOINTBCI_BANDPASS_HPP
#define JOINTBCI_BANDPASS_HPP

#include <complex>
#include <vector>

#include "jointbci/epoch.hpp"

namespace jointbci {

/// Band-pass design parameters. `order` is the order of the low-pass
/// analog prototype (butter() convention), so the realized band-pass has
/// 2*order poles arranged as `order` second-order sections.
struct BandpassSpec {
  double low_hz = 8.0;
  double high_hz = 30.0;
  int order = 4;
  double fs = 1000.0;

  void validate() const;
};

/// One biquad: y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2].
struct Biquad {
  double b0, b1, b2;
  double a1, a2;
};

/// Cascade of second-order sections, each normalized to unit magnitude at
/// the (pre-warped) geometric band center.
struct FilterCoefficients {
  std::vector<Biquad> sections;
  double fs = 0.0;

  /// Complex frequency response H(e^{j 2 pi f / fs}).
  std::complex<double> response(double freq_hz) const;

  /// All cascade poles in the z-plane (two per section).
  std::vector<std::complex<double>> poles() const;
};

/// Butterworth band-pass via analog prototype, low-pass-to-band-pass
/// transform and bilinear transform with frequency pre-warping.
FilterCoefficients design_bandpass(const BandpassSpec& spec);

/// Causal forward-only filtering, one pass per channel, zero initial state.
/// Shape, label and layout are preserved.
Epoch apply_filter(const FilterCoefficients& coeffs, const Epoch& epoch);

/// Same, on a bare signal matrix (rows = channels).
Eigen::MatrixXd apply_filter(const FilterCoefficients& coeffs,
                             const Eigen::MatrixXd& data);

}  // namespace jointbci

#endif  // JOINTBCI_BANDPASS_HPP
