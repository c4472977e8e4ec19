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

#include "jointbci/bandpass.hpp"

#include <cmath>

namespace jointbci {

namespace {

constexpr double kPi = 3.14159265358979323846;

using cdouble = std::complex<double>;

// Quadratic roots of s^2 - q s + r = 0.
std::pair<cdouble, cdouble> quadratic_roots(cdouble q, cdouble r) {
  const cdouble disc = std::sqrt(q * q - 4.0 * r);
  return {(q + disc) / 2.0, (q - disc) / 2.0};
}

}  // namespace

void BandpassSpec::validate() const {
  if (!(fs > 0.0)) throw ParameterError("bandpass.fs must be positive");
  if (!(0.0 < low_hz && low_hz < high_hz && high_hz < fs / 2.0))
    throw ParameterError(
        "bandpass edges must satisfy 0 < low_hz < high_hz < fs/2");
  if (order < 2 || order % 2 != 0)
    throw ParameterError("bandpass.order must be even and >= 2");
}

FilterCoefficients design_bandpass(const BandpassSpec& spec) {
  spec.validate();
  const double fs2 = 2.0 * spec.fs;

  // Pre-warp the band edges so the bilinear transform lands them exactly.
  const double wl = fs2 * std::tan(kPi * spec.low_hz / spec.fs);
  const double wh = fs2 * std::tan(kPi * spec.high_hz / spec.fs);
  const double w0 = std::sqrt(wl * wh);  // analog center, rad/s
  const double bw = wh - wl;

  // Digital frequency the analog center maps to; each section is
  // normalized to unit gain there.
  const double wc = 2.0 * std::atan(w0 / fs2);
  const cdouble ejwc = std::polar(1.0, wc);

  FilterCoefficients out;
  out.fs = spec.fs;

  const int n = spec.order;
  // Upper-half-plane Butterworth prototype poles; conjugates are implied.
  for (int k = 0; k < n / 2; ++k) {
    const double angle = kPi * (2.0 * k + n + 1.0) / (2.0 * n);
    const cdouble proto = std::polar(1.0, angle);

    // Low-pass to band-pass: each prototype pole yields two analog poles.
    const auto [s1, s2] = quadratic_roots(proto * bw, cdouble(w0 * w0, 0.0));
    for (const cdouble& s : {s1, s2}) {
      // Bilinear transform; the pair {zd, conj(zd)} makes one real biquad.
      const cdouble zd = (fs2 + s) / (fs2 - s);
      Biquad sec;
      sec.b0 = 1.0;
      sec.b1 = 0.0;
      sec.b2 = -1.0;  // zeros at z = +1 and z = -1
      sec.a1 = -2.0 * zd.real();
      sec.a2 = std::norm(zd);

      const cdouble num = sec.b0 * ejwc * ejwc + sec.b1 * ejwc + sec.b2;
      const cdouble den = ejwc * ejwc + sec.a1 * ejwc + sec.a2;
      const double gain = std::abs(num / den);
      sec.b0 /= gain;
      sec.b1 /= gain;
      sec.b2 /= gain;
      out.sections.push_back(sec);
    }
  }
  return out;
}

std::complex<double> FilterCoefficients::response(double freq_hz) const {
  const cdouble z = std::polar(1.0, 2.0 * kPi * freq_hz / fs);
  cdouble h(1.0, 0.0);
  for (const Biquad& s : sections) {
    const cdouble num = s.b0 * z * z + s.b1 * z + s.b2;
    const cdouble den = z * z + s.a1 * z + s.a2;
    h *= num / den;
  }
  return h;
}

std::vector<std::complex<double>> FilterCoefficients::poles() const {
  std::vector<cdouble> out;
  for (const Biquad& s : sections) {
    const auto [p1, p2] = quadratic_roots(cdouble(-s.a1, 0.0), cdouble(s.a2, 0.0));
    out.push_back(p1);
    out.push_back(p2);
  }
  return out;
}

Eigen::MatrixXd apply_filter(const FilterCoefficients& coeffs,
                             const Eigen::MatrixXd& data) {
  Eigen::MatrixXd out = data;
  const Eigen::Index n = out.cols();
  for (Eigen::Index ch = 0; ch < out.rows(); ++ch) {
    for (const Biquad& s : coeffs.sections) {
      // Transposed direct form II, zero initial conditions.
      double s1 = 0.0, s2 = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) {
        const double x = out(ch, t);
        const double y = s.b0 * x + s1;
        s1 = s.b1 * x - s.a1 * y + s2;
        s2 = s.b2 * x - s.a2 * y;
        out(ch, t) = y;
      }
    }
  }
  return out;
}

Epoch apply_filter(const FilterCoefficients& coeffs, const Epoch& epoch) {
  epoch.validate();
  Epoch out = epoch;
  out.data = apply_filter(coeffs, epoch.data);
  return out;
}

}  // namespace jointbci
