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

#ifndef JOINTBCI_EPOCH_HPP
#define JOINTBCI_EPOCH_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "jointbci/errors.hpp"

namespace jointbci {

/// Motor-imagery class of a trial.
enum class Label { Left, Right };

/// +1 for Left, -1 for Right. Left posteriors grow with the decision value.
inline int label_sign(Label l) { return l == Label::Left ? +1 : -1; }

inline Label label_from_sign(double s) {
  return s >= 0.0 ? Label::Left : Label::Right;
}

/// Ordered electrode montage. The reference electrode is not part of the
/// recorded rows.
struct ChannelLayout {
  std::vector<std::string> names;
  std::string reference;

  std::size_t size() const { return names.size(); }

  /// Index of a channel name, or throws.
  std::size_t index_of(const std::string& name) const;

  void validate() const;
};

/// One trial: a channels x samples matrix in microvolts plus its label and
/// sampling metadata. The unit flowing through the whole pipeline.
struct Epoch {
  Eigen::MatrixXd data;  // rows follow layout.names
  Label label = Label::Left;
  double fs = 0.0;
  ChannelLayout layout;

  Eigen::Index channels() const { return data.rows(); }
  Eigen::Index samples() const { return data.cols(); }
  double duration_s() const { return static_cast<double>(samples()) / fs; }

  void validate() const;
};

/// A fixed-length window cut from a trial.
struct TrialSlice {
  Eigen::MatrixXd data;  // channels x window samples
  double offset_s = 0.0;
};

/// Cut windows of `window_s` seconds every `hop_s` seconds from
/// [start_s, end_s]. Offsets are computed in continuous time and rounded
/// to samples individually, so fractional hops (e.g. one display frame,
/// 1/60 s) accumulate without drift.
std::vector<TrialSlice> slice_trial(const Epoch& epoch, double start_s,
                                    double end_s, double window_s,
                                    double hop_s);

/// Copy of the epoch restricted to [start_s, end_s).
Epoch crop(const Epoch& epoch, double start_s, double end_s);

/// Restrict an epoch to a subset of channels, preserving the given order.
Epoch select_channels(const Epoch& epoch,
                      const std::vector<std::string>& names);

}  // namespace jointbci

#endif  // JOINTBCI_EPOCH_HPP
