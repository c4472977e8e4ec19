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

#include "jointbci/epoch.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace jointbci {

std::size_t ChannelLayout::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw ParameterError("unknown channel name: " + name);
  return static_cast<std::size_t>(it - names.begin());
}

void ChannelLayout::validate() const {
  if (names.empty())
    throw ParameterError("layout.names must be non-empty");
  std::set<std::string> seen(names.begin(), names.end());
  if (seen.size() != names.size())
    throw ParameterError("layout.names must be unique");
  if (seen.count(reference))
    throw ParameterError("layout.reference must not appear in layout.names");
}

void Epoch::validate() const {
  layout.validate();
  if (static_cast<std::size_t>(data.rows()) != layout.names.size())
    throw DataError("epoch row count does not match channel layout");
  if (data.cols() < 1) throw DataError("epoch must have at least one sample");
  if (!(fs > 0.0)) throw ParameterError("epoch.fs must be positive");
  if (!data.allFinite()) throw DataError("epoch contains non-finite values");
}

std::vector<TrialSlice> slice_trial(const Epoch& epoch, double start_s,
                                    double end_s, double window_s,
                                    double hop_s) {
  if (start_s < 0.0) throw ParameterError("slice start_s must be >= 0");
  if (end_s > epoch.duration_s() + 1e-9)
    throw ParameterError("slice end_s exceeds trial duration");
  if (!(hop_s > 0.0)) throw ParameterError("slice hop_s must be positive");
  if (window_s > end_s - start_s + 1e-9)
    throw ParameterError("slice window_s does not fit in [start_s, end_s]");

  const auto window_n = static_cast<Eigen::Index>(std::lround(window_s * epoch.fs));
  if (window_n < 1) throw ParameterError("slice window_s too short for fs");

  std::vector<TrialSlice> slices;
  const double span = end_s - start_s - window_s;
  for (std::size_t k = 0;; ++k) {
    const double rel = static_cast<double>(k) * hop_s;
    if (rel > span + 1e-9) break;
    const double offset_s = start_s + rel;
    const auto first = static_cast<Eigen::Index>(std::lround(offset_s * epoch.fs));
    if (first + window_n > epoch.samples()) break;
    slices.push_back({epoch.data.middleCols(first, window_n), offset_s});
  }
  if (slices.empty()) throw ParameterError("slice window does not fit");
  return slices;
}

Epoch crop(const Epoch& epoch, double start_s, double end_s) {
  if (start_s < 0.0 || end_s <= start_s || end_s > epoch.duration_s() + 1e-9)
    throw ParameterError("crop window out of range");
  const auto first = static_cast<Eigen::Index>(std::lround(start_s * epoch.fs));
  const auto last = static_cast<Eigen::Index>(std::lround(end_s * epoch.fs));
  Epoch out = epoch;
  out.data = epoch.data.middleCols(first, std::min(last, epoch.samples()) - first);
  return out;
}

Epoch select_channels(const Epoch& epoch,
                      const std::vector<std::string>& names) {
  Epoch out;
  out.label = epoch.label;
  out.fs = epoch.fs;
  out.layout.names = names;
  out.layout.reference = epoch.layout.reference;
  out.layout.validate();
  out.data.resize(static_cast<Eigen::Index>(names.size()), epoch.samples());
  for (std::size_t i = 0; i < names.size(); ++i)
    out.data.row(static_cast<Eigen::Index>(i)) =
        epoch.data.row(static_cast<Eigen::Index>(epoch.layout.index_of(names[i])));
  return out;
}

}  // namespace jointbci
