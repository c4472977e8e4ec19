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

#ifndef JOINTBCI_MODEL_IO_HPP
#define JOINTBCI_MODEL_IO_HPP

#include <string>
#include <vector>

#include "jointbci/bandpass.hpp"
#include "jointbci/spl.hpp"

namespace jointbci {

/// A trained decoder on disk: spatial filters, hyperplane, calibration,
/// the preprocessing it expects, pace metadata and the digest of the data
/// it was trained on. Floats are serialized as shortest round-trip
/// decimals.
struct ModelFile {
  SpatialFilterBank bank;
  DecoderModel model;
  std::vector<std::string> channels;
  BandpassSpec bandpass;
  double mi_start_s = 0.5;
  double mi_end_s = 4.5;
  double slice_window_s = 1.0;
  double slice_hop_s = 1.0;
  double lambda0 = 0.0;
  double dlambda = 0.0;
  int best_iteration = 0;
  double val_accuracy = 0.0;
  std::string training_data_hash;
};

void save_model(const std::string& path, const ModelFile& file);

ModelFile load_model(const std::string& path);

/// Stable digest of the matrices and labels actually fed to a trainer.
std::string training_digest(const std::vector<TrainingSample>& samples);

}  // namespace jointbci

#endif  // JOINTBCI_MODEL_IO_HPP
