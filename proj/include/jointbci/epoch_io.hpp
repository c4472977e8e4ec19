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

#ifndef JOINTBCI_EPOCH_IO_HPP
#define JOINTBCI_EPOCH_IO_HPP

#include <string>
#include <vector>

#include "jointbci/epoch.hpp"

namespace jointbci {

// Epoch container: line 1 is a JSON header
//   {"version":1,"fs":..,"channels":[..],"reference":"..","trials":n,
//    "samples_per_trial":t,"labels":[0|1,..]}
// terminated by '\n', followed by trials x channels x samples little-endian
// float32, trial-major then channel-major. Label 0 is Left, 1 is Right.
//
// Values are stored as float32, so doubles are quantized on write; a file
// read back and rewritten is bit-identical.
//
// read_epochs also accepts a small CSV fixture format (see README) when the
// file does not start with '{'.

std::vector<Epoch> read_epochs(const std::string& path);

void write_epochs(const std::string& path, const std::vector<Epoch>& epochs);

/// Stable FNV-1a digest of the container payload for a set of epochs
/// (the float32 sample stream plus labels), as a 16-char hex string.
std::string epochs_digest(const std::vector<Epoch>& epochs);

}  // namespace jointbci

#endif  // JOINTBCI_EPOCH_IO_HPP
