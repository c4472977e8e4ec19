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

#ifndef JOINTBCI_REPORT_IO_HPP
#define JOINTBCI_REPORT_IO_HPP

#include <string>

#include "jointbci/metrics.hpp"

namespace jointbci {

/// Full report as JSON (sessions, trials, trajectories, training traces).
/// Output bytes depend only on the report contents.
void write_report_json(const std::string& path, const ExperimentReport& report);

/// Per-session table:
/// session,mode,accuracy,success_proportion,distance,mu_L,mu_R,
/// weighted_mu_L,weighted_mu_R
void write_report_csv(const std::string& path, const ExperimentReport& report);

/// Per-iteration training trace across all decoder updates:
/// boundary,iteration,capital_lambda,lambda,recruited_count,train_mean_loss,
/// val_accuracy
void write_trace_csv(const std::string& path, const ExperimentReport& report);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

}  // namespace jointbci

#endif  // JOINTBCI_REPORT_IO_HPP
