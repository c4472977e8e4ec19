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

#include "jointbci/report_io.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

namespace jointbci {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

namespace {

const char* instruction_name(InstructionKind k) {
  switch (k) {
    case InstructionKind::Copy:
      return "copy";
    case InstructionKind::New:
      return "new";
    default:
      return "none";
  }
}

json trace_to_json(const SplIterationTrace& row) {
  return {{"iteration", row.iteration},
          {"capital_lambda", row.capital_lambda},
          {"lambda", row.lambda},
          {"recruited", row.recruited},
          {"train_mean_loss", row.train_mean_loss},
          {"val_accuracy", row.val_accuracy},
          {"class_fallback", row.class_fallback}};
}

}  // namespace

void write_report_json(const std::string& path,
                       const ExperimentReport& report) {
  json j;
  j["mode"] = report.mode;
  j["seed"] = report.seed;
  j["config_hash"] = report.config_hash;
  j["online_accuracy"] = report.online_accuracy;

  j["sessions"] = json::array();
  for (const SessionSummary& s : report.sessions)
    j["sessions"].push_back({{"session", s.session},
                             {"accuracy", s.accuracy},
                             {"success_proportion", s.success_proportion},
                             {"distance", s.distance},
                             {"mu_left", s.mu_left},
                             {"mu_right", s.mu_right},
                             {"sigma_left", s.sigma_left},
                             {"sigma_right", s.sigma_right},
                             {"weighted_mu_left", s.weighted_mu_left},
                             {"weighted_mu_right", s.weighted_mu_right}});

  j["trials"] = json::array();
  for (const TrialRecord& t : report.trials) {
    json row = {{"session", t.session},
                {"index_in_session", t.index_in_session},
                {"global_index", t.global_index},
                {"label", t.label == Label::Left ? 0 : 1},
                {"instruction", instruction_name(t.instruction)},
                {"pair_first", t.pair_first},
                {"subject_mode", t.subject_mode},
                {"accuracy", t.accuracy},
                {"accuracy_slices", t.accuracy_slices},
                {"success", t.success},
                {"mean_decision", t.mean_decision},
                {"mean_p_left", t.mean_p_left},
                {"final_c_left", t.final_c_left},
                {"decoder_session", t.decoder_session},
                {"n_windows", t.n_windows}};
    if (!t.decision_trace.empty()) {
      row["decision_trace"] = t.decision_trace;
      row["window_correct"] = t.window_correct;
    }
    j["trials"].push_back(std::move(row));
  }

  j["trajectory_left"] = report.trajectory_left;
  j["trajectory_right"] = report.trajectory_right;

  j["training_traces"] = json::array();
  for (const auto& trace : report.training_traces) {
    json rows = json::array();
    for (const SplIterationTrace& row : trace) rows.push_back(trace_to_json(row));
    j["training_traces"].push_back(std::move(rows));
  }

  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw DataError(path + ": write failed");
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << "session,mode,accuracy,success_proportion,distance,mu_L,mu_R,"
         "weighted_mu_L,weighted_mu_R\n";
  for (const SessionSummary& s : report.sessions)
    out << s.session << ',' << report.mode << ',' << format_double(s.accuracy)
        << ',' << format_double(s.success_proportion) << ','
        << format_double(s.distance) << ',' << format_double(s.mu_left) << ','
        << format_double(s.mu_right) << ','
        << format_double(s.weighted_mu_left) << ','
        << format_double(s.weighted_mu_right) << '\n';
  if (!out) throw DataError(path + ": write failed");
}

void write_trace_csv(const std::string& path, const ExperimentReport& report) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << "boundary,iteration,capital_lambda,lambda,recruited_count,"
         "train_mean_loss,val_accuracy\n";
  for (std::size_t b = 0; b < report.training_traces.size(); ++b)
    for (const SplIterationTrace& row : report.training_traces[b])
      out << b + 1 << ',' << row.iteration << ','
          << format_double(row.capital_lambda) << ','
          << format_double(row.lambda) << ',' << row.recruited << ','
          << format_double(row.train_mean_loss) << ','
          << format_double(row.val_accuracy) << '\n';
  if (!out) throw DataError(path + ": write failed");
}

}  // namespace jointbci
