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

#include "jointbci/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace jointbci {

using nlohmann::json;

void save_model(const std::string& path, const ModelFile& file) {
  json j;
  j["format"] = "jointbci-model";
  j["version"] = 1;

  std::vector<std::vector<double>> filters;
  for (Eigen::Index r = 0; r < file.bank.filters.rows(); ++r)
    filters.emplace_back(file.bank.filters.row(r).begin(),
                         file.bank.filters.row(r).end());
  j["csp"] = {{"filters", filters},
              {"eigenvalues",
               std::vector<double>(file.bank.eigenvalues.begin(),
                                   file.bank.eigenvalues.end())},
              {"n_pairs", file.bank.n_pairs}};
  j["svm"] = {{"w", std::vector<double>(file.model.w.begin(),
                                        file.model.w.end())},
              {"b", file.model.b},
              {"C", file.model.C},
              {"calib_a", file.model.calib_a},
              {"calib_b", file.model.calib_b}};
  j["channels"] = file.channels;
  j["preprocess"] = {{"low_hz", file.bandpass.low_hz},
                     {"high_hz", file.bandpass.high_hz},
                     {"filter_order", file.bandpass.order},
                     {"mi_start_s", file.mi_start_s},
                     {"mi_end_s", file.mi_end_s},
                     {"slice_window_s", file.slice_window_s},
                     {"slice_hop_s", file.slice_hop_s}};
  j["pace"] = {{"lambda0", file.lambda0},
               {"dlambda", file.dlambda},
               {"best_iteration", file.best_iteration},
               {"val_accuracy", file.val_accuracy}};
  j["training_data_hash"] = file.training_data_hash;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw DataError(path + ": write failed");
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed model file: " + e.what());
  }

  try {
    if (j.at("format").get<std::string>() != "jointbci-model")
      throw DataError(path + ": not a jointbci model file");

    ModelFile file;
    const auto filters =
        j.at("csp").at("filters").get<std::vector<std::vector<double>>>();
    const auto evals =
        j.at("csp").at("eigenvalues").get<std::vector<double>>();
    file.bank.n_pairs = j.at("csp").at("n_pairs").get<int>();
    if (filters.empty() || filters.size() != evals.size())
      throw DataError(path + ": inconsistent filter bank");
    file.bank.filters.resize(static_cast<Eigen::Index>(filters.size()),
                             static_cast<Eigen::Index>(filters[0].size()));
    for (std::size_t r = 0; r < filters.size(); ++r) {
      if (filters[r].size() != filters[0].size())
        throw DataError(path + ": ragged filter rows");
      for (std::size_t c = 0; c < filters[r].size(); ++c)
        file.bank.filters(static_cast<Eigen::Index>(r),
                          static_cast<Eigen::Index>(c)) = filters[r][c];
    }
    file.bank.eigenvalues =
        Eigen::Map<const Eigen::VectorXd>(evals.data(),
                                          static_cast<Eigen::Index>(evals.size()));

    const auto w = j.at("svm").at("w").get<std::vector<double>>();
    file.model.w = Eigen::Map<const Eigen::VectorXd>(
        w.data(), static_cast<Eigen::Index>(w.size()));
    file.model.b = j.at("svm").at("b").get<double>();
    file.model.C = j.at("svm").at("C").get<double>();
    file.model.calib_a = j.at("svm").at("calib_a").get<double>();
    file.model.calib_b = j.at("svm").at("calib_b").get<double>();

    file.channels = j.at("channels").get<std::vector<std::string>>();
    const json& pre = j.at("preprocess");
    file.bandpass.low_hz = pre.at("low_hz").get<double>();
    file.bandpass.high_hz = pre.at("high_hz").get<double>();
    file.bandpass.order = pre.at("filter_order").get<int>();
    file.mi_start_s = pre.at("mi_start_s").get<double>();
    file.mi_end_s = pre.at("mi_end_s").get<double>();
    file.slice_window_s = pre.at("slice_window_s").get<double>();
    file.slice_hop_s = pre.at("slice_hop_s").get<double>();
    file.lambda0 = j.at("pace").at("lambda0").get<double>();
    file.dlambda = j.at("pace").at("dlambda").get<double>();
    file.best_iteration = j.at("pace").at("best_iteration").get<int>();
    file.val_accuracy = j.at("pace").at("val_accuracy").get<double>();
    file.training_data_hash = j.at("training_data_hash").get<std::string>();
    return file;
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed model file: " + e.what());
  }
}

std::string training_digest(const std::vector<TrainingSample>& samples) {
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const TrainingSample& s : samples) {
    const int lab = s.label == Label::Left ? 0 : 1;
    feed(&lab, sizeof(lab));
    feed(s.moments.scatter.data(),
         static_cast<std::size_t>(s.moments.scatter.size()) * sizeof(double));
    feed(s.moments.sum.data(),
         static_cast<std::size_t>(s.moments.sum.size()) * sizeof(double));
    feed(&s.moments.n_samples, sizeof(s.moments.n_samples));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace jointbci
