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

#include "jointbci/epoch_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace jointbci {

static_assert(std::endian::native == std::endian::little,
              "epoch container assumes a little-endian host");

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) fields.push_back(item);
  return fields;
}

std::vector<Epoch> read_epochs_csv(std::istream& in, const std::string& path) {
  std::string line;
  double fs = 0.0;
  ChannelLayout layout;
  std::vector<Epoch> epochs;

  auto bad = [&](const std::string& what) {
    return DataError(path + ": " + what);
  };
  auto parse_number = [&](const std::string& field) {
    try {
      return std::stod(field);
    } catch (const std::exception&) {
      throw bad("not a number: '" + field + "'");
    }
  };

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (fields[0] == "fs") {
      if (fields.size() != 2) throw bad("fs line needs one value");
      fs = parse_number(fields[1]);
    } else if (fields[0] == "reference") {
      if (fields.size() != 2) throw bad("reference line needs one value");
      layout.reference = fields[1];
    } else if (fields[0] == "channels") {
      layout.names.assign(fields.begin() + 1, fields.end());
    } else if (fields[0] == "label") {
      if (fields.size() != 2) throw bad("label line needs one value");
      const double lab = parse_number(fields[1]);
      if (lab != 0.0 && lab != 1.0) throw bad("label must be 0 or 1");
      if (layout.names.empty() || fs <= 0.0)
        throw bad("fs/channels must precede trials");
      Epoch ep;
      ep.fs = fs;
      ep.layout = layout;
      ep.label = lab == 0.0 ? Label::Left : Label::Right;
      std::vector<std::vector<double>> rows;
      for (std::size_t ch = 0; ch < layout.names.size(); ++ch) {
        if (!std::getline(in, line))
          throw bad("unexpected end of file inside a trial");
        auto vals = split_csv_line(line);
        std::vector<double> row;
        row.reserve(vals.size());
        for (const auto& v : vals) row.push_back(parse_number(v));
        if (!rows.empty() && row.size() != rows.front().size())
          throw bad("ragged channel rows inside a trial");
        rows.push_back(std::move(row));
      }
      ep.data.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
          ep.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              rows[r][c];
      ep.validate();
      epochs.push_back(std::move(ep));
    } else {
      throw bad("unrecognized CSV row: " + fields[0]);
    }
  }
  if (epochs.empty()) throw bad("no trials found");
  return epochs;
}

}  // namespace

std::vector<Epoch> read_epochs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open");

  const int first = in.peek();
  if (first != '{') return read_epochs_csv(in, path);

  std::string header_line;
  if (!std::getline(in, header_line))
    throw DataError(path + ": missing header line");

  json header;
  try {
    header = json::parse(header_line);
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed header: " + e.what());
  }

  auto require = [&](const char* key) -> const json& {
    if (!header.contains(key))
      throw DataError(path + ": header missing field '" + key + "'");
    return header.at(key);
  };

  if (require("version").get<int>() != 1)
    throw DataError(path + ": unsupported container version");

  ChannelLayout layout;
  layout.names = require("channels").get<std::vector<std::string>>();
  layout.reference = require("reference").get<std::string>();
  const double fs = require("fs").get<double>();
  const auto trials = require("trials").get<std::int64_t>();
  const auto samples = require("samples_per_trial").get<std::int64_t>();
  const auto labels = require("labels").get<std::vector<int>>();

  if (trials < 0 || samples < 1)
    throw DataError(path + ": invalid trials/samples_per_trial");
  if (trials == 0) throw DataError(path + ": container holds zero trials");
  if (static_cast<std::int64_t>(labels.size()) != trials)
    throw DataError(path + ": labels length does not match trials");
  try {
    layout.validate();
  } catch (const Error& e) {
    throw DataError(path + ": " + e.what());
  }

  const std::int64_t channels = static_cast<std::int64_t>(layout.names.size());
  const std::int64_t expected_floats = trials * channels * samples;
  const std::int64_t header_bytes = static_cast<std::int64_t>(header_line.size()) + 1;

  std::vector<float> payload(static_cast<std::size_t>(expected_floats));
  in.read(reinterpret_cast<char*>(payload.data()),
          expected_floats * static_cast<std::int64_t>(sizeof(float)));
  const std::int64_t got = in.gcount();
  if (got != expected_floats * static_cast<std::int64_t>(sizeof(float))) {
    std::ostringstream msg;
    msg << path << ": truncated payload at byte offset " << header_bytes + got
        << ": expected " << expected_floats * sizeof(float)
        << " payload bytes, got " << got;
    throw DataError(msg.str());
  }
  // A well-formed file ends exactly at the payload. Extra bytes mean the
  // header shape disagrees with the payload (e.g. wrong channel count).
  in.peek();
  if (!in.eof()) {
    std::ostringstream msg;
    msg << path << ": payload shape mismatch: trailing bytes after "
        << expected_floats * sizeof(float) << " expected payload bytes"
        << " (header says " << trials << " trials x " << channels
        << " channels x " << samples << " samples)";
    throw DataError(msg.str());
  }

  std::vector<Epoch> epochs;
  epochs.reserve(static_cast<std::size_t>(trials));
  std::size_t pos = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Epoch ep;
    ep.fs = fs;
    ep.layout = layout;
    if (labels[static_cast<std::size_t>(t)] != 0 &&
        labels[static_cast<std::size_t>(t)] != 1)
      throw DataError(path + ": labels must be 0 or 1");
    ep.label = labels[static_cast<std::size_t>(t)] == 0 ? Label::Left
                                                        : Label::Right;
    ep.data.resize(channels, samples);
    for (std::int64_t ch = 0; ch < channels; ++ch)
      for (std::int64_t s = 0; s < samples; ++s) {
        const float v = payload[pos++];
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << path << ": non-finite sample at byte offset "
              << header_bytes +
                     static_cast<std::int64_t>(pos - 1) *
                         static_cast<std::int64_t>(sizeof(float))
              << " (trial " << t << ", channel " << ch << ", sample " << s
              << ")";
          throw DataError(msg.str());
        }
        ep.data(ch, s) = static_cast<double>(v);
      }
    epochs.push_back(std::move(ep));
  }
  return epochs;
}

void write_epochs(const std::string& path, const std::vector<Epoch>& epochs) {
  if (epochs.empty()) throw ParameterError("write_epochs: empty epoch list");
  const Epoch& first = epochs.front();
  first.validate();
  for (const Epoch& ep : epochs) {
    ep.validate();
    if (ep.layout.names != first.layout.names ||
        ep.layout.reference != first.layout.reference ||
        ep.fs != first.fs || ep.samples() != first.samples())
      throw ParameterError(
          "write_epochs: epochs must share layout, fs and sample count");
  }

  json header;
  header["version"] = 1;
  header["fs"] = first.fs;
  header["channels"] = first.layout.names;
  header["reference"] = first.layout.reference;
  header["trials"] = epochs.size();
  header["samples_per_trial"] = first.samples();
  std::vector<int> labels;
  labels.reserve(epochs.size());
  for (const Epoch& ep : epochs)
    labels.push_back(ep.label == Label::Left ? 0 : 1);
  header["labels"] = labels;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << header.dump() << '\n';

  std::vector<float> row(static_cast<std::size_t>(first.samples()));
  for (const Epoch& ep : epochs)
    for (Eigen::Index ch = 0; ch < ep.channels(); ++ch) {
      for (Eigen::Index s = 0; s < ep.samples(); ++s)
        row[static_cast<std::size_t>(s)] = static_cast<float>(ep.data(ch, s));
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
  if (!out) throw DataError(path + ": write failed");
}

std::string epochs_digest(const std::vector<Epoch>& epochs) {
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const Epoch& ep : epochs) {
    const int lab = ep.label == Label::Left ? 0 : 1;
    feed(&lab, sizeof(lab));
    for (Eigen::Index ch = 0; ch < ep.channels(); ++ch)
      for (Eigen::Index s = 0; s < ep.samples(); ++s) {
        const float v = static_cast<float>(ep.data(ch, s));
        feed(&v, sizeof(v));
      }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace jointbci
