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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "jointbci/config.hpp"
#include "jointbci/epoch_io.hpp"
#include "jointbci/model_io.hpp"
#include "jointbci/paradigm.hpp"
#include "jointbci/report_io.hpp"
#include "jointbci/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jointbci;

namespace {

constexpr const char* kVersion = "jointbci 0.1.0";

// Exit codes: 0 ok, 2 config error, 3 data error, 4 runtime failure.
int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}

// The manifest is written before execution begins, so even a failed run
// leaves its provenance behind; it is the only output carrying a
// timestamp, everything else is byte-reproducible from config + seed.
void write_manifest(const fs::path& out_dir, const std::string& command,
                    const ExperimentConfig& config, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  fs::create_directories(out_dir);
  json j;
  j["command"] = command;
  j["config_hash"] = config_hash(config);
  j["seed"] = seed;
  j["mode"] =
      config.session.mode == LearnMode::Joint ? "joint" : "coadaptive";
  j["version"] = kVersion;
  j["outputs"] = outputs;
  j["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  std::ofstream out(out_dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError((out_dir / "manifest.json").string() + ": cannot write");
  out << j.dump(2) << '\n';
}

std::vector<std::string> planned_outputs(const ExperimentConfig& config) {
  std::vector<std::string> outputs = {"report.json", "report.csv", "trace.csv",
                                      "model.json"};
  if (config.output.export_epochs) outputs.push_back("epochs.bin");
  return outputs;
}

ModelFile to_model_file(const ExperimentConfig& config,
                        const ExperimentArtifacts& artifacts) {
  ModelFile mf;
  mf.bank = artifacts.final_decoder.bank;
  mf.model = artifacts.final_decoder.model;
  mf.channels = config.decoder.channel_subset.empty()
                    ? config.generation.layout.names
                    : config.decoder.channel_subset;
  mf.bandpass = config.decoder.bandpass;
  mf.mi_start_s = config.session.mi_start_s;
  mf.mi_end_s = config.session.mi_end_s;
  mf.slice_window_s = config.session.slice_window_s;
  mf.slice_hop_s = config.session.slice_hop_s;
  mf.lambda0 = config.pace.lambda0;
  mf.dlambda = config.pace.dlambda;
  mf.best_iteration = artifacts.final_decoder.best_iteration;
  mf.val_accuracy = artifacts.final_decoder.val_accuracy;
  mf.training_data_hash = artifacts.training_data_digest;
  return mf;
}

void write_run_outputs(const fs::path& out_dir, const ExperimentConfig& config,
                       const ExperimentReport& report,
                       const ExperimentArtifacts& artifacts,
                       const std::vector<Epoch>* exported) {
  write_report_json((out_dir / "report.json").string(), report);
  write_report_csv((out_dir / "report.csv").string(), report);
  write_trace_csv((out_dir / "trace.csv").string(), report);
  save_model((out_dir / "model.json").string(),
             to_model_file(config, artifacts));
  if (exported && !exported->empty())
    write_epochs((out_dir / "epochs.bin").string(), *exported);
}

void cmd_simulate(const std::string& config_path, std::uint64_t seed,
                  const std::string& out_dir) {
  ExperimentConfig config = load_config(config_path);
  write_manifest(out_dir, "simulate", config, seed, planned_outputs(config));
  std::vector<Epoch> exported;
  ExperimentArtifacts artifacts;
  const ExperimentReport report =
      run_experiment(config, seed, &exported, &artifacts);
  write_run_outputs(out_dir, config, report, artifacts, &exported);
  std::cout << "simulate: " << report.mode << ", seed " << seed
            << ", online accuracy " << format_double(report.online_accuracy)
            << '\n';
}

void cmd_replay(const std::string& epochs_path, const std::string& config_path,
                const std::string& out_dir, std::uint64_t seed,
                bool seed_given) {
  ExperimentConfig config = load_config(config_path);
  config.output.export_epochs = false;  // replay never re-exports its input
  const std::uint64_t effective_seed = seed_given ? seed : config.seed;
  const std::vector<Epoch> epochs = read_epochs(epochs_path);
  write_manifest(out_dir, "replay", config, effective_seed,
                 planned_outputs(config));
  ExperimentArtifacts artifacts;
  const ExperimentReport report =
      run_replay(config, epochs, effective_seed, &artifacts);
  write_run_outputs(out_dir, config, report, artifacts, nullptr);
  std::cout << "replay: " << report.mode << ", " << epochs.size()
            << " trials, offline accuracy "
            << format_double(report.online_accuracy) << '\n';
}

void cmd_train(const std::string& epochs_path, const std::string& config_path,
               const std::string& model_out) {
  ExperimentConfig config = load_config(config_path);
  std::vector<Epoch> epochs = read_epochs(epochs_path);

  BandpassSpec bp = config.decoder.bandpass;
  bp.fs = epochs.front().fs;
  const FilterCoefficients coeffs = design_bandpass(bp);
  std::vector<TrainingSample> samples;
  for (const Epoch& ep : epochs) {
    const Epoch working =
        config.decoder.channel_subset.empty()
            ? ep
            : select_channels(ep, config.decoder.channel_subset);
    samples.push_back(make_training_sample(crop(
        apply_filter(coeffs, working), config.session.mi_start_s,
        config.session.mi_end_s)));
  }

  const TrainOptions opts =
      config.decoder.train_options(config.pace.val_fraction);
  const TrainedDecoder td =
      config.session.mode == LearnMode::Joint
          ? train_joint_decoder(samples, config.pace.lambda0,
                                config.pace.dlambda,
                                derive_seed(config.seed, "train", 1), opts)
          : train_retrain_decoder(samples, opts);

  ExperimentArtifacts artifacts{td, training_digest(samples)};
  ModelFile mf = to_model_file(config, artifacts);
  if (config.decoder.channel_subset.empty())
    mf.channels = epochs.front().layout.names;
  save_model(model_out, mf);
  std::cout << "train: " << samples.size() << " trials, best iteration "
            << td.best_iteration << ", validation accuracy "
            << format_double(td.val_accuracy) << '\n';
}

void cmd_eval(const std::string& epochs_path, const std::string& model_path) {
  const ModelFile mf = load_model(model_path);
  const std::vector<Epoch> epochs = read_epochs(epochs_path);

  BandpassSpec bp = mf.bandpass;
  bp.fs = epochs.front().fs;
  const FilterCoefficients coeffs = design_bandpass(bp);

  int correct = 0;
  int per_class_total[2] = {0, 0}, per_class_hit[2] = {0, 0};
  for (const Epoch& ep : epochs) {
    const Epoch working = ep.layout.names == mf.channels
                              ? ep
                              : select_channels(ep, mf.channels);
    const Epoch filtered = apply_filter(coeffs, working);
    std::vector<Eigen::VectorXd> feats;
    for (const TrialSlice& sl :
         slice_trial(filtered, mf.mi_start_s, mf.mi_end_s, mf.slice_window_s,
                     mf.slice_hop_s))
      feats.push_back(extract_features(mf.bank, sl.data));
    const TrialOutcome outcome =
        score_trial(mf.model, feats, ep.label, 0.7);
    const int cls = ep.label == Label::Left ? 0 : 1;
    ++per_class_total[cls];
    if (outcome.accuracy > 0.5) {
      ++correct;
      ++per_class_hit[cls];
    }
  }
  const auto frac = [](int hit, int total) {
    return total > 0 ? static_cast<double>(hit) / total : 0.0;
  };
  std::cout << "trials: " << epochs.size() << '\n'
            << "trial_accuracy: "
            << format_double(frac(correct, static_cast<int>(epochs.size())))
            << '\n'
            << "left_accuracy: "
            << format_double(frac(per_class_hit[0], per_class_total[0]))
            << '\n'
            << "right_accuracy: "
            << format_double(frac(per_class_hit[1], per_class_total[1]))
            << '\n';
}

void cmd_sweep(const std::string& config_path,
               const std::vector<double>& lambda0_grid,
               const std::vector<double>& dlambda_grid,
               const std::string& out_dir, const std::string& epochs_path,
               std::uint64_t seed, bool seed_given, unsigned jobs) {
  if (lambda0_grid.empty() || dlambda_grid.empty())
    throw ParameterError("sweep: both grids must be non-empty");
  ExperimentConfig base = load_config(config_path);
  base.output.export_epochs = false;
  const std::uint64_t effective_seed = seed_given ? seed : base.seed;
  write_manifest(out_dir, "sweep", base, effective_seed,
                 {"sweep_matrix.csv", "sweep_cells.csv"});

  std::vector<Epoch> epochs;
  if (!epochs_path.empty()) epochs = read_epochs(epochs_path);

  struct Cell {
    double lambda0, dlambda;
    double accuracy = 0.0;
    std::string status = "ok";
  };
  std::vector<Cell> cells;
  for (double l0 : lambda0_grid)
    for (double dl : dlambda_grid) cells.push_back({l0, dl});

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = cursor.fetch_add(1);
      if (idx >= cells.size()) return;
      Cell& cell = cells[idx];
      try {
        ExperimentConfig cfg = base;
        cfg.pace.lambda0 = cell.lambda0;
        cfg.pace.dlambda = cell.dlambda;
        cfg.validate();
        const ExperimentReport report =
            epochs.empty() ? run_experiment(cfg, effective_seed)
                           : run_replay(cfg, epochs, effective_seed);
        cell.accuracy = report.online_accuracy;
      } catch (const std::exception& e) {
        cell.status = e.what();
        cell.accuracy = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(
      jobs ? jobs : std::thread::hardware_concurrency(),
      static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "sweep_matrix.csv", std::ios::trunc);
    out << "lambda0\\dlambda";
    for (double dl : dlambda_grid) out << ',' << format_double(dl);
    out << '\n';
    std::size_t idx = 0;
    for (double l0 : lambda0_grid) {
      out << format_double(l0);
      for (std::size_t k = 0; k < dlambda_grid.size(); ++k)
        out << ',' << format_double(cells[idx + k].accuracy);
      out << '\n';
      idx += dlambda_grid.size();
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "sweep_cells.csv", std::ios::trunc);
    out << "lambda0,dlambda,online_accuracy,status\n";
    for (const Cell& c : cells)
      out << format_double(c.lambda0) << ',' << format_double(c.dlambda)
          << ',' << format_double(c.accuracy) << ",\"" << c.status << "\"\n";
  }
  std::cout << "sweep: " << cells.size() << " cells done\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-machine joint BCI training simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, epochs_path, model_path, out_dir;
  std::uint64_t seed = 0;
  std::vector<double> lambda0_grid, dlambda_grid;
  unsigned jobs = 0;

  auto* sim = app.add_subcommand("simulate", "Run a simulated experiment");
  sim->add_option("--config", config_path, "Experiment config JSON")
      ->required();
  sim->add_option("--seed", seed, "Master seed")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();

  auto* rep = app.add_subcommand("replay", "Pseudo-online replay of epochs");
  rep->add_option("--epochs", epochs_path, "Epoch container file")->required();
  rep->add_option("--config", config_path, "Experiment config JSON")
      ->required();
  rep->add_option("--out", out_dir, "Output directory")->required();
  auto* rep_seed = rep->add_option("--seed", seed, "Master seed override");

  auto* trn = app.add_subcommand("train", "Train a decoder from epochs");
  trn->add_option("--epochs", epochs_path, "Epoch container file")->required();
  trn->add_option("--config", config_path, "Experiment config JSON")
      ->required();
  trn->add_option("--model-out", model_path, "Model file to write")
      ->required();

  auto* evl = app.add_subcommand("eval", "Evaluate a model on epochs");
  evl->add_option("--epochs", epochs_path, "Epoch container file")->required();
  evl->add_option("--model", model_path, "Model file")->required();

  auto* swp = app.add_subcommand("sweep", "Pace-parameter grid sweep");
  swp->add_option("--config", config_path, "Experiment config JSON")
      ->required();
  swp->add_option("--lambda0", lambda0_grid, "Initial recruitment fractions")
      ->required()
      ->delimiter(',');
  swp->add_option("--dlambda", dlambda_grid, "Recruitment increments")
      ->required()
      ->delimiter(',');
  swp->add_option("--out", out_dir, "Output directory")->required();
  swp->add_option("--epochs", epochs_path,
                  "Replay these epochs instead of simulating");
  auto* swp_seed = swp->add_option("--seed", seed, "Master seed override");
  swp->add_option("--jobs", jobs, "Worker threads (default: hardware)");

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed())
    return run_guarded([&] { cmd_simulate(config_path, seed, out_dir); });
  if (rep->parsed())
    return run_guarded([&] {
      cmd_replay(epochs_path, config_path, out_dir, seed,
                 rep_seed->count() > 0);
    });
  if (trn->parsed())
    return run_guarded([&] { cmd_train(epochs_path, config_path, model_path); });
  if (evl->parsed())
    return run_guarded([&] { cmd_eval(epochs_path, model_path); });
  if (swp->parsed())
    return run_guarded([&] {
      cmd_sweep(config_path, lambda0_grid, dlambda_grid, out_dir, epochs_path,
                seed, swp_seed->count() > 0, jobs);
    });
  return 0;
}
