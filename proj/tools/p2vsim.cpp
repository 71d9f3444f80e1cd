// Copyright 2026 The p2vsim Authors
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


// p2vsim: pedestrian-to-vehicle alert simulator front end.

#include "p2v/calibration.hpp"
#include "p2v/csv.hpp"
#include "p2v/experiment.hpp"
#include "p2v/synthetic.hpp"
#include "p2v/tracktests.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>

namespace
{

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int cmd_run(
  const std::string & config_path, const std::optional<std::string> & out_dir,
  const std::vector<std::uint64_t> & seeds, const std::vector<int> & algorithms,
  const std::vector<double> & th_ad, const std::optional<double> & th_ps,
  const std::optional<double> & loss_prob)
{
  p2v::RunConfig cfg = p2v::load_run_config(config_path);
  if (out_dir) {
    cfg.out = *out_dir;
  }
  if (!seeds.empty()) {
    cfg.seeds = seeds;
  }
  if (!algorithms.empty()) {
    cfg.algorithms = algorithms;
  }
  if (!th_ad.empty()) {
    cfg.th_ad = th_ad;
  }
  if (th_ps) {
    cfg.th_ps = *th_ps;
  }
  if (loss_prob) {
    cfg.channel.loss_prob = *loss_prob;
  }
  cfg.normalize();
  const p2v::ExperimentResult result = p2v::run_experiment(cfg);
  p2v::write_experiment(result, cfg.out);
  std::cout << "wrote " << (cfg.out / "report.json").string() << " (" << result.runs.size()
            << " seeds, " << cfg.cells().size() << " cells)\n";
  return 0;
}

int cmd_replicate_tracktests()
{
  bool all = true;
  std::printf("%-6s %-10s %-12s %-12s %-32s %s\n", "config", "ped_to_x_m", "expected",
    "activated", "active_s (alg0..alg3)", "result");
  auto set_str = [](const std::set<int> & s) {
    std::string out = "{";
    for (int a : s) {
      out += (out.size() > 1 ? "," : "") + std::to_string(a);
    }
    return out + "}";
  };
  for (const p2v::TrackTestOutcome & o : p2v::replicate_track_tests()) {
    std::string times;
    for (const auto & [alg, t] : o.active_time) {
      times += (times.empty() ? "" : " ") + p2v::csv::format_fixed(t, 1);
    }
    std::printf("%-6d %-10s %-12s %-12s %-32s %s\n", o.test.configuration,
      p2v::csv::format_double(o.test.ped_to_crossing).c_str(), set_str(o.test.expected).c_str(),
      set_str(o.activated).c_str(), times.c_str(), o.pass ? "PASS" : "FAIL");
    all = all && o.pass;
  }
  return all ? 0 : kExitFailure;
}

int cmd_calibrate(const p2v::CalibrationInputs & in)
{
  in.validate();
  std::printf("th_ad_min_m %.2f\n", p2v::min_alert_distance(in));
  std::printf("th_ps_min_m %.2f\n", p2v::min_pedestrian_safety_threshold(in));
  return 0;
}

int cmd_gen(const std::string & params_path, std::uint64_t seed, const std::string & out_dir)
{
  p2v::SyntheticParams params = p2v::load_synthetic_params(params_path);
  params.seed = seed;
  p2v::ScenarioMap map;
  const p2v::TraceSequence trace = p2v::generate_synthetic(params, map);
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  p2v::save_scenario(map, out / "scenario.json");
  p2v::save_trace(trace, out / "trace.csv");
  std::cout << "wrote " << (out / "scenario.json").string() << " and "
            << (out / "trace.csv").string() << " (" << trace.count(p2v::EntityKind::vehicle)
            << " vehicles, " << trace.count(p2v::EntityKind::pedestrian) << " pedestrians)\n";
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Pedestrian-to-vehicle alert simulator"};
  app.require_subcommand(1);

  auto * run = app.add_subcommand("run", "Run an experiment grid from a JSON config");
  std::string config_path;
  std::optional<std::string> out_dir;
  std::vector<std::uint64_t> seeds;
  std::vector<int> algorithms;
  std::vector<double> th_ad;
  std::optional<double> th_ps;
  std::optional<double> loss_prob;
  run->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seeds", seeds, "Seeds (override)");
  run->add_option("--algorithms", algorithms, "Algorithms (override)");
  run->add_option("--th-ad", th_ad, "Alert distance thresholds in m (override)");
  run->add_option("--th-ps", th_ps, "Pedestrian safety threshold in m (override)");
  run->add_option("--loss-prob", loss_prob, "Beacon loss probability (override)");

  auto * track = app.add_subcommand("replicate-tracktests", "Replay the four test-track configurations");

  auto * calib = app.add_subcommand("calibrate", "Minimum safe thresholds");
  p2v::CalibrationInputs in;
  calib->add_option("--reaction", in.reaction_time, "Driver reaction time (s)")->capture_default_str();
  calib->add_option("--speed", in.vehicle_speed, "Vehicle speed (m/s)")->capture_default_str();
  calib->add_option("--ped-speed", in.pedestrian_speed, "Pedestrian speed (m/s)")->capture_default_str();
  calib->add_option("--decel", in.deceleration, "Target deceleration (m/s^2)")->capture_default_str();

  auto * gen = app.add_subcommand("gen", "Generate a synthetic scenario and trace");
  std::string params_path;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--params", params_path, "Synthetic parameters (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_seed, "Generator seed")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return cmd_run(config_path, out_dir, seeds, algorithms, th_ad, th_ps, loss_prob);
    }
    if (*track) {
      return cmd_replicate_tracktests();
    }
    if (*calib) {
      return cmd_calibrate(in);
    }
    if (*gen) {
      return cmd_gen(params_path, gen_seed, gen_out);
    }
  } catch (const std::exception & e) {
    std::cerr << "p2vsim: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
