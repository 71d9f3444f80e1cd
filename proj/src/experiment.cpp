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


#include "p2v/experiment.hpp"

#include "p2v/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>

namespace p2v
{

namespace
{

template <typename T>
void sort_unique(std::vector<T> & v)
{
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string hex64(std::uint64_t v)
{
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string cell_stem(const AlgorithmConfig & c)
{
  return "alg" + std::to_string(c.algorithm) + "_thad" + csv::format_double(c.th_ad);
}

std::ofstream open_out(const std::filesystem::path & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError(path.string() + ": cannot open for writing");
  }
  return out;
}

}  // namespace

void RunConfig::normalize()
{
  if (synthetic.has_value() == (scenario.has_value() || trace.has_value())) {
    throw ConfigError("config: give either \"synthetic\" or both \"scenario\" and \"trace\"");
  }
  if (!synthetic && !(scenario && trace)) {
    throw ConfigError("config: \"scenario\" and \"trace\" must be given together");
  }
  if (algorithms.empty()) {
    throw ConfigError("config: \"algorithms\" needs at least one entry");
  }
  if (th_ad.empty()) {
    throw ConfigError("config: \"th_ad\" needs at least one entry");
  }
  if (seeds.empty()) {
    throw ConfigError("config: \"seeds\" needs at least one entry");
  }
  if (!(decel.reaction_time >= 0.0) || !(decel.ped_speed > 0.0)) {
    throw ConfigError("config: reaction_time must be >= 0 and ped_max_speed > 0");
  }
  sort_unique(algorithms);
  sort_unique(th_ad);
  sort_unique(seeds);
  const double step = synthetic ? synthetic->step : trace_step;
  channel.validate(step);
  for (const AlgorithmConfig & c : cells()) {
    c.validate(channel.period);
  }
  if (synthetic) {
    synthetic->validate();
  }
}

std::vector<AlgorithmConfig> RunConfig::cells() const
{
  std::vector<AlgorithmConfig> out;
  for (int a : algorithms) {
    for (double th : th_ad) {
      out.push_back({a, th, th_ps, expiry});
    }
  }
  return out;
}

RunConfig run_config_from_json(const nlohmann::json & j, const std::filesystem::path & base_dir)
{
  static const std::set<std::string> known{
    "scenario", "trace", "trace_step", "synthetic", "algorithms", "th_ad", "th_ps", "expiry",
    "channel", "seeds", "reaction_time", "ped_max_speed", "out", "parallel_seeds"};
  if (!j.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  for (const auto & [key, value] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("config: unknown field \"" + key + "\"");
    }
  }
  auto resolve = [&](const std::string & p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  RunConfig cfg;
  std::string field;
  try {
    field = "scenario";
    if (j.contains(field)) {
      cfg.scenario = resolve(j.at(field).get<std::string>());
    }
    field = "trace";
    if (j.contains(field)) {
      cfg.trace = resolve(j.at(field).get<std::string>());
    }
    field = "trace_step";
    cfg.trace_step = j.value(field, cfg.trace_step);
    field = "synthetic";
    if (j.contains(field)) {
      cfg.synthetic = synthetic_params_from_json(j.at(field));
    }
    field = "algorithms";
    if (j.contains(field)) {
      cfg.algorithms = j.at(field).get<std::vector<int>>();
    }
    field = "th_ad";
    if (j.contains(field)) {
      const auto & v = j.at(field);
      cfg.th_ad = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
    }
    field = "th_ps";
    cfg.th_ps = j.value(field, cfg.th_ps);
    field = "expiry";
    cfg.expiry = j.value(field, cfg.expiry);
    field = "channel";
    if (j.contains(field)) {
      const auto & c = j.at(field);
      cfg.channel.period = c.value("period", cfg.channel.period);
      cfg.channel.range = c.value("range", cfg.channel.range);
      cfg.channel.loss_prob = c.value("loss_prob", cfg.channel.loss_prob);
    }
    field = "seeds";
    if (j.contains(field)) {
      const auto & v = j.at(field);
      cfg.seeds = v.is_array() ? v.get<std::vector<std::uint64_t>>()
                               : std::vector<std::uint64_t>{v.get<std::uint64_t>()};
    }
    field = "reaction_time";
    cfg.decel.reaction_time = j.value(field, cfg.decel.reaction_time);
    field = "ped_max_speed";
    cfg.decel.ped_speed = j.value(field, cfg.decel.ped_speed);
    field = "out";
    if (j.contains(field)) {
      cfg.out = resolve(j.at(field).get<std::string>());
    }
    field = "parallel_seeds";
    cfg.parallel_seeds = j.value(field, cfg.parallel_seeds);
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError("config: field \"" + field + "\": " + e.what());
  } catch (const ConfigError & e) {
    throw ConfigError("config: field \"" + field + "\": " + e.what());
  }
  cfg.normalize();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string() + ": cannot open config file");
  }
  try {
    return run_config_from_json(nlohmann::json::parse(in), path.parent_path());
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ConfigError & e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const RunConfig & cfg)
{
  nlohmann::json j;
  if (cfg.synthetic) {
    j["synthetic"] = to_json(*cfg.synthetic);
  } else {
    j["scenario"] = cfg.scenario->string();
    j["trace"] = cfg.trace->string();
    j["trace_step"] = cfg.trace_step;
  }
  j["algorithms"] = cfg.algorithms;
  j["th_ad"] = cfg.th_ad;
  j["th_ps"] = cfg.th_ps;
  j["expiry"] = cfg.expiry;
  j["channel"] = {
    {"period", cfg.channel.period},
    {"range", cfg.channel.range},
    {"loss_prob", cfg.channel.loss_prob}};
  j["seeds"] = cfg.seeds;
  j["reaction_time"] = cfg.decel.reaction_time;
  j["ped_max_speed"] = cfg.decel.ped_speed;
  return j;
}

ExperimentResult run_experiment(RunConfig cfg)
{
  cfg.normalize();
  const auto cells = cfg.cells();

  // A recorded world is loaded once and shared read-only by all seeds.
  std::optional<ScenarioMap> shared_map;
  std::optional<TraceSequence> shared_trace;
  if (!cfg.synthetic) {
    shared_map = load_scenario(*cfg.scenario);
    shared_trace = load_trace(*cfg.trace, cfg.trace_step);
  }

  ExperimentResult out;
  out.config = cfg;
  out.runs.resize(cfg.seeds.size());
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  const auto n = static_cast<std::int64_t>(cfg.seeds.size());

#pragma omp parallel for schedule(dynamic, 1) if (cfg.parallel_seeds && n > 1)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    try {
      SeedRun & run = out.runs[idx];
      run.seed = cfg.seeds[idx];
      std::optional<ScenarioMap> own_map;
      std::optional<TraceSequence> own_trace;
      if (cfg.synthetic) {
        SyntheticParams p = *cfg.synthetic;
        p.seed = run.seed;
        ScenarioMap m;
        own_trace = generate_synthetic(p, m);
        own_map = std::move(m);
      }
      const ScenarioMap & map = own_map ? *own_map : *shared_map;
      const TraceSequence & trace = own_trace ? *own_trace : *shared_trace;
      run.step = trace.step();
      run.vehicles = trace.count(EntityKind::vehicle);
      run.pedestrians = trace.count(EntityKind::pedestrian);
      run.result = simulate(trace, map, cfg.channel, cells, run.seed);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        run.metrics.push_back(run_metrics(
          run.result.logs[c], run.result.danger_events, trace, cells[c], cfg.decel));
      }
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto & e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return out;
}

nlohmann::json experiment_report(const ExperimentResult & r)
{
  const auto cells = r.config.cells();
  nlohmann::json report;
  report["config"] = to_json(r.config);

  report["runs"] = nlohmann::json::array();
  for (const SeedRun & run : r.runs) {
    nlohmann::json jr{
      {"seed", run.seed},
      {"config_hash", hex64(run.result.config_hash)},
      {"vehicles", run.vehicles},
      {"pedestrians", run.pedestrians},
      {"beacons_sent", run.result.channel.beacons_sent},
      {"deliveries", run.result.channel.deliveries},
      {"danger_events", run.result.danger_events.size()},
      {"t_begin", run.result.t_begin},
      {"t_end", run.result.t_end},
    };
    jr["cells"] = nlohmann::json::array();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      jr["cells"].push_back({
        {"algorithm", cells[c].algorithm},
        {"th_ad", cells[c].th_ad},
        {"metrics", to_json(run.metrics[c])},
      });
    }
    report["runs"].push_back(std::move(jr));
  }

  report["aggregates"] = nlohmann::json::array();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<RunMetrics> per_seed;
    for (const SeedRun & run : r.runs) {
      per_seed.push_back(run.metrics[c]);
    }
    nlohmann::json cell{{"algorithm", cells[c].algorithm}, {"th_ad", cells[c].th_ad},
                        {"n", per_seed.size()}};
    if (per_seed.size() >= 2) {
      cell["ci_available"] = true;
      cell["quantities"] = to_json(aggregate(per_seed));
    } else {
      cell["ci_available"] = false;
      nlohmann::json q = nlohmann::json::object();
      for (const auto & [name, v] : scalar_quantities(per_seed.front())) {
        q[name] = {{"mean", v}, {"ci95_halfwidth", nullptr}, {"n", 1}};
      }
      cell["quantities"] = std::move(q);
    }
    report["aggregates"].push_back(std::move(cell));
  }
  return report;
}

void write_experiment(const ExperimentResult & r, const std::filesystem::path & out_dir)
{
  std::filesystem::create_directories(out_dir);
  const auto cells = r.config.cells();
  for (const SeedRun & run : r.runs) {
    const auto dir = out_dir / ("seed_" + std::to_string(run.seed));
    std::filesystem::create_directories(dir);
    {
      auto out = open_out(dir / "danger_events.csv");
      write_danger_events(run.result.danger_events, out);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      {
        auto out = open_out(dir / ("alerts_" + cell_stem(cells[c]) + ".csv"));
        write_alert_log(run.result.logs[c], out);
      }
      auto out = open_out(dir / ("decel_" + cell_stem(cells[c]) + ".csv"));
      out << "decel_mps2\n";
      for (double d : run.metrics[c].decel_per_alert) {
        out << csv::format_double(d) << '\n';
      }
    }
  }
  auto out = open_out(out_dir / "report.json");
  out << experiment_report(r).dump(2) << '\n';
}

}  // namespace p2v
