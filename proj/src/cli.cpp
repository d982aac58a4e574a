#include "uavswarm/cli.hpp"

#include "uavswarm/config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace uavswarm {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  auto number = [](const std::string& s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
      throw std::invalid_argument("bad seed '" + s + "'");
    return v;
  };
  if (text.find(',') == std::string::npos) {
    const std::uint64_t n = number(text);
    if (n == 0) throw std::invalid_argument("seed count must be >= 1");
    return seed_range(static_cast<int>(n));
  }
  std::vector<std::uint64_t> seeds;
  std::set<std::uint64_t> seen;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::uint64_t v = number(item);
    if (!seen.insert(v).second) throw std::invalid_argument("repeated seed " + item);
    seeds.push_back(v);
  }
  return seeds;
}

void write_trajectory_csv(std::ostream& os, const RunLog& log) {
  os << "step,uav_id,x,y,z,omega,kappa,mode,energy_cum\n";
  char buf[256];
  for (const auto& r : log.records) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%s,%.6f\n", r.step, r.uav,
                  r.position.x(), r.position.y(), r.position.z(), r.omega, r.kappa,
                  to_string(r.mode).c_str(), r.energy_cum);
    os << buf;
  }
}

std::string metrics_json(const RunMetrics& m, int indent) {
  json j;
  j["min_u2o_m"] = m.min_u2o;
  j["min_u2u_m"] = m.min_u2u;
  j["energy_per_uav_j"] = m.energy_per_uav;
  j["total_energy_j"] = m.total_energy;
  j["collision"] = m.collision;
  j["mean_plan_time_s"] = m.mean_plan_time_s;
  j["sd_plan_time_s"] = m.sd_plan_time_s;
  j["complete"] = m.complete;
  j["seed"] = m.seed;
  return j.dump(indent);
}

namespace {

json aggregate_json(const Aggregate& a) {
  json j;
  j["runs"] = a.runs;
  j["failed"] = a.failed;
  j["incomplete"] = a.incomplete;
  j["collisions"] = a.collisions;
  j["mean_total_energy_j"] = a.mean_energy_j;
  j["sd_total_energy_j"] = a.sd_energy_j;
  j["min_u2o_m"] = a.min_u2o_m;
  j["min_u2u_m"] = a.min_u2u_m;
  j["mean_plan_time_s"] = a.mean_plan_time_s;
  return j;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

void write_layer(const fs::path& p, const GridSpec& spec, std::span<const double> values) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  write_layer_csv(f, spec, values);
}

EnvironmentField world_field(const WorldState& w, const ScenarioConfig& cfg) {
  std::vector<Point2> positions;
  for (const auto& u : w.uavs)
    if (!u.finished) positions.push_back(level(u.position));
  if (positions.empty())
    for (const auto& u : w.uavs) positions.push_back(level(u.position));
  EnvironmentField f;
  f.swarm = {conceptual_center(positions, w.swarm_target, cfg.step_len()).center,
             cfg.swarm_speed, cfg.swarm_influence};
  f.d_safe = cfg.d_safe;
  for (const auto& o : w.obstacles) {
    bool seen = false;
    for (const auto& u : w.uavs)
      seen = seen || (level(u.position) - o.center).norm() <= cfg.sensing_range;
    if (seen) f.obstacles.push_back(o);
  }
  return f;
}

// Intensity, binary and edge layers seen from `p0`, over the whole arena.
void dump_field_layers(const EnvironmentField& field, const Point2& p0, const ScenarioConfig& cfg,
                       const fs::path& dir, const std::string& prefix) {
  const Bounds2 arena{Point2(0.0, 0.0), Point2(cfg.arena_width, cfg.arena_height)};
  const IntensitySamples samples = sample_intensity(field, arena, cfg.cell);
  const GradientGrid grid = binarize_and_smooth(samples, environment_intensity(p0, field));
  write_layer(dir / (prefix + "intensity.csv"), samples.spec, samples.phi);
  write_layer(dir / (prefix + "binary.csv"), grid.spec, grid.binary);
  write_layer(dir / (prefix + "edge.csv"), grid.spec, grid.edge);
}

// Layers for every UAV at the first step that enters avoidance.
void dump_trigger_grids(const ScenarioConfig& cfg, const fs::path& dir) {
  WorldState w = spawn_world(cfg);
  RunLog scratch = begin_log(w);
  while (!w.avoiding && w.step < cfg.max_steps) {
    bool all_done = true;
    for (const auto& u : w.uavs) all_done = all_done && u.finished;
    if (all_done) return;
    step(w, cfg, scratch);
  }
  if (!w.avoiding) return;
  const EnvironmentField field = world_field(w, cfg);
  for (const auto& u : w.uavs)
    if (!u.finished)
      dump_field_layers(field, level(u.position), cfg,
                        dir, "grid_uav" + std::to_string(u.id) + "_");
}

struct Common {
  std::string config;
  std::string seeds{"1"};
  std::string out{"out"};
  std::string planner;
};

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg;
  if (!c.config.empty()) load_config_file(c.config, cfg);
  apply_env_overrides(cfg);
  if (!c.planner.empty()) set_config_value(cfg, "run.planner", c.planner);
  cfg.validate();
  return cfg;
}

int cmd_run(const Common& c, bool dump_grids, std::ostream& out, std::ostream& err) {
  const ScenarioConfig cfg = load(c);
  const auto seeds = parse_seeds(c.seeds);
  const fs::path dir(c.out);
  fs::create_directories(dir);

  std::vector<SeedRun> runs;
  json errors = json::array();
  bool ok = true;
  for (auto s : seeds) {
    auto r = run_seeds(cfg, {s}, true).front();
    const std::string tag = "seed" + std::to_string(s);
    if (!r.error.empty()) {
      errors.push_back({{"seed", s}, {"error", r.error}});
      err << "seed " << s << ": " << r.error << '\n';
      ok = false;
    } else {
      std::ofstream csv(dir / ("trajectory_" + tag + ".csv"));
      write_trajectory_csv(csv, r.log);
      write_file(dir / ("metrics_" + tag + ".json"), metrics_json(r.metrics) + "\n");
      ok = ok && r.metrics.complete && !r.metrics.collision;
      out << "seed " << s << ": energy " << std::fixed << std::setprecision(1)
          << r.metrics.total_energy << " J, min U2O " << std::setprecision(2) << r.metrics.min_u2o
          << " m, min U2U " << r.metrics.min_u2u << " m"
          << (r.metrics.collision ? ", COLLISION" : "")
          << (r.metrics.complete ? "" : ", INCOMPLETE") << '\n';
      if (dump_grids) {
        ScenarioConfig one = cfg;
        one.seed = s;
        const fs::path gdir = dir / ("grids_" + tag);
        fs::create_directories(gdir);
        dump_trigger_grids(one, gdir);
      }
      r.log = {};
    }
    runs.push_back(std::move(r));
  }
  json agg = aggregate_json(aggregate(runs));
  agg["planner"] = to_string(cfg.planner);
  agg["seeds"] = seeds;
  agg["errors"] = errors;
  write_file(dir / "aggregate.json", agg.dump(2) + "\n");
  return ok ? kExitOk : kExitRunFailed;
}

int cmd_compare(const Common& c, std::ostream& out) {
  ScenarioConfig cfg = load(c);
  const auto seeds = parse_seeds(c.seeds);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  cfg.planner = PlannerKind::Main;
  const auto main_runs = run_seeds(cfg, seeds);
  cfg.planner = PlannerKind::Baseline;
  const auto base_runs = run_seeds(cfg, seeds);

  std::ofstream csv(dir / "compare.csv");
  csv << "seed,main_energy_j,baseline_energy_j,main_min_u2o_m,baseline_min_u2o_m,"
         "main_min_u2u_m,baseline_min_u2u_m,main_collision,baseline_collision\n";
  bool ok = true;
  char buf[320];
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& a = main_runs[i];
    const auto& b = base_runs[i];
    ok = ok && a.error.empty() && b.error.empty() && a.metrics.complete && b.metrics.complete;
    std::snprintf(buf, sizeof buf, "%llu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%d\n",
                  static_cast<unsigned long long>(seeds[i]), a.metrics.total_energy,
                  b.metrics.total_energy, a.metrics.min_u2o, b.metrics.min_u2o, a.metrics.min_u2u,
                  b.metrics.min_u2u, a.metrics.collision ? 1 : 0, b.metrics.collision ? 1 : 0);
    csv << buf;
  }
  const Aggregate am = aggregate(main_runs);
  const Aggregate ab = aggregate(base_runs);
  json j;
  j["main"] = aggregate_json(am);
  j["baseline"] = aggregate_json(ab);
  j["energy_ratio"] = ab.mean_energy_j > 0.0 ? am.mean_energy_j / ab.mean_energy_j : 0.0;
  j["seeds"] = seeds;
  write_file(dir / "compare.json", j.dump(2) + "\n");

  std::snprintf(buf, sizeof buf,
                "%-9s %12s %10s %10s %10s\n%-9s %12.1f %10.2f %10.2f %10d\n"
                "%-9s %12.1f %10.2f %10.2f %10d\nenergy ratio main/baseline: %.3f\n",
                "planner", "energy_J", "minU2O_m", "minU2U_m", "collide", "main", am.mean_energy_j,
                am.min_u2o_m, am.min_u2u_m, am.collisions, "baseline", ab.mean_energy_j,
                ab.min_u2o_m, ab.min_u2u_m, ab.collisions, j["energy_ratio"].get<double>());
  out << buf;
  return ok ? kExitOk : kExitRunFailed;
}

int cmd_ablate(const Common& c, int reps, std::ostream& out) {
  const ScenarioConfig cfg = load(c);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  const AblationFixture fx = make_ablation_fixture(cfg);
  const SearchOutcome oracle = level_grid_search(fx);
  const AblationRuns runs = run_ablation(fx, reps, cfg.seed);
  const AblationSummary u = summarize(runs.uniform, oracle);
  const AblationSummary p = summarize(runs.predicted, oracle);

  std::ofstream all(dir / "ablation_runs.csv");
  all << "init,rep,omega,kappa,cost\n";
  char buf[256];
  for (int mode = 0; mode < 2; ++mode) {
    const auto& v = mode == 0 ? runs.uniform : runs.predicted;
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.6f,%.6f\n", mode == 0 ? "uniform" : "prediction",
                    i, v[i].omega, v[i].kappa, v[i].cost);
      all << buf;
    }
  }
  std::ofstream table(dir / "ablation.csv");
  table << "init,trap_rate,mean_cost_gap,mean_distance\n";
  std::snprintf(buf, sizeof buf, "uniform,%.6f,%.6f,%.6f\nprediction,%.6f,%.6f,%.6f\n",
                u.trap_rate, u.mean_gap, u.mean_distance, p.trap_rate, p.mean_gap, p.mean_distance);
  table << buf;

  std::snprintf(buf, sizeof buf,
                "oracle cost %.6f at omega %.4f kappa %.5f\n%-11s %9s %13s %13s\n"
                "%-11s %9.3f %13.6f %13.6f\n%-11s %9.3f %13.6f %13.6f\n",
                oracle.cost, oracle.omega, oracle.kappa, "init", "trap", "mean_gap", "mean_dist",
                "uniform", u.trap_rate, u.mean_gap, u.mean_distance, "prediction", p.trap_rate,
                p.mean_gap, p.mean_distance);
  out << buf;
  return kExitOk;
}

int cmd_dump_field(const Common& c, const std::vector<double>& p0, int steps, std::ostream& out) {
  const ScenarioConfig cfg = load(c);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  WorldState w = spawn_world(cfg);
  RunLog scratch = begin_log(w);
  for (int i = 0; i < steps; ++i) step(w, cfg, scratch);
  const Point2 at = p0.size() == 2 ? Point2(p0[0], p0[1]) : level(w.uavs.front().position);
  dump_field_layers(world_field(w, cfg), at, cfg, dir, "");
  out << "wrote intensity.csv, binary.csv, edge.csv to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"UAV swarm collision-avoidance simulator"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool seeds) {
    sub->add_option("--config", common.config, "key = value config file");
    if (seeds) sub->add_option("--seeds", common.seeds, "seed count n (1..n) or comma list");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--planner", common.planner, "main or baseline")
        ->check(CLI::IsMember({"main", "baseline"}));
  };

  bool dump_grids = false;
  auto* run = app.add_subcommand("run", "run scenarios and write CSV/JSON per seed");
  add_common(run, true);
  run->add_flag("--dump-grids", dump_grids, "write field grids at the first avoidance step");

  auto* compare = app.add_subcommand("compare", "main vs baseline on the same seeds");
  add_common(compare, true);

  int reps = 500;
  auto* ablate = app.add_subcommand("ablate", "PSO-Level initialization ablation");
  add_common(ablate, false);
  ablate->add_option("--reps", reps, "searches per initialization")->check(CLI::PositiveNumber);

  std::vector<double> p0;
  int field_steps = 0;
  auto* dump = app.add_subcommand("dump-field", "write intensity, binary and edge grids");
  add_common(dump, false);
  dump->add_option("--p0", p0, "reference point x y (default: first UAV)")->expected(2);
  dump->add_option("--step", field_steps, "simulation steps before dumping")
      ->check(CLI::NonNegativeNumber);

  auto* show = app.add_subcommand("print-config", "print the effective configuration");
  add_common(show, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(common, dump_grids, out, err);
    if (*compare) return cmd_compare(common, out);
    if (*ablate) return cmd_ablate(common, reps, out);
    if (*show) {
      write_config(out, load(common));
      return kExitOk;
    }
    return cmd_dump_field(common, p0, field_steps, out);
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRunFailed;
  }
}

}  // namespace uavswarm
