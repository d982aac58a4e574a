#pragma once

#include "uavswarm/metrics.hpp"
#include "uavswarm/plan.hpp"
#include "uavswarm/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace uavswarm {

struct SeedRun {
  std::uint64_t seed{0};
  RunMetrics metrics;
  RunLog log;
  std::string error;  // set when the run threw; metrics and log are empty then
};

/// Runs `cfg` once per seed. Runs that throw are kept with their error text.
/// `keep_logs` = false drops the logs after the metrics are taken.
std::vector<SeedRun> run_seeds(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds,
                               bool keep_logs = false);

struct Aggregate {
  int runs{0};
  int failed{0};  // threw
  int incomplete{0};
  int collisions{0};
  double mean_energy_j{0.0};
  double sd_energy_j{0.0};
  double min_u2o_m{0.0};
  double min_u2u_m{0.0};
  double mean_plan_time_s{0.0};
};

Aggregate aggregate(const std::vector<SeedRun>& runs);

/// Seeds 1..n.
std::vector<std::uint64_t> seed_range(int n, std::uint64_t first = 1);

// ---------------------------------------------------------------------------
// Initialization ablation

/// UAV between two static obstacles, heading along the contour through its
/// position: obstacle A 25 m to its right, obstacle B 40 m ahead and 5 m to
/// the left, so the level cost over (omega, kappa) has the contour valley
/// and a second edge.
struct AblationFixture {
  EnvironmentField field;
  UavPose uav;
  GradientGrid grid;
  CostWeights weights;
  LevelPlanConfig level;
  Prediction prediction;
};

AblationFixture make_ablation_fixture(const ScenarioConfig& cfg = {});

struct SearchOutcome {
  double omega{0.0};
  double kappa{0.0};
  double cost{0.0};
};

struct AblationRuns {
  std::vector<SearchOutcome> uniform;
  std::vector<SearchOutcome> predicted;
};

/// `reps` PSO-Level searches with uniform-random initialization and `reps`
/// seeded around the arc fitted to the prediction.
AblationRuns run_ablation(const AblationFixture& fx, int reps, std::uint64_t seed);

/// Exhaustive search of arc_cost on an n x n lattice over the search box.
SearchOutcome level_grid_search(const AblationFixture& fx, int n = 200);

struct AblationSummary {
  double trap_rate{0.0};
  double mean_gap{0.0};
  double mean_distance{0.0};  // to the oracle in the (omega, kappa) plane
};

/// A search is trapped when its cost exceeds the oracle's by more than
/// `rel_tol` times the oracle's magnitude.
AblationSummary summarize(const std::vector<SearchOutcome>& runs, const SearchOutcome& oracle,
                          double rel_tol = 0.05);

// ---------------------------------------------------------------------------
// Baseline

/// Smallest gain in `ladder` (ascending) whose runs on `seeds` all keep
/// min U2O >= d_obs; the last entry if none does.
double calibrate_baseline_gain(ScenarioConfig cfg, const std::vector<std::uint64_t>& seeds,
                               const std::vector<double>& ladder);

}  // namespace uavswarm
