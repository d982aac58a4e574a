#pragma once

#include "uavswarm/scenario.hpp"
#include "uavswarm/sim.hpp"

#include <cstdint>
#include <vector>

namespace uavswarm {

struct RunMetrics {
  double min_u2o{0.0};  // m, 3-D distance to the nearest obstacle mass point
  double min_u2u{0.0};  // m, 3-D
  std::vector<double> energy_per_uav;
  double total_energy{0.0};
  bool collision{false};
  double mean_plan_time_s{0.0};
  double sd_plan_time_s{0.0};
  std::uint64_t seed{0};
  bool complete{false};
};

/// Minimum over all frames of the distance between active UAVs and obstacles.
double min_u2o(const RunLog& log);

/// Minimum over all frames of the 3-D distance between active UAV pairs.
double min_u2u(const RunLog& log);

RunMetrics compute_metrics(const RunLog& log, const ScenarioConfig& cfg,
                           const RunTiming* timing = nullptr);

}  // namespace uavswarm
