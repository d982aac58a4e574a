#include "uavswarm/metrics.hpp"

#include <cmath>
#include <limits>

namespace uavswarm {

double min_u2o(const RunLog& log) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : log.frames)
    for (std::size_t i = 0; i < f.uavs.size(); ++i) {
      if (!f.active[i]) continue;
      for (const auto& o : f.obstacle_points) best = std::min(best, (f.uavs[i] - o).norm());
    }
  return best;
}

double min_u2u(const RunLog& log) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : log.frames)
    for (std::size_t i = 0; i < f.uavs.size(); ++i) {
      if (!f.active[i]) continue;
      for (std::size_t j = i + 1; j < f.uavs.size(); ++j)
        if (f.active[j]) best = std::min(best, (f.uavs[i] - f.uavs[j]).norm());
    }
  return best;
}

RunMetrics compute_metrics(const RunLog& log, const ScenarioConfig& cfg, const RunTiming* timing) {
  RunMetrics m;
  m.seed = cfg.seed;
  m.complete = log.complete;
  m.min_u2o = min_u2o(log);
  m.min_u2u = min_u2u(log);
  for (const auto& path : log.flown) {
    const double e = trajectory_energy(path, cfg.energy).total();
    m.energy_per_uav.push_back(e);
    m.total_energy += e;
  }
  m.collision = m.min_u2o < cfg.d_obs || m.min_u2u < cfg.d_u2u;
  if (timing && !timing->plan_seconds.empty()) {
    const auto& t = timing->plan_seconds;
    double sum = 0.0, sq = 0.0;
    for (double v : t) sum += v;
    m.mean_plan_time_s = sum / static_cast<double>(t.size());
    for (double v : t) sq += (v - m.mean_plan_time_s) * (v - m.mean_plan_time_s);
    m.sd_plan_time_s = t.size() > 1 ? std::sqrt(sq / static_cast<double>(t.size() - 1)) : 0.0;
  }
  return m;
}

}  // namespace uavswarm
