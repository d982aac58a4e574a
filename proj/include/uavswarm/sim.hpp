#pragma once

#include "uavswarm/plan.hpp"
#include "uavswarm/scenario.hpp"

#include <string>
#include <vector>

namespace uavswarm {

enum class EventKind {
  Trigger,
  Conflict,
  AltitudeChange,
  EmergencyAltitude,
  PredictionFailed,
  PlannerFallback,
  Resume,
  AltitudeReturn,
  Finished,
};
std::string to_string(EventKind k);

struct Event {
  int step{0};
  int uav{-1};  // -1 for swarm-wide events
  EventKind kind{EventKind::Trigger};
  std::string detail;
  bool operator==(const Event&) const = default;
};

/// State of one UAV after a step, plus the arc it flew during the step.
struct UavRecord {
  int step{0};
  int uav{0};
  Point3 position{0.0, 0.0, 0.0};
  double omega{0.0};
  double kappa{0.0};
  Mode mode{Mode::Cruise};
  double delta_alt{0.0};
  double energy_cum{0.0};
  bool operator==(const UavRecord&) const = default;
};

/// Positions at one sub-step sample; used for the safety metrics.
struct Frame {
  double time{0.0};
  std::vector<Point3> uavs;
  std::vector<bool> active;
  std::vector<Point3> obstacle_points;  // mass points of every obstacle
  bool operator==(const Frame&) const = default;
};

struct RunLog {
  int uav_count{0};
  std::vector<UavRecord> records;  // step-major, uav-minor
  std::vector<std::vector<Point2>> obstacle_centers;  // per step
  std::vector<Event> events;
  std::vector<Frame> frames;
  std::vector<std::vector<Point3>> flown;  // per UAV, clipped at the right edge
  int steps{0};
  bool complete{false};
  bool operator==(const RunLog&) const = default;
};

/// Wall-clock planning time of every Avoid step, kept outside RunLog so logs
/// stay comparable across runs.
struct RunTiming {
  std::vector<double> plan_seconds;
};

/// Sub-samples per planning step for frames and flown polylines.
inline constexpr int kSubSamples = 10;

/// Log holding the spawn state (step 0 records, start of every flown path).
RunLog begin_log(const WorldState& world);

/// One pass of the framework loop: sense, trigger, plan (main or baseline),
/// execute, resume, advance obstacles, log.
void step(WorldState& world, const ScenarioConfig& cfg, RunLog& log, RunTiming* timing = nullptr);

/// Runs until every UAV has crossed the right edge of the arena or
/// cfg.max_steps is reached (log.complete == false).
RunLog run_scenario(const ScenarioConfig& cfg, RunTiming* timing = nullptr);

/// Virtual-force heading for each UAV: goal direction plus the scaled
/// negative gradient of the raw obstacle field, normalized.
std::vector<double> baseline_virtual_force(const WorldState& world, const ScenarioConfig& cfg);

}  // namespace uavswarm
