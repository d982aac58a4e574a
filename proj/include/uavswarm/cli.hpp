#pragma once

#include "uavswarm/experiments.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace uavswarm {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailed = 1;  // a run collided, was incomplete or threw
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitUsage = 3;

/// `n` means seeds 1..n; a comma list gives the seeds themselves. Throws
/// std::invalid_argument on malformed or repeated seeds.
std::vector<std::uint64_t> parse_seeds(const std::string& text);

/// Writes the per-step CSV: step,uav_id,x,y,z,omega,kappa,mode,energy_cum.
void write_trajectory_csv(std::ostream& os, const RunLog& log);

std::string metrics_json(const RunMetrics& m, int indent = 2);

/// Entry point of the `uavswarm` tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uavswarm
