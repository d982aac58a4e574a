#pragma once

#include "uavswarm/geometry.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace uavswarm {

/// Objective value with a constraint-violation magnitude. Any feasible score
/// beats any infeasible one; infeasible scores are ranked by violation.
struct Score {
  double cost{0.0};
  double violation{0.0};

  [[nodiscard]] bool feasible() const { return violation <= 0.0; }
  static Score infeasible(double violation);
};

[[nodiscard]] bool better(const Score& a, const Score& b);

enum class PsoInit { Gaussian, Uniform };

struct PsoConfig {
  int particles{30};
  int iterations{50};
  double inertia{0.7};  // mu0
  double c1{0.5};
  double c2{0.5};
  std::vector<double> lower;
  std::vector<double> upper;
  PsoInit init{PsoInit::Gaussian};
  // Standard deviation of the initial scatter, in units of the bound width.
  double init_sigma{0.05};
  // Positions that replace the first particles after the random draw
  // (clamped to the bounds).
  std::vector<std::vector<double>> anchors;

  void validate(std::size_t dim) const;
};

struct PsoState {
  std::vector<std::vector<double>> position;
  std::vector<std::vector<double>> velocity;
  std::vector<std::vector<double>> personal_best;
  std::vector<Score> personal_score;
  std::vector<double> global_best;
  Score global_score{Score::infeasible(std::numeric_limits<double>::infinity())};
};

using Objective = std::function<Score(std::span<const double>)>;

/// Scatters particles (Gaussian about `center` or uniform in the box),
/// evaluates them and seeds the personal and global bests.
PsoState pso_initialize(const Objective& f, const PsoConfig& cfg, std::span<const double> center,
                        Rng& rng);

/// v <- mu0 v + r1 c1 (p_i - x) + r2 c2 (p_g - x); x <- x + v, with
/// r1, r2 ~ U[0,1] drawn per component. Positions are clamped to the box
/// and the clamped velocity component is zeroed.
void pso_move(PsoState& s, const PsoConfig& cfg, Rng& rng);

/// Evaluates every particle and refreshes personal and global bests.
void pso_evaluate(PsoState& s, const Objective& f);

struct PsoResult {
  std::vector<double> best;
  Score best_score;
  std::vector<Score> trace;  // global best after init and after each iteration
};

PsoResult pso_minimize(const Objective& f, const PsoConfig& cfg, std::span<const double> center,
                       Rng& rng);

}  // namespace uavswarm
