#include "uavswarm/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavswarm {

Score Score::infeasible(double violation) {
  return {std::numeric_limits<double>::infinity(), violation > 0.0 ? violation : 1e-300};
}

bool better(const Score& a, const Score& b) {
  if (a.feasible() != b.feasible()) return a.feasible();
  if (!a.feasible()) return a.violation < b.violation;
  return a.cost < b.cost;
}

void PsoConfig::validate(std::size_t dim) const {
  if (particles < 2) throw std::invalid_argument("PSO needs at least 2 particles");
  if (iterations < 0) throw std::invalid_argument("PSO iteration count must be >= 0");
  if (lower.size() != dim || upper.size() != dim)
    throw std::invalid_argument("PSO bounds do not match the dimension");
  for (std::size_t d = 0; d < dim; ++d)
    if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || lower[d] > upper[d])
      throw std::invalid_argument("PSO bounds must be finite and ordered");
}

PsoState pso_initialize(const Objective& f, const PsoConfig& cfg, std::span<const double> center,
                        Rng& rng) {
  const std::size_t dim = cfg.lower.size();
  cfg.validate(dim);
  if (cfg.init == PsoInit::Gaussian && center.size() != dim)
    throw std::invalid_argument("PSO init center does not match the dimension");

  PsoState s;
  const auto n = static_cast<std::size_t>(cfg.particles);
  s.position.assign(n, std::vector<double>(dim));
  s.velocity.assign(n, std::vector<double>(dim, 0.0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double width = cfg.upper[d] - cfg.lower[d];
      double x = cfg.init == PsoInit::Gaussian
                     ? center[d] + cfg.init_sigma * width * normal(rng)
                     : cfg.lower[d] + width * unit(rng);
      s.position[p][d] = std::clamp(x, cfg.lower[d], cfg.upper[d]);
    }
  }
  for (std::size_t a = 0; a < std::min(n, cfg.anchors.size()); ++a) {
    if (cfg.anchors[a].size() != dim) throw std::invalid_argument("PSO anchor does not match the dimension");
    for (std::size_t d = 0; d < dim; ++d)
      s.position[a][d] = std::clamp(cfg.anchors[a][d], cfg.lower[d], cfg.upper[d]);
  }
  s.personal_best = s.position;
  s.personal_score.assign(n, Score::infeasible(std::numeric_limits<double>::infinity()));
  s.global_best = s.position.front();
  pso_evaluate(s, f);
  return s;
}

void pso_evaluate(PsoState& s, const Objective& f) {
  for (std::size_t p = 0; p < s.position.size(); ++p) {
    const Score sc = f(s.position[p]);
    if (better(sc, s.personal_score[p])) {
      s.personal_score[p] = sc;
      s.personal_best[p] = s.position[p];
    }
    if (better(sc, s.global_score)) {
      s.global_score = sc;
      s.global_best = s.position[p];
    }
  }
}

void pso_move(PsoState& s, const PsoConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t dim = cfg.lower.size();
  for (std::size_t p = 0; p < s.position.size(); ++p) {
    auto& x = s.position[p];
    auto& v = s.velocity[p];
    for (std::size_t d = 0; d < dim; ++d) {
      const double r1 = unit(rng), r2 = unit(rng);
      v[d] = cfg.inertia * v[d] + r1 * cfg.c1 * (s.personal_best[p][d] - x[d]) +
             r2 * cfg.c2 * (s.global_best[d] - x[d]);
      x[d] += v[d];
      if (x[d] < cfg.lower[d] || x[d] > cfg.upper[d]) {
        x[d] = std::clamp(x[d], cfg.lower[d], cfg.upper[d]);
        v[d] = 0.0;
      }
    }
  }
}

PsoResult pso_minimize(const Objective& f, const PsoConfig& cfg, std::span<const double> center,
                       Rng& rng) {
  PsoState s = pso_initialize(f, cfg, center, rng);
  PsoResult out;
  out.trace.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  out.trace.push_back(s.global_score);
  for (int it = 0; it < cfg.iterations; ++it) {
    pso_move(s, cfg, rng);
    pso_evaluate(s, f);
    out.trace.push_back(s.global_score);
  }
  out.best = s.global_best;
  out.best_score = s.global_score;
  return out;
}

}  // namespace uavswarm
