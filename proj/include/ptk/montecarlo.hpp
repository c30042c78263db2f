#pragma once

#include <cstdint>

#include "ptk/coeffs.hpp"
#include "ptk/grid.hpp"

namespace ptk {

struct SdeConfig {
  double dt = 1e-5;
  std::int64_t maxSteps = 10000000;
  std::int64_t trajectories = 100000;
  std::uint64_t seed = 1;
  int dim = 3;
};

struct McEstimate {
  double mean = 0.0;
  double standardError = 0.0;
  std::int64_t trajectories = 0;
  double censoredFraction = 0.0;
  bool reliable = true;  // false when censored fraction exceeds 1%
};

/// Continuous region on the torus, independent of any lattice.
struct RegionGeometry {
  enum class Kind { Ball, BallComplement };
  Kind kind = Kind::Ball;
  BallSpec ball;

  bool contains(const Point& p, double period, int dim) const;
};

/// Euler-Maruyama mean exit time from D started at x. Drift component i is
/// b_i + sum_j d_j a_ij (analytic divergence), diffusion sigma with
/// sigma sigma^T = 2a. Trajectory i uses RNG substream i, so the estimate is
/// independent of the thread count.
McEstimate simulateExitTime(const CoefficientField& field, const RegionGeometry& D,
                            const Point& start, const SdeConfig& cfg);

/// Fraction of trajectories entering A before B (the committor h_{A,B} at
/// the start point). Starts inside A or B resolve immediately.
McEstimate simulateHittingProbability(const CoefficientField& field, const RegionGeometry& A,
                                      const RegionGeometry& B, const Point& start,
                                      const SdeConfig& cfg);

}  // namespace ptk
