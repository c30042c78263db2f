#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "ptk/montecarlo.hpp"
#include "ptk/potential.hpp"

using namespace ptk;

namespace {

const Point kCenter{0.5, 0.5, 0.5};

SdeConfig smallConfig() {
  SdeConfig cfg;
  cfg.dt = 1e-4;
  cfg.trajectories = 4000;
  cfg.seed = 4242;
  return cfg;
}

}  // namespace

TEST_CASE("estimates are reproducible for a fixed seed") {
  const CoefficientField field = builtinField("rotation-drift", {{"strength", 2.0}}, 1.0);
  const RegionGeometry ball{RegionGeometry::Kind::Ball, {kCenter, 0.25}};
  SdeConfig cfg = smallConfig();
  cfg.trajectories = 500;
  const McEstimate a = simulateExitTime(field, ball, kCenter, cfg);
  const McEstimate b = simulateExitTime(field, ball, kCenter, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.standardError == b.standardError);

  cfg.seed += 1;
  const McEstimate c = simulateExitTime(field, ball, kCenter, cfg);
  CHECK(a.mean != c.mean);
}

TEST_CASE("config preconditions are enforced") {
  const CoefficientField field = builtinField("laplace", {}, 1.0);
  const RegionGeometry ball{RegionGeometry::Kind::Ball, {kCenter, 0.25}};
  SdeConfig cfg = smallConfig();
  cfg.dt = 0.0;
  CHECK_THROWS_AS(simulateExitTime(field, ball, kCenter, cfg), std::invalid_argument);
  cfg = smallConfig();
  cfg.trajectories = 0;
  CHECK_THROWS_AS(simulateExitTime(field, ball, kCenter, cfg), std::invalid_argument);
  cfg = smallConfig();
  CHECK_THROWS_WITH_AS(simulateExitTime(field, ball, {0.9, 0.5, 0.5}, cfg),
                       "start outside region", std::invalid_argument);
}

TEST_CASE("exit from near the boundary takes only a few steps") {
  const CoefficientField field = builtinField("laplace", {}, 1.0);
  const RegionGeometry ball{RegionGeometry::Kind::Ball, {kCenter, 0.25}};
  SdeConfig cfg = smallConfig();
  cfg.trajectories = 1000;
  Point start = kCenter;
  start[0] += 0.25 - 1e-6;
  const McEstimate est = simulateExitTime(field, ball, start, cfg);
  // Discrete monitoring lets paths slip back inside, so the mean is a handful
  // of steps rather than one (measured ~9.5 steps).
  CHECK(est.mean <= 20.0 * cfg.dt);
}

TEST_CASE("laplace ball exit time matches the PDE oracle") {
  const TorusGrid grid(3, 32, 1.0);
  const CoefficientField field = builtinField("laplace", {}, 1.0);
  const Point c = grid.cellCenter(grid.cellContaining(kCenter));
  const double R = 0.25;

  const GeneratorMatrix M = assembleGenerator(field, grid);
  const RegionMask D = makeBallMask(grid, {c, R});
  const ExitTimeField u = exitTime(killedSubmatrix(M, D), D);
  const double pde = u.values[grid.cellContaining(c)];

  SdeConfig cfg;
  cfg.dt = grid.spacing * grid.spacing / 10.0;
  cfg.trajectories = 20000;
  cfg.seed = 7;
  const RegionGeometry ball{RegionGeometry::Kind::Ball, {c, R}};
  const McEstimate mc = simulateExitTime(field, ball, c, cfg);

  CHECK(mc.reliable);
  CHECK(mc.censoredFraction == 0.0);
  // Discretization and monitoring biases largely cancel at dt = h^2/10; the
  // band covers 3 standard errors plus the measured residual bias gap.
  CHECK(std::fabs(mc.mean - pde) <= 3.0 * mc.standardError + 0.01 * pde);
}

TEST_CASE("hitting probabilities resolve trivial starts and match the committor") {
  const CoefficientField field = builtinField("laplace", {}, 1.0);
  const RegionGeometry A{RegionGeometry::Kind::Ball, {kCenter, 0.15}};
  const RegionGeometry B{RegionGeometry::Kind::BallComplement, {kCenter, 0.35}};
  SdeConfig cfg = smallConfig();

  const McEstimate inside = simulateHittingProbability(field, A, B, kCenter, cfg);
  CHECK(inside.mean == 1.0);
  Point far{0.05, 0.05, 0.05};
  const McEstimate outside = simulateHittingProbability(field, A, B, far, cfg);
  CHECK(outside.mean == 0.0);

  // Mid-radius start: the free-space committor at distance 0.25 is 0.300 and
  // the torus value sits just below it; the band covers MC noise and the
  // O(sqrt(dt)) monitoring bias.
  const Point start{0.75, 0.5, 0.5};
  SdeConfig hitCfg;
  hitCfg.dt = 1e-4;
  hitCfg.trajectories = 10000;
  hitCfg.seed = 11;
  const McEstimate mc = simulateHittingProbability(field, A, B, start, hitCfg);
  CHECK(mc.reliable);
  CHECK(mc.mean > 0.26);
  CHECK(mc.mean < 0.33);
}

TEST_CASE("shear drift exit time matches the PDE oracle") {
  const TorusGrid grid(3, 32, 1.0);
  const CoefficientField field = builtinField("shear-drift", {{"strength", 1.0}}, 1.0);
  const Point c = grid.cellCenter(grid.cellContaining(kCenter));
  const double R = 0.2;

  const GeneratorMatrix M = assembleGenerator(field, grid);
  const RegionMask D = makeBallMask(grid, {c, R});
  const ExitTimeField u = exitTime(killedSubmatrix(M, D), D);
  const double pde = u.values[grid.cellContaining(c)];

  SdeConfig cfg;
  cfg.dt = grid.spacing * grid.spacing / 10.0;
  cfg.trajectories = 20000;
  cfg.seed = 3;
  const RegionGeometry ball{RegionGeometry::Kind::Ball, {c, R}};
  const McEstimate mc = simulateExitTime(field, ball, c, cfg);
  CHECK(mc.reliable);
  CHECK(std::fabs(mc.mean - pde) <= 3.0 * mc.standardError + 0.015 * pde);
}
