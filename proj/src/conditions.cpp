#include "ptk/conditions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ptk {

namespace {

bool finitePositive(double v) { return std::isfinite(v) && v > 0.0; }

void finalize(ConditionReport& rep) {
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const BallResult& a, const BallResult& b) { return a.ball.radius < b.ball.radius; });
  rep.worstUpper = 0.0;
  rep.worstLower = 0.0;
  bool ok = !rep.rows.empty();
  bool anyLower = false;
  for (const BallResult& row : rep.rows) {
    rep.worstUpper = std::max(rep.worstUpper, row.cUpper);
    ok = ok && finitePositive(row.cUpper);
    if (row.lowerDefined) {
      rep.worstLower = std::max(rep.worstLower, row.cLower);
      ok = ok && finitePositive(row.cLower);
      anyLower = true;
    }
  }
  rep.pass = ok && anyLower;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

ConditionReport checkG(const GeneratorMatrix& M, const std::vector<BallSpec>& balls, double K) {
  if (M.grid->dim < 3) throw std::invalid_argument("kernel undefined in this dimension");
  if (K < 1.0) throw std::invalid_argument("K must be >= 1");
  const TorusGrid& grid = *M.grid;
  const double h = grid.spacing;
  const int d = grid.dim;

  ConditionReport rep;
  rep.condition = "G";
  rep.generatorTag = M.fieldFamily;
  rep.parameter = K;
  for (const BallSpec& ball : balls) {
    const RegionMask mask = makeBallMask(grid, ball);
    const GeneratorMatrix killed = killedSubmatrix(M, mask);
    const Index src = grid.cellContaining(ball.center);
    const GreenColumn g = greenColumn(killed, mask, src);
    const Point x0 = grid.cellCenter(src);

    BallResult row;
    row.ball = ball;
    double cUpper = 0.0;
    double cLower = 0.0;
    bool lowerDefined = false;
    for (Index c : mask.cells) {
      if (c == src) continue;
      const double r = torusDistance(grid.cellCenter(c), x0, grid);
      if (r < 2.0 * h) continue;  // lattice singularity exclusion
      const double gv = g.density[static_cast<std::size_t>(c)];
      cUpper = std::max(cUpper, gv * std::pow(r, d - 2));
      if (r < ball.radius / K) {
        cLower = std::max(cLower, gv > 0.0 ? std::pow(r, 2 - d) / gv
                                           : std::numeric_limits<double>::infinity());
        lowerDefined = true;
      }
    }
    row.cUpper = cUpper;
    row.cLower = cLower;
    row.lowerDefined = lowerDefined;
    rep.rows.push_back(row);
  }
  finalize(rep);
  return rep;
}

ConditionReport checkE(const GeneratorMatrix& M, const std::vector<BallSpec>& balls,
                       double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  const TorusGrid& grid = *M.grid;

  ConditionReport rep;
  rep.condition = "E";
  rep.generatorTag = M.fieldFamily;
  rep.parameter = delta;
  for (const BallSpec& ball : balls) {
    const RegionMask mask = makeBallMask(grid, ball);
    const GeneratorMatrix killed = killedSubmatrix(M, mask);
    const ExitTimeField u = exitTime(killed, mask);
    const double R2 = ball.radius * ball.radius;

    BallResult row;
    row.ball = ball;
    double cUpper = 0.0;
    double cLower = 0.0;
    for (Index c : mask.cells) {
      const double v = u.values[static_cast<std::size_t>(c)];
      cUpper = std::max(cUpper, v / R2);
      const double r = torusDistance(grid.cellCenter(c), ball.center, grid);
      if (r < delta * ball.radius)
        cLower = std::max(cLower, v > 0.0 ? R2 / v : std::numeric_limits<double>::infinity());
    }
    row.cUpper = cUpper;
    row.cLower = cLower;
    rep.rows.push_back(row);
  }
  finalize(rep);
  return rep;
}

ConditionReport checkC(const GeneratorMatrix& M, const InvariantDensity& density,
                       const std::vector<BallSpec>& balls, double K) {
  if (!(K > 1.0)) throw std::invalid_argument("K must be > 1");
  const TorusGrid& grid = *M.grid;

  ConditionReport rep;
  rep.condition = "C";
  rep.generatorTag = M.fieldFamily;
  rep.parameter = K;
  for (const BallSpec& ball : balls) {
    const RegionMask A = makeBallMask(grid, ball);
    BallSpec outer = ball;
    outer.radius = K * ball.radius;
    const RegionMask KB = makeBallMask(grid, outer);  // throws "wrapping ball"
    const RegionMask B = complementMask(KB);

    const CapacityResult cap = capacity(M, density, A, B);
    double piBall = 0.0;
    for (Index c : A.cells) piBall += density.pi[static_cast<std::size_t>(c)];
    const double rho = cap.energy * ball.radius * ball.radius / piBall;

    BallResult row;
    row.ball = ball;
    row.cUpper = rho;
    row.cLower = 1.0 / rho;
    rep.rows.push_back(row);
  }
  finalize(rep);
  return rep;
}

ConditionReport checkHarnack(const GeneratorMatrix& M, const std::vector<BallSpec>& balls,
                             double delta, int trials, std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const TorusGrid& grid = *M.grid;

  ConditionReport rep;
  rep.condition = "Har";
  rep.generatorTag = M.fieldFamily;
  rep.parameter = delta;
  rep.seed = seed;
  for (const BallSpec& ball : balls) {
    const RegionMask D = makeBallMask(grid, ball);
    std::vector<Index> core;  // cells of the shrunken ball deltaB
    for (Index c : D.cells)
      if (torusDistance(grid.cellCenter(c), ball.center, grid) < delta * ball.radius)
        core.push_back(c);

    // Seed per ball from the radius bits so the scan is order independent.
    std::mt19937_64 rng(splitmix64(seed + std::bit_cast<std::uint64_t>(ball.radius)));
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    double worstRatio = 1.0;
    for (int t = 0; t < trials; ++t) {
      std::vector<double> data(static_cast<std::size_t>(grid.cellCount()), 0.0);
      for (Index c : D.outerBoundary)
        data[static_cast<std::size_t>(c)] = (t == 0) ? 0.5 : unif(rng);
      const std::vector<double> u = solveDirichlet(M, D, data);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (Index c : core) {
        lo = std::min(lo, u[static_cast<std::size_t>(c)]);
        hi = std::max(hi, u[static_cast<std::size_t>(c)]);
      }
      worstRatio = std::max(worstRatio,
                            lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    }
    BallResult row;
    row.ball = ball;
    row.cUpper = worstRatio;
    row.cLower = 1.0;  // Harnack is one-sided; kept for a uniform report shape
    rep.rows.push_back(row);
  }
  finalize(rep);
  return rep;
}

IdentityReport checkSandwich(const GeneratorMatrix& M, const InvariantDensity& density,
                             const RegionMask& A, const RegionMask& B) {
  const GeneratorMatrix dual = discreteAdjoint(M, density);
  const RegionMask D = complementMask(B);
  const GeneratorMatrix killedDual = killedSubmatrix(dual, D);
  const ExitTimeField dualExit = exitTime(killedDual, D, "dual");

  double infBoundaryA = std::numeric_limits<double>::infinity();
  for (Index c : A.innerBoundary)
    infBoundaryA = std::min(infBoundaryA, dualExit.values[static_cast<std::size_t>(c)]);
  double supD = 0.0;
  for (Index c : D.cells) supD = std::max(supD, dualExit.values[static_cast<std::size_t>(c)]);
  double muA = 0.0;
  for (Index c : A.cells) muA += density.pi[static_cast<std::size_t>(c)];
  double muD = 0.0;
  for (Index c : D.cells) muD += density.pi[static_cast<std::size_t>(c)];

  const double cap = capacity(M, density, A, B).energy;
  const double invCap = 1.0 / cap;
  const double lower = muA * infBoundaryA * infBoundaryA / (muD * muD * supD);
  const double upper = supD / muA;

  IdentityReport rep;
  rep.name = "sandwich";
  rep.details["lower_bound"] = lower;
  rep.details["inverse_capacity"] = invCap;
  rep.details["upper_bound"] = upper;
  rep.details["mu_A"] = muA;
  rep.details["mu_D"] = muD;
  rep.details["inf_boundary_exit"] = infBoundaryA;
  rep.details["sup_exit"] = supD;
  rep.maxResidual = std::max(0.0, std::max(lower - invCap, invCap - upper));
  rep.pass = lower <= invCap && invCap <= upper;
  return rep;
}

EquivalenceReport equivalenceSuite(const CoefficientField& field, const TorusGrid& grid,
                                   const std::vector<BallSpec>& balls, double K,
                                   double stabilityFactor) {
  if (grid.dim < 3) throw std::invalid_argument("kernel undefined in this dimension");
  const TorusGrid fine(grid.dim, 2 * grid.cellsPerSide, grid.sideLength);

  auto scan = [&](const TorusGrid& g, ConditionReport& outC, ConditionReport& outG,
                  ConditionReport& outE) {
    const GeneratorMatrix M = assembleGenerator(field, g, Scheme::Upwind);
    const InvariantDensity density = invariantDensity(M);
    outC = checkC(M, density, balls, K);
    outG = checkG(M, balls, K);
    const GeneratorMatrix dual = discreteAdjoint(M, density);
    outE = checkE(dual, balls, 1.0 / K);
  };

  EquivalenceReport rep;
  scan(grid, rep.coarseC, rep.coarseG, rep.coarseE);
  scan(fine, rep.fineC, rep.fineG, rep.fineE);

  double factor = 1.0;
  auto track = [&factor](double coarse, double fineV) {
    const double r = coarse / fineV;
    factor = std::max(factor, std::max(r, 1.0 / r));
  };
  track(rep.coarseC.worstUpper, rep.fineC.worstUpper);
  track(rep.coarseC.worstLower, rep.fineC.worstLower);
  track(rep.coarseG.worstUpper, rep.fineG.worstUpper);
  track(rep.coarseG.worstLower, rep.fineG.worstLower);
  track(rep.coarseE.worstUpper, rep.fineE.worstUpper);
  track(rep.coarseE.worstLower, rep.fineE.worstLower);
  rep.stabilityFactor = factor;
  rep.verdict = rep.coarseC.pass && rep.coarseG.pass && rep.coarseE.pass && rep.fineC.pass &&
                rep.fineG.pass && rep.fineE.pass && std::isfinite(factor) &&
                factor <= stabilityFactor;
  return rep;
}

}  // namespace ptk
