/// Command-line driver: configuration, dispatch, report emission.
/// Exit codes: 0 success, 1 numerical/verification failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptk/conditions.hpp"
#include "ptk/io.hpp"
#include "ptk/montecarlo.hpp"

namespace {

using ptk::Json;

struct RunConfig {
  int dim = 3;
  int n = 32;
  double length = 1.0;
  std::string family = "laplace";
  std::vector<std::string> fieldParams;  // key=value pairs
  std::string scheme = "upwind";
  double tol = 1e-10;
  std::vector<double> radii{0.1, 0.15, 0.2};
  double K = 2.0;
  double delta = 0.5;
  int trials = 100;
  double mcDt = 0.0;  // 0 = auto (h^2/10)
  long long mcPaths = 100000;
  std::uint64_t seed = 1;
  std::string outdir = "out";
  std::string condition = "G";
  bool useDual = false;
};

std::map<std::string, double> parseParams(const std::vector<std::string>& kv) {
  std::map<std::string, double> out;
  for (const std::string& item : kv) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--param expects key=value");
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

ptk::Scheme parseScheme(const std::string& s) {
  if (s == "upwind") return ptk::Scheme::Upwind;
  if (s == "central") return ptk::Scheme::Central;
  throw CLI::ValidationError("scheme must be upwind or central");
}

std::string resolveOutdir(const RunConfig& cfg) {
  const char* env = std::getenv("PTK_OUTDIR");
  std::string dir = env && *env ? env : cfg.outdir;
  std::filesystem::create_directories(dir);
  return dir;
}

ptk::Point snapToCell(const ptk::TorusGrid& grid, ptk::Point p) {
  return grid.cellCenter(grid.cellContaining(p));
}

ptk::Point torusCenter(const ptk::TorusGrid& grid) {
  ptk::Point c{0.0, 0.0, 0.0};
  for (int k = 0; k < grid.dim; ++k) c[k] = 0.5 * grid.sideLength;
  return snapToCell(grid, c);
}

/// Default scan family: every radius at the torus center plus 4 offset centers.
std::vector<ptk::BallSpec> ballFamily(const ptk::TorusGrid& grid,
                                      const std::vector<double>& radii) {
  const double l = grid.sideLength;
  std::vector<ptk::Point> centers{torusCenter(grid)};
  const double off = 0.25 * l;
  for (const ptk::Point d : {ptk::Point{off, 0, 0}, ptk::Point{-off, 0, 0},
                             ptk::Point{0, off, 0}, ptk::Point{0, -off, 0}}) {
    ptk::Point c = torusCenter(grid);
    for (int k = 0; k < 3; ++k) c[k] += d[k];
    centers.push_back(snapToCell(grid, c));
  }
  std::vector<ptk::BallSpec> balls;
  for (double r : radii)
    for (const ptk::Point& c : centers) balls.push_back({c, r});
  return balls;
}

Json configJson(const RunConfig& cfg) {
  return Json{{"dim", cfg.dim},
              {"n", cfg.n},
              {"length", cfg.length},
              {"family", cfg.family},
              {"params", cfg.fieldParams},
              {"scheme", cfg.scheme},
              {"tol", cfg.tol},
              {"radii", cfg.radii},
              {"K", cfg.K},
              {"delta", cfg.delta},
              {"trials", cfg.trials},
              {"mc_dt", cfg.mcDt},
              {"mc_paths", cfg.mcPaths},
              {"seed", cfg.seed},
              {"condition", cfg.condition},
              {"dual", cfg.useDual}};
}

struct Setup {
  ptk::TorusGrid grid;
  ptk::CoefficientField field;
  ptk::GeneratorMatrix M;
};

Setup makeSetup(const RunConfig& cfg) {
  Setup s{ptk::TorusGrid(cfg.dim, cfg.n, cfg.length),
          ptk::builtinField(cfg.family, parseParams(cfg.fieldParams), cfg.length),
          {}};
  s.M = ptk::assembleGenerator(s.field, s.grid, parseScheme(cfg.scheme));
  return s;
}

int runInvariant(const RunConfig& cfg) {
  const Setup s = makeSetup(cfg);
  const ptk::InvariantDensity density = ptk::invariantDensity(s.M, cfg.tol);
  const std::string dir = resolveOutdir(cfg);
  ptk::writeFieldCsv(dir + "/invariant.csv", s.grid, density.mu);
  double lo = density.pi[0], hi = density.pi[0];
  for (double v : density.pi) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Json body{{"config", configJson(cfg)},
            {"stationarity_residual", density.stationarityResidual},
            {"power_iterations", density.powerIterations},
            {"pi_min", lo},
            {"pi_max", hi}};
  ptk::writeReport(dir + "/invariant.json", body);
  std::cout << "invariant density: residual " << density.stationarityResidual << ", pi in ["
            << lo << ", " << hi << "]\n";
  return 0;
}

int runExitTime(const RunConfig& cfg) {
  const Setup s = makeSetup(cfg);
  const ptk::BallSpec ball{torusCenter(s.grid), cfg.radii.back()};
  const ptk::RegionMask D = ptk::makeBallMask(s.grid, ball);
  const ptk::GeneratorMatrix killed = ptk::killedSubmatrix(s.M, D);
  const ptk::ExitTimeField u = ptk::exitTime(killed, D);
  const std::string dir = resolveOutdir(cfg);
  ptk::writeFieldCsv(dir + "/exit_time.csv", s.grid, u.values);
  ptk::writeSliceGnuplot(dir + "/exit_time_slice.dat", s.grid, u.values,
                         s.grid.dim - 1, s.grid.cellsPerSide / 2);
  double maxU = 0.0;
  for (double v : u.values) maxU = std::max(maxU, v);
  Json body{{"config", configJson(cfg)},
            {"ball_radius", ball.radius},
            {"max_exit_time", maxU},
            {"solve", ptk::toJson(u.solve)}};
  ptk::writeReport(dir + "/exit_time.json", body);
  std::cout << "max exit time " << maxU << " on ball R=" << ball.radius << "\n";
  return 0;
}

int runGreen(const RunConfig& cfg) {
  const Setup s = makeSetup(cfg);
  const ptk::BallSpec ball{torusCenter(s.grid), cfg.radii.back()};
  const ptk::RegionMask D = ptk::makeBallMask(s.grid, ball);
  const ptk::GeneratorMatrix killed = ptk::killedSubmatrix(s.M, D);
  const ptk::GreenColumn g = ptk::greenColumn(killed, D, s.grid.cellContaining(ball.center));
  const std::string dir = resolveOutdir(cfg);
  ptk::writeFieldCsv(dir + "/green.csv", s.grid, g.density);
  ptk::writeSliceGnuplot(dir + "/green_slice.dat", s.grid, g.density, s.grid.dim - 1,
                         s.grid.cellsPerSide / 2);
  Json body{{"config", configJson(cfg)},
            {"ball_radius", ball.radius},
            {"source_cell", g.source},
            {"solve", ptk::toJson(g.solve)}};
  ptk::writeReport(dir + "/green.json", body);
  std::cout << "green column from cell " << g.source << " written\n";
  return 0;
}

int runCapacity(const RunConfig& cfg) {
  const Setup s = makeSetup(cfg);
  const ptk::InvariantDensity density = ptk::invariantDensity(s.M, cfg.tol);
  const ptk::Point c = torusCenter(s.grid);
  const ptk::RegionMask A = ptk::makeBallMask(s.grid, {c, cfg.radii.front()});
  const ptk::RegionMask KB = ptk::makeBallMask(s.grid, {c, cfg.K * cfg.radii.front()});
  const ptk::RegionMask B = ptk::complementMask(KB);
  const ptk::HarmonicExtension h = ptk::harmonicExtension(s.M, A, B);
  const ptk::CapacityResult cap = ptk::capacity(s.M, density, h);
  const ptk::EquilibriumMeasure nu = ptk::equilibriumMeasure(s.M, density, h);
  const std::string dir = resolveOutdir(cfg);
  Json body{{"config", configJson(cfg)},
            {"inner_radius", cfg.radii.front()},
            {"outer_radius", cfg.K * cfg.radii.front()},
            {"capacity", ptk::toJson(cap)},
            {"equilibrium_mass", nu.mass}};
  ptk::writeReport(dir + "/capacity.json", body);
  std::cout << "capacity energy " << cap.energy << ", flux " << cap.flux
            << ", equilibrium mass " << nu.mass << "\n";
  return 0;
}

int runHarnack(const RunConfig& cfg) {
  const Setup s = makeSetup(cfg);
  const std::vector<ptk::BallSpec> balls = ballFamily(s.grid, cfg.radii);
  const ptk::ConditionReport primal =
      ptk::checkHarnack(s.M, balls, cfg.delta, cfg.trials, cfg.seed);
  const ptk::InvariantDensity density = ptk::invariantDensity(s.M, cfg.tol);
  const ptk::GeneratorMatrix dual = ptk::discreteAdjoint(s.M, density);
  const ptk::ConditionReport dualRep =
      ptk::checkHarnack(dual, balls, cfg.delta, cfg.trials, cfg.seed);
  const std::string dir = resolveOutdir(cfg);
  Json body{{"config", configJson(cfg)},
            {"primal", ptk::toJson(primal)},
            {"dual", ptk::toJson(dualRep)}};
  ptk::writeReport(dir + "/harnack.json", body);
  std::cout << "harnack worst ratio: primal " << primal.worstUpper << ", dual "
            << dualRep.worstUpper << "\n";
  return primal.pass && dualRep.pass ? 0 : 1;
}

int runCheck(const RunConfig& cfg) {
  const Setup s = makeSetup(cfg);
  const std::vector<ptk::BallSpec> balls = ballFamily(s.grid, cfg.radii);
  ptk::ConditionReport rep;
  if (cfg.condition == "Har") {
    rep = ptk::checkHarnack(s.M, balls, cfg.delta, cfg.trials, cfg.seed);
  } else if (cfg.condition == "G" && !cfg.useDual) {
    rep = ptk::checkG(s.M, balls, cfg.K);
  } else {
    const ptk::InvariantDensity density = ptk::invariantDensity(s.M, cfg.tol);
    if (cfg.condition == "C") {
      rep = ptk::checkC(s.M, density, balls, cfg.K);
    } else {
      const ptk::GeneratorMatrix gen =
          cfg.useDual ? ptk::discreteAdjoint(s.M, density) : s.M;
      rep = cfg.condition == "G" ? ptk::checkG(gen, balls, cfg.K)
                                 : ptk::checkE(gen, balls, cfg.delta);
    }
  }
  const std::string dir = resolveOutdir(cfg);
  Json body{{"config", configJson(cfg)}, {"report", ptk::toJson(rep)}};
  ptk::writeReport(dir + "/check_" + cfg.condition + ".json", body);
  std::cout << "condition (" << rep.condition << ") on " << rep.generatorTag << ": worst upper "
            << rep.worstUpper << ", worst lower " << rep.worstLower << ", "
            << (rep.pass ? "pass" : "fail") << "\n";
  return rep.pass ? 0 : 1;
}

/// Exact-identity suite: duality, cap = cap*, energy = flux = nu-mass,
/// representation, maximum principle, occupation-sum identity.
int runVerify(const RunConfig& cfg) {
  const Setup s = makeSetup(cfg);
  const double l = cfg.length;
  const ptk::InvariantDensity density = ptk::invariantDensity(s.M, cfg.tol);
  const ptk::GeneratorMatrix dual = ptk::discreteAdjoint(s.M, density);
  const ptk::Point c = torusCenter(s.grid);

  std::vector<std::pair<std::string, double>> residuals;
  const double threshold = 1e-8;

  // Occupation-sum identity and duality on a killed ball.
  {
    const ptk::RegionMask D = ptk::makeBallMask(s.grid, {c, 0.3 * l});
    const ptk::GeneratorMatrix killed = ptk::killedSubmatrix(s.M, D);
    const ptk::GeneratorMatrix killedDual = ptk::killedSubmatrix(dual, D);
    const ptk::ExitTimeField u = ptk::exitTime(killed, D);

    // Row y of N from the transposed killed matrix.
    const ptk::CsrMatrix Nt = ptk::transposeMatrix(killed.mat);
    const ptk::Index y0 = s.grid.cellContaining(c);
    ptk::Index y0local = -1;
    for (ptk::Index i = 0; i < killed.mat.rows; ++i)
      if (killed.cells[static_cast<std::size_t>(i)] == y0) y0local = i;
    std::vector<double> ey(static_cast<std::size_t>(killed.mat.rows), 0.0);
    ey[static_cast<std::size_t>(y0local)] = -1.0;
    ptk::SolveReport rowRep;
    const std::vector<double> rowY = ptk::solveLinear(Nt, ey, rowRep, cfg.tol);

    double rowSum = 0.0;
    double maxN = 0.0;
    for (double v : rowY) {
      rowSum += v;
      maxN = std::max(maxN, std::fabs(v));
    }
    const double uy = u.values[static_cast<std::size_t>(y0)];
    residuals.emplace_back("occupation_sum", std::fabs(rowSum - uy) / std::fabs(uy));

    const ptk::GreenColumn dualCol = ptk::greenColumn(killedDual, D, y0);
    double worst = 0.0;
    const double piY = density.pi[static_cast<std::size_t>(y0)];
    for (ptk::Index i = 0; i < killed.mat.rows; ++i) {
      const std::size_t g = static_cast<std::size_t>(killed.cells[static_cast<std::size_t>(i)]);
      const double lhs = density.pi[g] * dualCol.occupation[g];
      const double rhs = piY * rowY[static_cast<std::size_t>(i)];
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
    residuals.emplace_back("duality", worst / (piY * maxN));
  }

  // Condenser identities.
  {
    const ptk::RegionMask A = ptk::makeBallMask(s.grid, {c, 0.15 * l});
    const ptk::RegionMask B = ptk::complementMask(ptk::makeBallMask(s.grid, {c, 0.35 * l}));
    const ptk::HarmonicExtension h = ptk::harmonicExtension(s.M, A, B);
    double hMin = 0.0, hMax = 1.0;
    for (double v : h.values) {
      hMin = std::min(hMin, v);
      hMax = std::max(hMax, v);
    }
    residuals.emplace_back("committor_range", std::max(-hMin, hMax - 1.0));

    const ptk::CapacityResult cap = ptk::capacity(s.M, density, h);
    residuals.emplace_back("energy_vs_flux", cap.relativeMismatch);

    const ptk::EquilibriumMeasure nu = ptk::equilibriumMeasure(s.M, density, h);
    residuals.emplace_back("energy_vs_mass",
                           std::fabs(cap.energy - nu.mass) / std::fabs(cap.energy));

    const ptk::HarmonicExtension hDual = ptk::harmonicExtension(dual, A, B);
    const ptk::CapacityResult capDual = ptk::capacity(dual, density, hDual);
    residuals.emplace_back("capacity_adjoint",
                           std::fabs(cap.energy - capDual.energy) / std::fabs(cap.energy));

    const ptk::IdentityReport repr = ptk::representationCheck(nu, h, s.M, density);
    residuals.emplace_back("representation", repr.maxResidual);
  }

  // Maximum principle on a killed ball (threshold 1e-9, stricter than the rest).
  const ptk::RegionMask Dmp = ptk::makeBallMask(s.grid, {c, 0.25 * l});
  const ptk::IdentityReport mp = ptk::maximumPrincipleCheck(s.M, Dmp, 20, cfg.seed);

  bool ok = mp.pass;
  Json rows = Json::array();
  for (const auto& [name, value] : residuals) {
    const bool pass = value <= threshold;
    ok = ok && pass;
    rows.push_back(Json{{"identity", name}, {"residual", value}, {"pass", pass}});
    std::cout << name << ": residual " << value << (pass ? " (ok)" : " (FAIL)") << "\n";
  }
  std::cout << "maximum_principle: residual " << mp.maxResidual
            << (mp.pass ? " (ok)" : " (FAIL)") << "\n";
  rows.push_back(Json{{"identity", "maximum_principle"},
                      {"residual", mp.maxResidual},
                      {"pass", mp.pass}});

  const std::string dir = resolveOutdir(cfg);
  Json body{{"config", configJson(cfg)}, {"identities", rows}, {"pass", ok}};
  ptk::writeReport(dir + "/verify.json", body);
  return ok ? 0 : 1;
}

int runMc(const RunConfig& cfg) {
  const Setup s = makeSetup(cfg);
  const double l = cfg.length;
  const ptk::Point c = torusCenter(s.grid);
  const double h = s.grid.spacing;

  ptk::SdeConfig sde;
  sde.dt = cfg.mcDt > 0.0 ? cfg.mcDt : h * h / 10.0;
  sde.trajectories = cfg.mcPaths;
  sde.seed = cfg.seed;
  sde.dim = cfg.dim;

  // Exit time from the ball center, MC vs PDE.
  const ptk::BallSpec ball{c, 0.25 * l};
  const ptk::RegionGeometry geomD{ptk::RegionGeometry::Kind::Ball, ball};
  const ptk::McEstimate mcExit = ptk::simulateExitTime(s.field, geomD, c, sde);
  const ptk::RegionMask D = ptk::makeBallMask(s.grid, ball);
  const ptk::GeneratorMatrix killed = ptk::killedSubmatrix(s.M, D);
  const ptk::ExitTimeField u = ptk::exitTime(killed, D);
  const double pdeExit = u.values[static_cast<std::size_t>(s.grid.cellContaining(c))];
  const double exitSigmas = std::fabs(mcExit.mean - pdeExit) / mcExit.standardError;

  // Hitting probability at mid-radius, MC vs PDE committor.
  const ptk::BallSpec inner{c, 0.15 * l};
  const ptk::BallSpec outer{c, 0.35 * l};
  ptk::Point start = c;
  start[0] += 0.25 * l;
  start = snapToCell(s.grid, start);
  const ptk::RegionGeometry geomA{ptk::RegionGeometry::Kind::Ball, inner};
  const ptk::RegionGeometry geomB{ptk::RegionGeometry::Kind::BallComplement, outer};
  const ptk::McEstimate mcHit = ptk::simulateHittingProbability(s.field, geomA, geomB, start, sde);
  const ptk::RegionMask A = ptk::makeBallMask(s.grid, inner);
  const ptk::RegionMask B = ptk::complementMask(ptk::makeBallMask(s.grid, outer));
  const ptk::HarmonicExtension hAB = ptk::harmonicExtension(s.M, A, B);
  const double pdeHit = hAB.values[static_cast<std::size_t>(s.grid.cellContaining(start))];
  const double hitSigmas = std::fabs(mcHit.mean - pdeHit) / mcHit.standardError;

  const std::string dir = resolveOutdir(cfg);
  Json body{{"config", configJson(cfg)},
            {"exit_time",
             {{"mc", ptk::toJson(mcExit)}, {"pde", pdeExit}, {"sigmas", exitSigmas}}},
            {"hitting_probability",
             {{"mc", ptk::toJson(mcHit)}, {"pde", pdeHit}, {"sigmas", hitSigmas}}}};
  ptk::writeReport(dir + "/mc.json", body);
  std::cout << "exit time: mc " << mcExit.mean << " +- " << mcExit.standardError << ", pde "
            << pdeExit << " (" << exitSigmas << " SE)\n";
  std::cout << "hitting probability: mc " << mcHit.mean << " +- " << mcHit.standardError
            << ", pde " << pdeHit << " (" << hitSigmas << " SE)\n";
  const bool ok = mcExit.reliable && mcHit.reliable && exitSigmas <= 3.0 && hitSigmas <= 3.0;
  return ok ? 0 : 1;
}

int runReport(const RunConfig& cfg) {
  const ptk::TorusGrid grid(cfg.dim, cfg.n, cfg.length);
  const ptk::CoefficientField field =
      ptk::builtinField(cfg.family, parseParams(cfg.fieldParams), cfg.length);
  const std::vector<ptk::BallSpec> balls = ballFamily(grid, cfg.radii);
  const ptk::EquivalenceReport rep = ptk::equivalenceSuite(field, grid, balls, cfg.K);
  const std::string dir = resolveOutdir(cfg);
  Json body{{"config", configJson(cfg)}, {"equivalence", ptk::toJson(rep)}};
  ptk::writeReport(dir + "/report.json", body);
  std::cout << "equivalence suite (" << cfg.family << "): stability factor "
            << rep.stabilityFactor << ", verdict " << (rep.verdict ? "pass" : "fail") << "\n";
  return rep.verdict ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical potential theory on the periodic torus"};
  app.set_config("--config", "", "plain-text key/value config with sections");
  app.require_subcommand(1);
  app.allow_config_extras(true);

  RunConfig cfg;
  app.add_option("--dim", cfg.dim, "space dimension (2 or 3)");
  app.add_option("--n", cfg.n, "cells per side");
  app.add_option("--length", cfg.length, "torus side length");
  app.add_option("--family", cfg.family, "coefficient family");
  app.add_option("--param", cfg.fieldParams, "field parameter key=value");
  app.add_option("--scheme", cfg.scheme, "upwind or central");
  app.add_option("--tol", cfg.tol, "linear solver relative tolerance");
  app.add_option("--radius", cfg.radii, "ball radii for scans");
  app.add_option("--K", cfg.K, "dilation constant for (G)/(C)");
  app.add_option("--delta", cfg.delta, "shrink factor for (E)/(Har)");
  app.add_option("--trials", cfg.trials, "random trials for Harnack scans");
  app.add_option("--mc-dt", cfg.mcDt, "SDE time step (0 = h^2/10)");
  app.add_option("--mc-paths", cfg.mcPaths, "SDE trajectory count");
  app.add_option("--seed", cfg.seed, "RNG seed");
  app.add_option("--outdir", cfg.outdir, "output directory (env PTK_OUTDIR overrides)");

  auto* sub = app.add_subcommand("invariant", "compute and export the invariant density");
  auto* subExit = app.add_subcommand("exit-time", "mean exit time from a centered ball");
  auto* subGreen = app.add_subcommand("green", "Green column from the ball center");
  auto* subCap = app.add_subcommand("capacity", "condenser capacity and equilibrium mass");
  auto* subHar = app.add_subcommand("harnack", "Harnack ratio scan, primal and dual");
  auto* subCheck = app.add_subcommand("check", "one condition scan");
  subCheck->add_option("--condition", cfg.condition, "G, E, C or Har");
  subCheck->add_flag("--dual", cfg.useDual, "scan the dual generator");
  auto* subVerify = app.add_subcommand("verify", "exact-identity suite");
  auto* subMc = app.add_subcommand("mc", "stochastic cross-checks");
  auto* subReport = app.add_subcommand("report", "full equivalence suite at n and 2n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (sub->parsed()) return runInvariant(cfg);
    if (subExit->parsed()) return runExitTime(cfg);
    if (subGreen->parsed()) return runGreen(cfg);
    if (subCap->parsed()) return runCapacity(cfg);
    if (subHar->parsed()) return runHarnack(cfg);
    if (subCheck->parsed()) return runCheck(cfg);
    if (subVerify->parsed()) return runVerify(cfg);
    if (subMc->parsed()) return runMc(cfg);
    if (subReport->parsed()) return runReport(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
