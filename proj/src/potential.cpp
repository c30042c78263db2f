#include "ptk/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ptk {

namespace {

std::vector<Index> globalToLocalMap(const TorusGrid& grid, const RegionMask& D) {
  std::vector<Index> map(static_cast<std::size_t>(grid.cellCount()), -1);
  for (Index i = 0; i < D.size(); ++i)
    map[static_cast<std::size_t>(D.cells[static_cast<std::size_t>(i)])] = i;
  return map;
}

}  // namespace

ExitTimeField exitTime(const GeneratorMatrix& killed, const RegionMask& D,
                       const std::string& provenance) {
  if (!killed.isKilled()) throw std::invalid_argument("exit time needs a killed generator");
  std::vector<double> rhs(static_cast<std::size_t>(killed.mat.rows), -1.0);
  ExitTimeField field;
  std::vector<double> u = solveLinear(killed.mat, rhs, field.solve);
  field.domain = D;
  field.provenance = provenance;
  field.values.assign(static_cast<std::size_t>(killed.grid->cellCount()), 0.0);
  for (Index i = 0; i < killed.mat.rows; ++i)
    field.values[static_cast<std::size_t>(killed.cells[static_cast<std::size_t>(i)])] =
        u[static_cast<std::size_t>(i)];
  return field;
}

GreenColumn greenColumn(const GeneratorMatrix& killed, const RegionMask& D, Index sourceCell) {
  if (!killed.isKilled()) throw std::invalid_argument("green column needs a killed generator");
  const auto map = globalToLocalMap(*killed.grid, D);
  const Index local = map[static_cast<std::size_t>(sourceCell)];
  if (local < 0) throw std::invalid_argument("source outside domain");

  std::vector<double> rhs(static_cast<std::size_t>(killed.mat.rows), 0.0);
  rhs[static_cast<std::size_t>(local)] = -1.0;
  GreenColumn col;
  std::vector<double> v = solveLinear(killed.mat, rhs, col.solve);
  col.domain = D;
  col.source = sourceCell;
  const double hd = std::pow(killed.grid->spacing, killed.grid->dim);
  const Index total = killed.grid->cellCount();
  col.occupation.assign(static_cast<std::size_t>(total), 0.0);
  col.density.assign(static_cast<std::size_t>(total), 0.0);
  for (Index i = 0; i < killed.mat.rows; ++i) {
    const std::size_t g = static_cast<std::size_t>(killed.cells[static_cast<std::size_t>(i)]);
    col.occupation[g] = v[static_cast<std::size_t>(i)];
    col.density[g] = v[static_cast<std::size_t>(i)] / hd;
  }
  return col;
}

HarmonicExtension harmonicExtension(const GeneratorMatrix& M, const RegionMask& A,
                                    const RegionMask& B) {
  if (M.isKilled()) throw std::invalid_argument("harmonic extension needs the full generator");
  for (Index c : A.cells)
    if (B.contains(c)) throw std::invalid_argument("regions not separated");
  for (Index c : A.outerBoundary)
    if (B.contains(c)) throw std::invalid_argument("regions not separated");

  // Constrained cells are eliminated: solve the killed system on the free
  // cells with the couplings into A moved to the right-hand side.
  const Index total = M.grid->cellCount();
  std::vector<std::uint8_t> freeMember(static_cast<std::size_t>(total), 1);
  for (Index c : A.cells) freeMember[static_cast<std::size_t>(c)] = 0;
  for (Index c : B.cells) freeMember[static_cast<std::size_t>(c)] = 0;
  const RegionMask D = maskFromMembership(*M.grid, std::move(freeMember));
  const GeneratorMatrix killed = killedSubmatrix(M, D);

  std::vector<double> rhs(static_cast<std::size_t>(killed.mat.rows), 0.0);
  for (Index i = 0; i < killed.mat.rows; ++i) {
    const Index g = killed.cells[static_cast<std::size_t>(i)];
    double coupled = 0.0;
    for (Index k = M.mat.rowPtr[static_cast<std::size_t>(g)];
         k < M.mat.rowPtr[static_cast<std::size_t>(g) + 1]; ++k) {
      if (A.contains(M.mat.colIdx[static_cast<std::size_t>(k)]))
        coupled += M.mat.vals[static_cast<std::size_t>(k)];
    }
    rhs[static_cast<std::size_t>(i)] = -coupled;
  }
  HarmonicExtension h;
  const std::vector<double> u = solveLinear(killed.mat, rhs, h.solve);
  h.values.assign(static_cast<std::size_t>(total), 0.0);
  for (Index i = 0; i < killed.mat.rows; ++i)
    h.values[static_cast<std::size_t>(killed.cells[static_cast<std::size_t>(i)])] =
        u[static_cast<std::size_t>(i)];
  for (Index c : A.cells) h.values[static_cast<std::size_t>(c)] = 1.0;
  h.regionA = A;
  h.regionB = B;
  return h;
}

CapacityResult capacity(const GeneratorMatrix& M, const InvariantDensity& density,
                        const HarmonicExtension& h) {
  std::vector<double> Mh;
  matvec(M.mat, h.values, Mh);
  const std::size_t n = h.values.size();
  std::vector<double> hpi(n);
  for (std::size_t i = 0; i < n; ++i) hpi[i] = h.values[i] * density.pi[i];
  CapacityResult cap;
  cap.energy = -dotBlocked(hpi, Mh);
  double flux = 0.0;
  for (Index c : h.regionA.cells) {
    const std::size_t i = static_cast<std::size_t>(c);
    flux -= Mh[i] * density.pi[i];
  }
  cap.flux = flux;
  const double scale = std::max(std::fabs(cap.energy), std::fabs(cap.flux));
  cap.relativeMismatch = scale > 0.0 ? std::fabs(cap.energy - cap.flux) / scale : 0.0;
  return cap;
}

CapacityResult capacity(const GeneratorMatrix& M, const InvariantDensity& density,
                        const RegionMask& A, const RegionMask& B) {
  return capacity(M, density, harmonicExtension(M, A, B));
}

EquilibriumMeasure equilibriumMeasure(const GeneratorMatrix& M, const InvariantDensity& density,
                                      const HarmonicExtension& h) {
  std::vector<double> Mh;
  matvec(M.mat, h.values, Mh);
  EquilibriumMeasure nu;
  nu.support = h.regionA;
  nu.weights.assign(h.values.size(), 0.0);
  double maxAbs = 0.0;
  for (Index c : h.regionA.cells) {
    const std::size_t i = static_cast<std::size_t>(c);
    nu.weights[i] = -Mh[i] * density.pi[i];
    maxAbs = std::max(maxAbs, std::fabs(nu.weights[i]));
  }
  // nu >= 0 holds in exact arithmetic (maximum principle); anything below the
  // solver-residual floor is a genuine violation, anything above it is
  // roundoff and clipped to zero so the returned measure is nonnegative.
  const double floor = -1e-9 * std::max(maxAbs, 1e-300);
  double mass = 0.0;
  for (Index c : h.regionA.cells) {
    const std::size_t i = static_cast<std::size_t>(c);
    if (nu.weights[i] < floor) throw std::runtime_error("equilibrium positivity violated");
    if (nu.weights[i] < 0.0) nu.weights[i] = 0.0;
    mass += nu.weights[i];
  }
  nu.mass = mass;
  return nu;
}

IdentityReport representationCheck(const EquilibriumMeasure& nu, const HarmonicExtension& h,
                                   const GeneratorMatrix& M, const InvariantDensity& density) {
  const RegionMask D = complementMask(h.regionB);
  const GeneratorMatrix killed = killedSubmatrix(M, D);
  std::vector<double> rhs(static_cast<std::size_t>(killed.mat.rows), 0.0);
  for (Index i = 0; i < killed.mat.rows; ++i) {
    const std::size_t g = static_cast<std::size_t>(killed.cells[static_cast<std::size_t>(i)]);
    rhs[static_cast<std::size_t>(i)] = -nu.weights[g] / density.pi[g];
  }
  SolveReport rep;
  const std::vector<double> r = solveLinear(killed.mat, rhs, rep);

  double maxOffResidual = 0.0;  // |r - h| off A u B
  double maxOnAResidual = 0.0;  // |r - 1| on A
  for (Index i = 0; i < killed.mat.rows; ++i) {
    const std::size_t g = static_cast<std::size_t>(killed.cells[static_cast<std::size_t>(i)]);
    const double ri = r[static_cast<std::size_t>(i)];
    if (h.regionA.contains(static_cast<Index>(g)))
      maxOnAResidual = std::max(maxOnAResidual, std::fabs(ri - 1.0));
    else if (!h.regionB.contains(static_cast<Index>(g)))
      maxOffResidual = std::max(maxOffResidual, std::fabs(ri - h.values[g]));
  }
  IdentityReport out;
  out.name = "representation";
  out.maxResidual = std::max(maxOffResidual, maxOnAResidual);
  out.pass = out.maxResidual <= 1e-8;
  out.details["max_off_AB"] = maxOffResidual;
  out.details["max_on_A"] = maxOnAResidual;
  return out;
}

IdentityReport annulusExtremaCheck(const GreenColumn& g, const RegionMask& U,
                                   const RegionMask& V) {
  if (!U.contains(g.source)) throw std::invalid_argument("source outside inner region");
  IdentityReport out;
  out.name = "annulus-extrema";

  double minU = std::numeric_limits<double>::infinity();
  double maxV = -std::numeric_limits<double>::infinity();
  double minV = std::numeric_limits<double>::infinity();
  for (Index c : V.cells) {
    maxV = std::max(maxV, g.density[static_cast<std::size_t>(c)]);
    minV = std::min(minV, g.density[static_cast<std::size_t>(c)]);
  }
  if (maxV - minV <= 1e-15 * std::max(std::fabs(maxV), 1.0)) {
    out.details["degenerate"] = 1.0;
    out.pass = false;
    return out;
  }

  for (Index c : U.cells)
    if (c != g.source) minU = std::min(minU, g.density[static_cast<std::size_t>(c)]);
  double minInnerBnd = std::numeric_limits<double>::infinity();
  for (Index c : U.innerBoundary)
    minInnerBnd = std::min(minInnerBnd, g.density[static_cast<std::size_t>(c)]);

  double supAnnulus = -std::numeric_limits<double>::infinity();
  for (Index c : V.cells)
    if (!U.contains(c)) supAnnulus = std::max(supAnnulus, g.density[static_cast<std::size_t>(c)]);
  double supLayer = -std::numeric_limits<double>::infinity();
  for (Index c : U.outerBoundary)
    if (V.contains(c)) supLayer = std::max(supLayer, g.density[static_cast<std::size_t>(c)]);

  const double tol = 1e-12 * std::max(std::fabs(maxV), 1.0);
  const bool minOnBoundary = std::fabs(minU - minInnerBnd) <= tol;
  const bool supOnLayer = supAnnulus <= supLayer + tol;
  out.details["min_U"] = minU;
  out.details["min_inner_boundary"] = minInnerBnd;
  out.details["sup_annulus"] = supAnnulus;
  out.details["sup_boundary_layer"] = supLayer;
  out.maxResidual = std::max(std::fabs(minU - minInnerBnd), std::max(0.0, supAnnulus - supLayer));
  out.pass = minOnBoundary && supOnLayer;
  return out;
}

std::vector<double> solveDirichlet(const GeneratorMatrix& M, const RegionMask& D,
                                   const std::vector<double>& boundaryData,
                                   SolveReport* reportOut) {
  if (M.isKilled()) throw std::invalid_argument("solveDirichlet needs the full generator");
  const GeneratorMatrix killed = killedSubmatrix(M, D);
  std::vector<double> rhs(static_cast<std::size_t>(killed.mat.rows), 0.0);
  for (Index i = 0; i < killed.mat.rows; ++i) {
    const Index g = killed.cells[static_cast<std::size_t>(i)];
    double coupled = 0.0;
    for (Index k = M.mat.rowPtr[static_cast<std::size_t>(g)];
         k < M.mat.rowPtr[static_cast<std::size_t>(g) + 1]; ++k) {
      const Index col = M.mat.colIdx[static_cast<std::size_t>(k)];
      if (!D.contains(col))
        coupled += M.mat.vals[static_cast<std::size_t>(k)] *
                   boundaryData[static_cast<std::size_t>(col)];
    }
    rhs[static_cast<std::size_t>(i)] = -coupled;
  }
  SolveReport rep;
  const std::vector<double> u = solveLinear(killed.mat, rhs, rep);
  if (reportOut) *reportOut = rep;

  std::vector<double> full(static_cast<std::size_t>(M.grid->cellCount()), 0.0);
  for (Index c : D.outerBoundary)
    full[static_cast<std::size_t>(c)] = boundaryData[static_cast<std::size_t>(c)];
  for (Index i = 0; i < killed.mat.rows; ++i)
    full[static_cast<std::size_t>(killed.cells[static_cast<std::size_t>(i)])] =
        u[static_cast<std::size_t>(i)];
  return full;
}

IdentityReport maximumPrincipleCheck(const GeneratorMatrix& M, const RegionMask& D,
                                     int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  IdentityReport out;
  out.name = "maximum-principle";
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> data(static_cast<std::size_t>(M.grid->cellCount()), 0.0);
    double dataMin = std::numeric_limits<double>::infinity(), dataMax = 0.0;
    for (Index c : D.outerBoundary) {
      const double v = (t == 0) ? 0.5 : unif(rng);  // first trial: constant data
      data[static_cast<std::size_t>(c)] = v;
      dataMin = std::min(dataMin, v);
      dataMax = std::max(dataMax, v);
    }
    const std::vector<double> u = solveDirichlet(M, D, data);
    double uMin = std::numeric_limits<double>::infinity();
    double uMax = -std::numeric_limits<double>::infinity();
    for (Index c : D.cells) {
      uMin = std::min(uMin, u[static_cast<std::size_t>(c)]);
      uMax = std::max(uMax, u[static_cast<std::size_t>(c)]);
    }
    worst = std::max(worst, std::max(uMax - dataMax, dataMin - uMin));
  }
  out.maxResidual = std::max(worst, 0.0);
  out.details["worst_overshoot"] = worst;
  out.pass = worst <= 1e-9;
  return out;
}

}  // namespace ptk
