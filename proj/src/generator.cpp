#include "ptk/generator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ptk {

std::string schemeName(Scheme s) { return s == Scheme::Upwind ? "upwind" : "central"; }

namespace {

GeneratorMatrix assembleImpl(const CoefficientField& field, const TorusGrid& grid,
                             Scheme scheme, const std::vector<Point>* driftTable,
                             const std::string& familyTag) {
  const Index total = grid.cellCount();
  const int d = grid.dim;
  const double h = grid.spacing;
  const int slots = 2 * d + 1;

  std::vector<Index> ti(static_cast<std::size_t>(total) * slots);
  std::vector<Index> tj(static_cast<std::size_t>(total) * slots);
  std::vector<double> tv(static_cast<std::size_t>(total) * slots, 0.0);

  // Diagonal-a precheck (throwing inside the parallel region is not allowed).
  for (Index c = 0; c < std::min<Index>(total, 64); ++c) {
    const Mat3 aSample = field.a(grid.cellCenter(c * (total / std::min<Index>(total, 64))));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j && std::fabs(aSample(i, j)) > 1e-14)
          throw std::invalid_argument("off-diagonal coefficient matrices are not supported");
  }

#pragma omp parallel for schedule(static)
  for (Index c = 0; c < total; ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * slots;
    const Point x = grid.cellCenter(c);
    double diag = 0.0;
    for (int axis = 0; axis < d; ++axis) {
      const std::size_t slotMinus = base + 1 + 2 * static_cast<std::size_t>(axis);
      const std::size_t slotPlus = slotMinus + 1;
      ti[slotMinus] = ti[slotPlus] = c;
      tj[slotMinus] = grid.neighbor(c, axis, -1);
      tj[slotPlus] = grid.neighbor(c, axis, +1);

      Point faceMinus = x, facePlus = x;
      faceMinus[axis] -= 0.5 * h;
      facePlus[axis] += 0.5 * h;
      const double wMinus = field.a(faceMinus)(axis, axis) / (h * h);
      const double wPlus = field.a(facePlus)(axis, axis) / (h * h);
      tv[slotMinus] += wMinus;
      tv[slotPlus] += wPlus;
      diag -= wMinus + wPlus;

      const Point drift = driftTable ? (*driftTable)[static_cast<std::size_t>(c)] : field.b(x);
      const double bk = drift[axis];
      if (scheme == Scheme::Upwind) {
        if (bk > 0.0) {
          tv[slotPlus] += bk / h;
          diag -= bk / h;
        } else if (bk < 0.0) {
          tv[slotMinus] += -bk / h;
          diag -= -bk / h;
        }
      } else {
        tv[slotPlus] += bk / (2.0 * h);
        tv[slotMinus] -= bk / (2.0 * h);
      }
    }
    ti[base] = tj[base] = c;
    tv[base] = diag;
  }

  GeneratorMatrix M;
  M.mat = CsrMatrix::fromTriplets(total, total, ti, tj, tv);
  M.grid = &grid;
  M.scheme = scheme;
  M.fieldFamily = familyTag;
  M.cells.resize(static_cast<std::size_t>(total));
  for (Index c = 0; c < total; ++c) M.cells[static_cast<std::size_t>(c)] = c;
  return M;
}

}  // namespace

GeneratorMatrix assembleGenerator(const CoefficientField& field, const TorusGrid& grid,
                                  Scheme scheme) {
  return assembleImpl(field, grid, scheme, nullptr, field.family);
}

GeneratorMatrix assembleGeneratorWithDrift(const CoefficientField& field,
                                           const TorusGrid& grid, Scheme scheme,
                                           const std::vector<Point>& driftPerCell,
                                           const std::string& familyTag) {
  if (static_cast<Index>(driftPerCell.size()) != grid.cellCount())
    throw std::invalid_argument("drift table size mismatch");
  return assembleImpl(field, grid, scheme, &driftPerCell, familyTag);
}

GeneratorMatrix killedSubmatrix(const GeneratorMatrix& M, const RegionMask& D) {
  if (M.isKilled()) throw std::invalid_argument("killed submatrix of a killed matrix");
  if (D.cells.empty() || D.size() == M.grid->cellCount())
    throw std::invalid_argument("degenerate domain");

  const Index total = M.grid->cellCount();
  std::vector<Index> globalToLocal(static_cast<std::size_t>(total), -1);
  for (Index i = 0; i < D.size(); ++i)
    globalToLocal[static_cast<std::size_t>(D.cells[static_cast<std::size_t>(i)])] = i;

  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index local = 0; local < D.size(); ++local) {
    const Index g = D.cells[static_cast<std::size_t>(local)];
    for (Index k = M.mat.rowPtr[static_cast<std::size_t>(g)];
         k < M.mat.rowPtr[static_cast<std::size_t>(g) + 1]; ++k) {
      const Index col = M.mat.colIdx[static_cast<std::size_t>(k)];
      const Index localCol = globalToLocal[static_cast<std::size_t>(col)];
      if (localCol >= 0) {
        ti.push_back(local);
        tj.push_back(localCol);
        tv.push_back(M.mat.vals[static_cast<std::size_t>(k)]);
      }
    }
  }
  GeneratorMatrix K;
  K.mat = CsrMatrix::fromTriplets(D.size(), D.size(), ti, tj, tv);
  K.grid = M.grid;
  K.scheme = M.scheme;
  K.fieldFamily = M.fieldFamily;
  K.cells = D.cells;
  return K;
}

InvariantDensity invariantDensity(const GeneratorMatrix& M, double residualTol,
                                  int maxPowerIterations, double shift) {
  if (M.scheme != Scheme::Upwind)
    throw std::invalid_argument("invariant density requires the upwind scheme");
  if (M.isKilled()) throw std::invalid_argument("invariant density requires the full generator");
  if (!(shift < 0.0)) throw std::invalid_argument("shift must be negative");

  const Index n = M.mat.rows;
  CsrMatrix T = transposeMatrix(M.mat);
  CsrMatrix Tshift = T;
  for (Index r = 0; r < n; ++r) {
    for (Index k = Tshift.rowPtr[static_cast<std::size_t>(r)];
         k < Tshift.rowPtr[static_cast<std::size_t>(r) + 1]; ++k) {
      if (Tshift.colIdx[static_cast<std::size_t>(k)] == r)
        Tshift.vals[static_cast<std::size_t>(k)] -= shift;
    }
  }

  std::vector<double> pi(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
  std::vector<double> residVec(static_cast<std::size_t>(n));
  double resid = 0.0;
  int it = 0;
  for (; it < maxPowerIterations; ++it) {
    matvecParallel(T, pi.data(), residVec.data());
    resid = 0.0;
    for (double v : residVec) resid = std::max(resid, std::fabs(v));
    if (resid <= residualTol) break;
    SolveReport rep;
    std::vector<double> w;
    try {
      w = solveLinear(Tshift, pi, rep, 1e-13, 20000, &pi);
    } catch (const SolverError&) {
      throw std::runtime_error("stationarity solve failed");
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    if (sum == 0.0) throw std::runtime_error("stationarity solve failed");
    const double inv = 1.0 / sum;
    for (std::size_t i = 0; i < w.size(); ++i) pi[i] = w[i] * inv;
  }
  if (resid > residualTol) throw std::runtime_error("stationarity solve failed");
  for (double v : pi)
    if (!(v > 0.0)) throw std::runtime_error("positivity violated");

  InvariantDensity rho;
  rho.pi = std::move(pi);
  const double hd = std::pow(M.grid->spacing, M.grid->dim);
  rho.mu.resize(rho.pi.size());
  for (std::size_t i = 0; i < rho.pi.size(); ++i) rho.mu[i] = rho.pi[i] / hd;
  rho.stationarityResidual = resid;
  rho.powerIterations = it;
  return rho;
}

GeneratorMatrix discreteAdjoint(const GeneratorMatrix& M, const InvariantDensity& density) {
  GeneratorMatrix D;
  D.mat = transposeMatrix(M.mat);
  for (Index r = 0; r < D.mat.rows; ++r) {
    const double piRow = density.pi[static_cast<std::size_t>(M.cells[static_cast<std::size_t>(r)])];
    for (Index k = D.mat.rowPtr[static_cast<std::size_t>(r)];
         k < D.mat.rowPtr[static_cast<std::size_t>(r) + 1]; ++k) {
      const Index c = D.mat.colIdx[static_cast<std::size_t>(k)];
      const double piCol = density.pi[static_cast<std::size_t>(M.cells[static_cast<std::size_t>(c)])];
      D.mat.vals[static_cast<std::size_t>(k)] *= piCol / piRow;
    }
  }
  D.grid = M.grid;
  D.scheme = M.scheme;
  D.fieldFamily = M.fieldFamily + "-dual";
  D.cells = M.cells;
  return D;
}

GeneratorMatrix dualGenerator(const GeneratorMatrix& M, const CoefficientField& field,
                              const InvariantDensity& density, DualMode mode) {
  if (mode == DualMode::DiscreteAdjoint) return discreteAdjoint(M, density);

  if (M.isKilled()) throw std::invalid_argument("analytic dual requires the full generator");
  const TorusGrid& grid = *M.grid;
  const double h = grid.spacing;
  std::vector<Point> drift(static_cast<std::size_t>(grid.cellCount()));
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < grid.cellCount(); ++c) {
    const Point x = grid.cellCenter(c);
    const Mat3 a = field.a(x);
    const Point b = field.b(x);
    const double mu = density.mu[static_cast<std::size_t>(c)];
    Point out{0.0, 0.0, 0.0};
    for (int axis = 0; axis < grid.dim; ++axis) {
      const double muPlus = density.mu[static_cast<std::size_t>(grid.neighbor(c, axis, +1))];
      const double muMinus = density.mu[static_cast<std::size_t>(grid.neighbor(c, axis, -1))];
      const double gradMu = (muPlus - muMinus) / (2.0 * h);
      out[axis] = (2.0 / mu) * a(axis, axis) * gradMu - b[axis];
    }
    drift[static_cast<std::size_t>(c)] = out;
  }
  return assembleGeneratorWithDrift(field, grid, M.scheme, drift,
                                    M.fieldFamily + "-dual-analytic");
}

void writeMatrixMarket(const CsrMatrix& A, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows << " " << A.cols << " " << A.nnz() << "\n";
  out.precision(17);
  for (Index r = 0; r < A.rows; ++r)
    for (Index k = A.rowPtr[static_cast<std::size_t>(r)];
         k < A.rowPtr[static_cast<std::size_t>(r) + 1]; ++k)
      out << (r + 1) << " " << (A.colIdx[static_cast<std::size_t>(k)] + 1) << " "
          << A.vals[static_cast<std::size_t>(k)] << "\n";
}

}  // namespace ptk
