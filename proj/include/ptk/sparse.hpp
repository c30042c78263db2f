#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptk/grid.hpp"

namespace ptk {

/// Row-compressed sparse matrix. Column indices are sorted ascending within
/// each row and duplicates are merged at construction.
struct CsrMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> rowPtr;  // size rows + 1
  std::vector<Index> colIdx;
  std::vector<double> vals;

  Index nnz() const { return static_cast<Index>(vals.size()); }

  static CsrMatrix fromTriplets(Index rows, Index cols, const std::vector<Index>& ti,
                                const std::vector<Index>& tj, const std::vector<double>& tv);
};

/// y = A x. Reference kernel, single-threaded. Per-row accumulation in
/// ascending column order; the parallel kernel reproduces it bit for bit.
void matvecSerial(const CsrMatrix& A, const double* x, double* y);

/// y = A x, rows distributed across OpenMP threads (static schedule). Each
/// row is summed serially in ascending column order, so the result is
/// identical to matvecSerial for any thread count.
void matvecParallel(const CsrMatrix& A, const double* x, double* y);

inline void matvec(const CsrMatrix& A, const std::vector<double>& x, std::vector<double>& y) {
  y.resize(static_cast<std::size_t>(A.rows));
  matvecParallel(A, x.data(), y.data());
}

CsrMatrix transposeMatrix(const CsrMatrix& A);

/// Dot product with a fixed block decomposition (block partials combined in
/// index order), deterministic for any thread count.
double dotBlocked(const std::vector<double>& a, const std::vector<double>& b);

double norm2(const std::vector<double>& a);

struct SolveReport {
  int iterations = 0;
  double relativeResidual = 0.0;
  double seconds = 0.0;
  bool converged = false;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolveReport rep)
      : std::runtime_error(what), report(rep) {}
  SolveReport report;
};

/// Solves A x = rhs with Jacobi-preconditioned BiCGStab to relative residual
/// `tol`. Deterministic given identical inputs. Throws SolverError
/// ("solver stagnated") on breakdown or iteration exhaustion.
std::vector<double> solveLinear(const CsrMatrix& A, const std::vector<double>& rhs,
                                SolveReport& report, double tol = 1e-10,
                                int maxIterations = 20000,
                                const std::vector<double>* initialGuess = nullptr);

}  // namespace ptk
