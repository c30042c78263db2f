#include "ptk/sparse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ptk {

CsrMatrix CsrMatrix::fromTriplets(Index rows, Index cols, const std::vector<Index>& ti,
                                  const std::vector<Index>& tj,
                                  const std::vector<double>& tv) {
  CsrMatrix A;
  A.rows = rows;
  A.cols = cols;
  const std::size_t nt = tv.size();
  std::vector<Index> count(static_cast<std::size_t>(rows) + 1, 0);
  for (std::size_t k = 0; k < nt; ++k) count[static_cast<std::size_t>(ti[k]) + 1]++;
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<Index> cj(nt);
  std::vector<double> cv(nt);
  std::vector<Index> cursor(count.begin(), count.end() - 1);
  for (std::size_t k = 0; k < nt; ++k) {
    const Index slot = cursor[static_cast<std::size_t>(ti[k])]++;
    cj[static_cast<std::size_t>(slot)] = tj[k];
    cv[static_cast<std::size_t>(slot)] = tv[k];
  }
  A.rowPtr.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (Index r = 0; r < rows; ++r) {
    const Index lo = count[static_cast<std::size_t>(r)];
    const Index hi = count[static_cast<std::size_t>(r) + 1];
    std::vector<std::pair<Index, double>> row;
    row.reserve(static_cast<std::size_t>(hi - lo));
    for (Index k = lo; k < hi; ++k)
      row.emplace_back(cj[static_cast<std::size_t>(k)], cv[static_cast<std::size_t>(k)]);
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // merge duplicates
    const std::size_t rowStart = A.colIdx.size();
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (A.colIdx.size() > rowStart && A.colIdx.back() == row[k].first) {
        A.vals.back() += row[k].second;
      } else {
        A.colIdx.push_back(row[k].first);
        A.vals.push_back(row[k].second);
      }
    }
    A.rowPtr[static_cast<std::size_t>(r) + 1] = static_cast<Index>(A.colIdx.size() - rowStart);
  }
  for (Index r = 0; r < rows; ++r)
    A.rowPtr[static_cast<std::size_t>(r) + 1] += A.rowPtr[static_cast<std::size_t>(r)];
  return A;
}

void matvecSerial(const CsrMatrix& A, const double* x, double* y) {
  for (Index r = 0; r < A.rows; ++r) {
    double acc = 0.0;
    for (Index k = A.rowPtr[static_cast<std::size_t>(r)];
         k < A.rowPtr[static_cast<std::size_t>(r) + 1]; ++k)
      acc += A.vals[static_cast<std::size_t>(k)] *
             x[static_cast<std::size_t>(A.colIdx[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(r)] = acc;
  }
}

void matvecParallel(const CsrMatrix& A, const double* x, double* y) {
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < A.rows; ++r) {
    double acc = 0.0;
    for (Index k = A.rowPtr[static_cast<std::size_t>(r)];
         k < A.rowPtr[static_cast<std::size_t>(r) + 1]; ++k)
      acc += A.vals[static_cast<std::size_t>(k)] *
             x[static_cast<std::size_t>(A.colIdx[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(r)] = acc;
  }
}

CsrMatrix transposeMatrix(const CsrMatrix& A) {
  CsrMatrix T;
  T.rows = A.cols;
  T.cols = A.rows;
  T.rowPtr.assign(static_cast<std::size_t>(T.rows) + 1, 0);
  for (Index k = 0; k < A.nnz(); ++k)
    T.rowPtr[static_cast<std::size_t>(A.colIdx[static_cast<std::size_t>(k)]) + 1]++;
  std::partial_sum(T.rowPtr.begin(), T.rowPtr.end(), T.rowPtr.begin());
  T.colIdx.resize(static_cast<std::size_t>(A.nnz()));
  T.vals.resize(static_cast<std::size_t>(A.nnz()));
  std::vector<Index> cursor(T.rowPtr.begin(), T.rowPtr.end() - 1);
  for (Index r = 0; r < A.rows; ++r) {
    for (Index k = A.rowPtr[static_cast<std::size_t>(r)];
         k < A.rowPtr[static_cast<std::size_t>(r) + 1]; ++k) {
      const Index c = A.colIdx[static_cast<std::size_t>(k)];
      const Index slot = cursor[static_cast<std::size_t>(c)]++;
      T.colIdx[static_cast<std::size_t>(slot)] = r;
      T.vals[static_cast<std::size_t>(slot)] = A.vals[static_cast<std::size_t>(k)];
    }
  }
  return T;
}

namespace {
constexpr std::size_t kDotBlock = 4096;
}

double dotBlocked(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  const std::size_t nblocks = (n + kDotBlock - 1) / kDotBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t blk = 0; blk < static_cast<std::int64_t>(nblocks); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kDotBlock;
    const std::size_t hi = std::min(lo + kDotBlock, n);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += a[i] * b[i];
    partial[static_cast<std::size_t>(blk)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dotBlocked(a, a)); }

std::vector<double> solveLinear(const CsrMatrix& A, const std::vector<double>& rhs,
                                SolveReport& report, double tol, int maxIterations,
                                const std::vector<double>* initialGuess) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = static_cast<std::size_t>(A.rows);
  if (rhs.size() != n) throw std::invalid_argument("rhs size mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  std::vector<double> invDiag(n, 1.0);
  for (Index r = 0; r < A.rows; ++r) {
    for (Index k = A.rowPtr[static_cast<std::size_t>(r)];
         k < A.rowPtr[static_cast<std::size_t>(r) + 1]; ++k) {
      if (A.colIdx[static_cast<std::size_t>(k)] == r) {
        const double d = A.vals[static_cast<std::size_t>(k)];
        if (d != 0.0) invDiag[static_cast<std::size_t>(r)] = 1.0 / d;
      }
    }
  }

  std::vector<double> x(n, 0.0);
  if (initialGuess && initialGuess->size() == n) x = *initialGuess;

  const double bnorm = norm2(rhs);
  auto finish = [&](int iters, double relres, bool ok) {
    report.iterations = iters;
    report.relativeResidual = relres;
    report.converged = ok;
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    finish(0, 0.0, true);
    return x;
  }

  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), phat(n), s(n), shat(n), t(n);
  matvecParallel(A, x.data(), r.data());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    r[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
  rhat = r;

  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double resid = norm2(r);
  int iter = 0;
  const double breakdownEps = 1e-300;
  while (resid > tol * bnorm) {
    if (iter >= maxIterations) {
      finish(iter, resid / bnorm, false);
      throw SolverError("solver stagnated", report);
    }
    const double rhoNew = dotBlocked(rhat, r);
    if (std::fabs(rhoNew) < breakdownEps) {
      finish(iter, resid / bnorm, false);
      throw SolverError("solver stagnated", report);
    }
    const double beta = (rhoNew / rho) * (alpha / omega);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      const std::size_t u = static_cast<std::size_t>(i);
      p[u] = r[u] + beta * (p[u] - omega * v[u]);
      phat[u] = invDiag[u] * p[u];
    }
    matvecParallel(A, phat.data(), v.data());
    const double rhatV = dotBlocked(rhat, v);
    if (std::fabs(rhatV) < breakdownEps) {
      finish(iter, resid / bnorm, false);
      throw SolverError("solver stagnated", report);
    }
    alpha = rhoNew / rhatV;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      const std::size_t u = static_cast<std::size_t>(i);
      s[u] = r[u] - alpha * v[u];
      shat[u] = invDiag[u] * s[u];
    }
    const double snorm = norm2(s);
    if (snorm <= tol * bnorm) {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        x[u] += alpha * phat[u];
      }
      resid = snorm;
      ++iter;
      break;
    }
    matvecParallel(A, shat.data(), t.data());
    const double tt = dotBlocked(t, t);
    if (tt < breakdownEps) {
      finish(iter, resid / bnorm, false);
      throw SolverError("solver stagnated", report);
    }
    omega = dotBlocked(t, s) / tt;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      const std::size_t u = static_cast<std::size_t>(i);
      x[u] += alpha * phat[u] + omega * shat[u];
      r[u] = s[u] - omega * t[u];
    }
    resid = norm2(r);
    rho = rhoNew;
    ++iter;
  }
  finish(iter, resid / bnorm, true);
  return x;
}

}  // namespace ptk
