/// Compares the serial reference kernels against the OpenMP kernels: sparse
/// matvec throughput, blocked dot product, and one killed-ball solve.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ptk/potential.hpp"

namespace {

double seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 64;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 50;

  ptk::TorusGrid grid(3, n, 1.0);
  const ptk::CoefficientField field = ptk::builtinField("rotation-drift", {{"strength", 2.0}}, 1.0);
  const ptk::GeneratorMatrix M = ptk::assembleGenerator(field, grid, ptk::Scheme::Upwind);
  const std::size_t N = static_cast<std::size_t>(M.mat.rows);

  std::vector<double> x(N), ySerial(N), yParallel(N);
  for (std::size_t i = 0; i < N; ++i) x[i] = std::sin(0.01 * static_cast<double>(i));

#ifdef _OPENMP
  std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "threads: 1 (OpenMP disabled)\n";
#endif
  std::cout << "grid: n=" << n << " (" << N << " cells, " << M.mat.nnz() << " nonzeros)\n";

  double t0 = seconds();
  for (int r = 0; r < reps; ++r) ptk::matvecSerial(M.mat, x.data(), ySerial.data());
  const double tSerial = (seconds() - t0) / reps;

  t0 = seconds();
  for (int r = 0; r < reps; ++r) ptk::matvecParallel(M.mat, x.data(), yParallel.data());
  const double tParallel = (seconds() - t0) / reps;

  const bool identical =
      std::memcmp(ySerial.data(), yParallel.data(), N * sizeof(double)) == 0;
  const double gflops = 2.0 * static_cast<double>(M.mat.nnz()) / 1e9;
  std::cout << "matvec serial:   " << tSerial * 1e3 << " ms  (" << gflops / tSerial
            << " GFLOP/s)\n";
  std::cout << "matvec parallel: " << tParallel * 1e3 << " ms  (" << gflops / tParallel
            << " GFLOP/s, speedup " << tSerial / tParallel << ")\n";
  std::cout << "bitwise identical results: " << (identical ? "yes" : "NO") << "\n";

  const ptk::Point c = grid.cellCenter(grid.cellContaining({0.5, 0.5, 0.5}));
  const ptk::RegionMask D = ptk::makeBallMask(grid, {c, 0.3});
  const ptk::GeneratorMatrix killed = ptk::killedSubmatrix(M, D);
  const ptk::ExitTimeField u = ptk::exitTime(killed, D);
  std::cout << "killed-ball solve (" << killed.mat.rows << " unknowns): "
            << u.solve.seconds * 1e3 << " ms, " << u.solve.iterations << " iterations\n";

  return identical ? 0 : 1;
}
