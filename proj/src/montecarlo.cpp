#include "ptk/montecarlo.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace ptk {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double minImageDistance(const Point& p, const Point& q, double period, int dim) {
  double sum = 0.0;
  for (int k = 0; k < dim; ++k) {
    double d = std::fabs(p[k] - q[k]);
    d = std::fmod(d, period);
    if (d > 0.5 * period) d = period - d;
    sum += d * d;
  }
  return std::sqrt(sum);
}

void validate(const SdeConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (cfg.maxSteps < 1 || cfg.trajectories < 1)
    throw std::invalid_argument("counts must be >= 1");
  if (cfg.dim != 2 && cfg.dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
}

/// One Euler-Maruyama step in place; wraps into [0, period).
void emStep(const CoefficientField& field, Point& x, double dt, int dim,
            std::mt19937_64& rng, std::normal_distribution<double>& gauss) {
  const Mat3 a = field.a(x);
  const Point b = field.b(x);
  const Point div = field.aDivergence(x);
  for (int k = 0; k < dim; ++k) {
    x[k] += (b[k] + div[k]) * dt + std::sqrt(2.0 * a(k, k) * dt) * gauss(rng);
    x[k] = std::fmod(x[k], field.period);
    if (x[k] < 0.0) x[k] += field.period;
  }
}

McEstimate finalizeMean(const std::vector<double>& values, const std::vector<uint8_t>& keep,
                        std::int64_t censored) {
  McEstimate est;
  est.trajectories = static_cast<std::int64_t>(values.size());
  est.censoredFraction =
      static_cast<double>(censored) / static_cast<double>(est.trajectories);
  est.reliable = est.censoredFraction <= 0.01;
  std::int64_t n = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (keep[i]) {
      sum += values[i];
      ++n;
    }
  if (n == 0) {
    est.reliable = false;
    return est;
  }
  est.mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (keep[i]) {
      const double d = values[i] - est.mean;
      var += d * d;
    }
  if (n > 1) var /= static_cast<double>(n - 1);
  est.standardError = std::sqrt(var / static_cast<double>(n));
  return est;
}

}  // namespace

bool RegionGeometry::contains(const Point& p, double period, int dim) const {
  const bool inBall = minImageDistance(p, ball.center, period, dim) < ball.radius;
  return kind == Kind::Ball ? inBall : !inBall;
}

McEstimate simulateExitTime(const CoefficientField& field, const RegionGeometry& D,
                            const Point& start, const SdeConfig& cfg) {
  validate(cfg);
  if (!D.contains(start, field.period, cfg.dim))
    throw std::invalid_argument("start outside region");

  const std::int64_t N = cfg.trajectories;
  std::vector<double> times(static_cast<std::size_t>(N), 0.0);
  std::vector<uint8_t> keep(static_cast<std::size_t>(N), 0);

#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < N; ++i) {
    std::mt19937_64 rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Point x = start;
    std::int64_t step = 0;
    for (; step < cfg.maxSteps; ++step) {
      emStep(field, x, cfg.dt, cfg.dim, rng, gauss);
      if (!D.contains(x, field.period, cfg.dim)) break;
    }
    if (step < cfg.maxSteps) {
      times[static_cast<std::size_t>(i)] = static_cast<double>(step + 1) * cfg.dt;
      keep[static_cast<std::size_t>(i)] = 1;
    }
  }

  std::int64_t censored = 0;
  for (uint8_t k : keep)
    if (!k) ++censored;
  return finalizeMean(times, keep, censored);
}

McEstimate simulateHittingProbability(const CoefficientField& field, const RegionGeometry& A,
                                      const RegionGeometry& B, const Point& start,
                                      const SdeConfig& cfg) {
  validate(cfg);
  if (A.contains(start, field.period, cfg.dim)) {
    McEstimate est;
    est.mean = 1.0;
    est.trajectories = cfg.trajectories;
    return est;
  }
  if (B.contains(start, field.period, cfg.dim)) {
    McEstimate est;
    est.trajectories = cfg.trajectories;
    return est;
  }

  const std::int64_t N = cfg.trajectories;
  std::vector<uint8_t> hitA(static_cast<std::size_t>(N), 0);
  std::vector<uint8_t> keep(static_cast<std::size_t>(N), 0);

#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < N; ++i) {
    std::mt19937_64 rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Point x = start;
    for (std::int64_t step = 0; step < cfg.maxSteps; ++step) {
      emStep(field, x, cfg.dt, cfg.dim, rng, gauss);
      if (A.contains(x, field.period, cfg.dim)) {
        hitA[static_cast<std::size_t>(i)] = 1;
        keep[static_cast<std::size_t>(i)] = 1;
        break;
      }
      if (B.contains(x, field.period, cfg.dim)) {
        keep[static_cast<std::size_t>(i)] = 1;
        break;
      }
    }
  }

  std::int64_t censored = 0, hits = 0, resolved = 0;
  for (std::int64_t i = 0; i < N; ++i) {
    if (!keep[static_cast<std::size_t>(i)]) {
      ++censored;
      continue;
    }
    ++resolved;
    hits += hitA[static_cast<std::size_t>(i)];
  }
  McEstimate est;
  est.trajectories = N;
  est.censoredFraction = static_cast<double>(censored) / static_cast<double>(N);
  est.reliable = est.censoredFraction <= 0.01;
  if (resolved > 0) {
    const double p = static_cast<double>(hits) / static_cast<double>(resolved);
    est.mean = p;
    est.standardError = std::sqrt(p * (1.0 - p) / static_cast<double>(resolved));
  } else {
    est.reliable = false;
  }
  return est;
}

}  // namespace ptk
