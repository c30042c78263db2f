#include "ptk/io.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>

namespace ptk {

namespace {

std::ofstream openOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out.precision(17);
  return out;
}

Json ballJson(const BallSpec& b) {
  return Json{{"center", {b.center[0], b.center[1], b.center[2]}}, {"radius", b.radius}};
}

}  // namespace

void writeFieldCsv(const std::string& path, const TorusGrid& grid,
                   const std::vector<double>& values) {
  if (static_cast<Index>(values.size()) != grid.cellCount())
    throw std::invalid_argument("field size mismatch");
  std::ofstream out = openOut(path);
  out << (grid.dim == 3 ? "x,y,z,value\n" : "x,y,value\n");
  for (Index c = 0; c < grid.cellCount(); ++c) {
    const Point p = grid.cellCenter(c);
    for (int k = 0; k < grid.dim; ++k) out << p[k] << ",";
    out << values[static_cast<std::size_t>(c)] << "\n";
  }
}

void writeSliceGnuplot(const std::string& path, const TorusGrid& grid,
                       const std::vector<double>& values, int axis, int layer) {
  if (static_cast<Index>(values.size()) != grid.cellCount())
    throw std::invalid_argument("field size mismatch");
  if (axis < 0 || axis >= grid.dim) throw std::invalid_argument("axis out of range");
  if (layer < 0 || layer >= grid.cellsPerSide) throw std::invalid_argument("layer out of range");
  const int ax0 = (axis + 1) % grid.dim;
  const int ax1 = grid.dim == 2 ? -1 : (axis + 2) % grid.dim;

  std::ofstream out = openOut(path);
  const int n = grid.cellsPerSide;
  std::array<int, 3> idx{0, 0, 0};
  idx[axis] = layer;
  for (int i = 0; i < n; ++i) {
    idx[ax0] = i;
    if (ax1 < 0) {
      const Index c = grid.linearIndex(idx[0], idx[1], idx[2]);
      const Point p = grid.cellCenter(c);
      out << p[ax0] << " " << values[static_cast<std::size_t>(c)] << "\n";
      continue;
    }
    for (int j = 0; j < n; ++j) {
      idx[ax1] = j;
      const Index c = grid.linearIndex(idx[0], idx[1], idx[2]);
      const Point p = grid.cellCenter(c);
      out << p[ax0] << " " << p[ax1] << " " << values[static_cast<std::size_t>(c)] << "\n";
    }
    out << "\n";
  }
}

// Wall-clock seconds are deliberately left out: reports must be byte-stable
// across runs with the same seed.
Json toJson(const SolveReport& rep) {
  return Json{{"iterations", rep.iterations},
              {"relative_residual", rep.relativeResidual},
              {"converged", rep.converged}};
}

Json toJson(const CapacityResult& cap) {
  return Json{{"energy", cap.energy},
              {"flux", cap.flux},
              {"relative_mismatch", cap.relativeMismatch}};
}

Json toJson(const IdentityReport& rep) {
  Json details = Json::object();
  for (const auto& [key, value] : rep.details) details[key] = value;
  return Json{{"name", rep.name},
              {"max_residual", rep.maxResidual},
              {"pass", rep.pass},
              {"details", details}};
}

Json toJson(const McEstimate& est) {
  return Json{{"provenance", "mc"},
              {"mean", est.mean},
              {"standard_error", est.standardError},
              {"trajectories", est.trajectories},
              {"censored_fraction", est.censoredFraction},
              {"reliable", est.reliable}};
}

Json toJson(const ConditionReport& rep) {
  Json rows = Json::array();
  for (const BallResult& row : rep.rows)
    rows.push_back(Json{{"ball", ballJson(row.ball)},
                        {"c_upper", row.cUpper},
                        {"c_lower", row.cLower},
                        {"lower_defined", row.lowerDefined}});
  return Json{{"condition", rep.condition},
              {"generator", rep.generatorTag},
              {"parameter", rep.parameter},
              {"seed", rep.seed},
              {"rows", rows},
              {"worst_upper", rep.worstUpper},
              {"worst_lower", rep.worstLower},
              {"pass", rep.pass}};
}

Json toJson(const EquivalenceReport& rep) {
  return Json{{"coarse", {{"C", toJson(rep.coarseC)}, {"G", toJson(rep.coarseG)},
                          {"E_dual", toJson(rep.coarseE)}}},
              {"fine", {{"C", toJson(rep.fineC)}, {"G", toJson(rep.fineG)},
                        {"E_dual", toJson(rep.fineE)}}},
              {"stability_factor", rep.stabilityFactor},
              {"verdict", rep.verdict ? "pass" : "fail"}};
}

std::string renderReport(const Json& body) { return body.dump(2) + "\n"; }

void writeReport(const std::string& path, const Json& body) {
  std::ofstream out = openOut(path);
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  out << "# timestamp: " << buf << "\n";
  out << renderReport(body);
}

}  // namespace ptk
