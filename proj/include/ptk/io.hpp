#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "ptk/conditions.hpp"
#include "ptk/montecarlo.hpp"

namespace ptk {

using Json = nlohmann::ordered_json;

/// CSV dump of a cell field: one row per cell with coordinates and value.
void writeFieldCsv(const std::string& path, const TorusGrid& grid,
                   const std::vector<double>& values);

/// Gnuplot-ready axis-aligned slice (splot "file" nonuniform matrix style):
/// blocks of "x y value" rows separated by blank lines, at fixed index along
/// `axis`.
void writeSliceGnuplot(const std::string& path, const TorusGrid& grid,
                       const std::vector<double>& values, int axis, int layer);

Json toJson(const SolveReport& rep);
Json toJson(const CapacityResult& cap);
Json toJson(const IdentityReport& rep);
Json toJson(const McEstimate& est);
Json toJson(const ConditionReport& rep);
Json toJson(const EquivalenceReport& rep);

/// Writes "# timestamp: ..." followed by the pretty-printed JSON body, so
/// byte comparison modulo the first line is deterministic.
void writeReport(const std::string& path, const Json& body);

/// Report body rendered exactly as writeReport emits it, without the
/// timestamp line.
std::string renderReport(const Json& body);

}  // namespace ptk
