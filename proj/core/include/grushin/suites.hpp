// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <grushin/chart.hpp>
#include <grushin/report.hpp>

#include <functional>
#include <vector>

namespace grushin {

// Deterministic stratified sample cloud: r stratified over [0.5, 2], theta
// uniform on the sphere, y components uniform in [-1.5, 1.5]. Always clear
// of the singular guard.
std::vector<CylindricalPoint> sample_points(const SuiteConfig& cfg);

// Index-keyed worker pool. Results must go into per-index slots so that
// scheduling order cannot leak into the report; the first exception (by
// index, not by time) is rethrown.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

// Runs the named suites ({curvature, cones, conformal, umbilic, distance}
// or "all") and assembles the machine-readable report. ConfigError on
// unknown names or invalid parameters.
SuiteReport run_suite(const SuiteConfig& cfg);

}  // namespace grushin
