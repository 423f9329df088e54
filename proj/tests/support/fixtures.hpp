#pragma once

#include "squidsim/experiments.hpp"

namespace squidsim::testsupport {

/// Canonical double-well coefficients used across the suites.
inline QuarticPotential reference_quartic() { return QuarticPotential(1.80487, 14.73360); }

/// Calibrated model shared within a test binary: capacitance bisected so that
/// E0 = -0.0440591 eV on the default grid, 8 levels.
inline const ModelSetup& calibrated_setup() {
    static const ModelSetup setup = [] {
        ExperimentConfig cfg = default_config();
        return build_setup(cfg);
    }();
    return setup;
}

/// Sorted, uniform sample times.
inline std::vector<double> linspace(double t0, double t1, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
    return out;
}

} // namespace squidsim::testsupport
