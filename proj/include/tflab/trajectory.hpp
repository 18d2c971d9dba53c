#pragma once
// Time series of grid-function snapshots with extracted boundary
// coefficients; produced by the time integrators, consumed by the norm and
// reporting machinery.

#include <vector>

#include "tflab/grid.hpp"

namespace tflab {

struct Trajectory {
    std::vector<double> times;           // times[0] = 0
    std::vector<GridFunction> snapshots; // aligned with times
    std::vector<double> u0_series;
    std::vector<double> ubeta_series;
    std::vector<double> dt_history;

    int size() const { return static_cast<int>(times.size()); }
    bool empty() const { return times.empty(); }
};

} // namespace tflab
