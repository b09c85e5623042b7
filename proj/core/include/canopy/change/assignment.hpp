#pragma once

#include <vector>

#include "canopy/raster/grid.hpp"

namespace canopy::change {

// Minimum-cost perfect assignment on a square cost matrix (rows -> cols),
// Jonker-style shortest augmenting paths with potentials, O(N^3).
// Returns row_to_col; costs must be finite.
std::vector<int> solve_assignment(const raster::Grid<double>& cost);

double assignment_cost(const raster::Grid<double>& cost, const std::vector<int>& row_to_col);

} // namespace canopy::change
