#pragma once

#include <span>
#include <vector>

#include "fracphase/grid.hpp"

namespace fracphase {

// Exact Euclidean distance from each cell center to the pixel-boundary
// polyline of A, positive inside A, negative outside. Throws when A has no
// boundary (empty or full, including the beyond-collar rule).
std::vector<double> signed_distance(const IndicatorSet& A);

// Same, for the boundary between a cell subset D and its in-grid complement.
std::vector<double> subset_boundary_distance(const BoxDomain& d, std::span<const int> D);

// h^(n-1) times the number of masked/unmasked faces whose two incident cells
// both belong to region.
double pixel_perimeter(const IndicatorSet& E, std::span<const int> region);

}  // namespace fracphase
