#pragma once

#include "pavel/grid.hpp"
#include "pavel/mesh.hpp"

namespace pavel {

// Extracts the `level` isosurface of the sampled field with the classic
// 256-case cube table. Vertices lie on lattice edges where values straddle
// the level (linear interpolation) and are shared through an edge-keyed map,
// so closed level sets come out watertight. Throws StageError when the level
// is outside the grid value range.
TriangleMesh extract_isosurface(const ScalarGrid& grid, double level);

// Occupancy boundary as a 0.5 isosurface of the binary field, padded by one
// empty layer so the result closes at the grid boundary.
TriangleMesh extract_occupancy_surface(const VoxelGrid& grid);

}  // namespace pavel
