#pragma once

#include <string>

#include "pavel/mesh.hpp"

namespace pavel {

struct MeshLoadInfo {
  int degenerate_dropped = 0;
};

// Reads OBJ (ascii), STL (binary or ascii) or PLY (ascii or binary little
// endian), selected by extension. Welds vertices at 1e-9 of the bbox diagonal,
// drops degenerate triangles and recomputes normals. Throws ConfigError on
// unreadable files or unsupported formats, StageError when nothing survives
// cleanup.
TriangleMesh load_mesh(const std::string& path, MeshLoadInfo* info = nullptr);

void save_obj(const TriangleMesh& mesh, const std::string& path);
void save_ply(const TriangleMesh& mesh, const std::string& path, bool binary = true);

}  // namespace pavel
