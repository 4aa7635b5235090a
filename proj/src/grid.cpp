#include "pavel/grid.hpp"

#include <fstream>
#include <limits>

#include "pavel/errors.hpp"

namespace pavel {

int64_t VoxelGrid::occupied_count() const {
  int64_t n = 0;
  for (auto v : occupancy) n += v != 0;
  return n;
}

int64_t pack_lattice(const IVec3& g) {
  const int64_t bias = int64_t{1} << 20;
  return ((g[0] + bias) << 42) | ((g[1] + bias) << 21) | (g[2] + bias);
}

IVec3 unpack_lattice(int64_t key) {
  const int64_t bias = int64_t{1} << 20;
  const int64_t mask = (int64_t{1} << 21) - 1;
  return {((key >> 42) & mask) - bias, ((key >> 21) & mask) - bias, (key & mask) - bias};
}

namespace {

constexpr double kFarAway = 1e18;

// 1D squared-distance lower envelope pass
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    for (;;) {
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * static_cast<double>(q - v[k]) + f[v[k]];
  }
}

}  // namespace

std::vector<double> distance_transform_squared(const std::array<int, 3>& dims,
                                               const std::vector<uint8_t>& seeds) {
  int nx = dims[0], ny = dims[1], nz = dims[2];
  auto idx = [&](int i, int j, int k) { return (static_cast<size_t>(k) * ny + j) * nx + i; };
  std::vector<double> dist(seeds.size());
  for (size_t i = 0; i < seeds.size(); ++i) dist[i] = seeds[i] ? 0.0 : kFarAway;

  std::vector<int> v;
  std::vector<double> z, f(std::max({nx, ny, nz})), d(std::max({nx, ny, nz}));
  // x pass
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) f[i] = dist[idx(i, j, k)];
      edt_1d(f.data(), d.data(), nx, v, z);
      for (int i = 0; i < nx; ++i) dist[idx(i, j, k)] = d[i];
    }
  // y pass
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) f[j] = dist[idx(i, j, k)];
      edt_1d(f.data(), d.data(), ny, v, z);
      for (int j = 0; j < ny; ++j) dist[idx(i, j, k)] = d[j];
    }
  // z pass
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      for (int k = 0; k < nz; ++k) f[k] = dist[idx(i, j, k)];
      edt_1d(f.data(), d.data(), nz, v, z);
      for (int k = 0; k < nz; ++k) dist[idx(i, j, k)] = d[k];
    }
  return dist;
}

namespace {

void write_vtk_header(std::ofstream& out, const Vec3& origin, double edge,
                      const std::array<int, 3>& dims) {
  out << "# vtk DataFile Version 3.0\npavel grid\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << dims[0] << " " << dims[1] << " " << dims[2] << "\n";
  out << "ORIGIN " << origin.x + 0.5 * edge << " " << origin.y + 0.5 * edge << " "
      << origin.z + 0.5 * edge << "\n";
  out << "SPACING " << edge << " " << edge << " " << edge << "\n";
  out << "POINT_DATA " << static_cast<int64_t>(dims[0]) * dims[1] * dims[2] << "\n";
}

}  // namespace

void write_vtk(const VoxelGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_vtk_header(out, grid.origin(), grid.voxel_edge, grid.dims);
  out << "SCALARS occupancy int 1\nLOOKUP_TABLE default\n";
  for (auto v : grid.occupancy) out << int(v) << "\n";
}

void write_vtk(const ScalarGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_vtk_header(out, grid.origin, grid.voxel_edge, grid.dims);
  out << "SCALARS value double 1\nLOOKUP_TABLE default\n";
  out.precision(9);
  for (auto v : grid.values) out << v << "\n";
}

}  // namespace pavel
