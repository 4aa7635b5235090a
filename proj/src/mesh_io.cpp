#include "pavel/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pavel/errors.hpp"

namespace pavel {

namespace {

std::string lower_extension(const std::string& path) {
  auto pos = path.find_last_of('.');
  if (pos == std::string::npos) return "";
  auto ext = path.substr(pos + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

TriangleMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v.x >> v.y >> v.z;
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        // accept v, v/vt, v/vt/vn, v//vn
        int i = std::stoi(tok.substr(0, tok.find('/')));
        if (i < 0) i = static_cast<int>(mesh.vertices.size()) + i + 1;
        idx.push_back(i - 1);
      }
      for (size_t k = 2; k < idx.size(); ++k)  // fan-triangulate polygons
        mesh.triangles.push_back({idx[0], static_cast<int>(idx[k - 1]), static_cast<int>(idx[k])});
    }
  }
  return mesh;
}

TriangleMesh read_stl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  char header[80] = {};
  in.read(header, 80);
  uint32_t count = 0;
  in.read(reinterpret_cast<char*>(&count), 4);
  in.seekg(0, std::ios::end);
  auto file_size = static_cast<uint64_t>(in.tellg());
  bool is_binary = in && file_size == 84ull + 50ull * count;
  TriangleMesh mesh;
  if (is_binary) {
    in.seekg(84);
    for (uint32_t f = 0; f < count; ++f) {
      float data[12];
      in.read(reinterpret_cast<char*>(data), 48);
      uint16_t attr;
      in.read(reinterpret_cast<char*>(&attr), 2);
      int base = static_cast<int>(mesh.vertices.size());
      for (int v = 0; v < 3; ++v)
        mesh.vertices.push_back({data[3 + 3 * v], data[4 + 3 * v], data[5 + 3 * v]});
      mesh.triangles.push_back({base, base + 1, base + 2});
    }
  } else {
    in.close();
    std::ifstream ain(path);
    std::string tok;
    std::vector<Vec3> tri;
    while (ain >> tok) {
      if (tok == "vertex") {
        Vec3 v;
        ain >> v.x >> v.y >> v.z;
        tri.push_back(v);
        if (tri.size() == 3) {
          int base = static_cast<int>(mesh.vertices.size());
          for (auto& p : tri) mesh.vertices.push_back(p);
          mesh.triangles.push_back({base, base + 1, base + 2});
          tri.clear();
        }
      }
    }
  }
  return mesh;
}

struct PlyProperty {
  std::string type;
  std::string name;
  std::string count_type;  // non-empty for lists
};

double read_ply_scalar(std::ifstream& in, const std::string& type) {
  auto read_as = [&](auto v) -> double {
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return static_cast<double>(v);
  };
  if (type == "float" || type == "float32") return read_as(float{});
  if (type == "double" || type == "float64") return read_as(double{});
  if (type == "char" || type == "int8") return read_as(int8_t{});
  if (type == "uchar" || type == "uint8") return read_as(uint8_t{});
  if (type == "short" || type == "int16") return read_as(int16_t{});
  if (type == "ushort" || type == "uint16") return read_as(uint16_t{});
  if (type == "int" || type == "int32") return read_as(int32_t{});
  if (type == "uint" || type == "uint32") return read_as(uint32_t{});
  throw ConfigError("unsupported ply property type: " + type);
}

TriangleMesh read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw ConfigError("not a ply file: " + path);

  bool binary = false;
  struct Element {
    std::string name;
    size_t count = 0;
    std::vector<PlyProperty> props;
  };
  std::vector<Element> elements;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian")
        binary = true;
      else if (fmt != "ascii")
        throw ConfigError("unsupported ply format: " + fmt);
    } else if (tag == "element") {
      Element e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        ls >> p.count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ls >> p.name;
      }
      if (elements.empty()) throw ConfigError("ply property before element");
      elements.back().props.push_back(p);
    } else if (tag == "end_header") {
      break;
    }
  }

  TriangleMesh mesh;
  for (auto& e : elements) {
    for (size_t i = 0; i < e.count; ++i) {
      if (binary) {
        Vec3 v;
        std::vector<int> face;
        for (auto& p : e.props) {
          if (!p.count_type.empty()) {
            int n = static_cast<int>(read_ply_scalar(in, p.count_type));
            for (int k = 0; k < n; ++k) {
              double val = read_ply_scalar(in, p.type);
              if (e.name == "face" && p.name.find("ind") != std::string::npos)
                face.push_back(static_cast<int>(val));
            }
          } else {
            double val = read_ply_scalar(in, p.type);
            if (p.name == "x") v.x = val;
            if (p.name == "y") v.y = val;
            if (p.name == "z") v.z = val;
          }
        }
        if (e.name == "vertex") mesh.vertices.push_back(v);
        for (size_t k = 2; k < face.size(); ++k)
          mesh.triangles.push_back({face[0], face[k - 1], face[k]});
      } else {
        std::getline(in, line);
        std::istringstream ls(line);
        if (e.name == "vertex") {
          Vec3 v;
          double val;
          for (auto& p : e.props) {
            ls >> val;
            if (p.name == "x") v.x = val;
            if (p.name == "y") v.y = val;
            if (p.name == "z") v.z = val;
          }
          mesh.vertices.push_back(v);
        } else if (e.name == "face") {
          int n;
          ls >> n;
          std::vector<int> face(n);
          for (auto& f : face) ls >> f;
          for (size_t k = 2; k < face.size(); ++k)
            mesh.triangles.push_back({face[0], face[k - 1], face[k]});
        }
      }
    }
  }
  return mesh;
}

}  // namespace

TriangleMesh load_mesh(const std::string& path, MeshLoadInfo* info) {
  auto ext = lower_extension(path);
  TriangleMesh mesh;
  if (ext == "obj")
    mesh = read_obj(path);
  else if (ext == "stl")
    mesh = read_stl(path);
  else if (ext == "ply")
    mesh = read_ply(path);
  else
    throw ConfigError("unsupported mesh format: ." + ext + " (" + path + ")");

  for (auto& t : mesh.triangles)
    for (int i : t)
      if (i < 0 || i >= static_cast<int>(mesh.vertices.size()))
        throw ConfigError("triangle index out of range in " + path);

  weld_vertices(mesh, 1e-9 * mesh.bbox().diagonal());
  int dropped = remove_degenerate_triangles(mesh);
  if (info) info->degenerate_dropped = dropped;
  if (mesh.triangles.empty()) throw StageError("mesh empty after cleanup: " + path);
  compute_vertex_normals(mesh);
  return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out.precision(12);
  for (auto& v : mesh.vertices) out << "v " << v.x << " " << v.y << " " << v.z << "\n";
  for (auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
}

void save_ply(const TriangleMesh& mesh, const std::string& path, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "element face " << mesh.triangles.size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  if (binary) {
    for (auto& v : mesh.vertices) {
      float f[3] = {static_cast<float>(v.x), static_cast<float>(v.y), static_cast<float>(v.z)};
      out.write(reinterpret_cast<char*>(f), 12);
    }
    for (auto& t : mesh.triangles) {
      uint8_t n = 3;
      out.write(reinterpret_cast<char*>(&n), 1);
      int32_t idx[3] = {t[0], t[1], t[2]};
      out.write(reinterpret_cast<char*>(idx), 12);
    }
  } else {
    out.precision(9);
    for (auto& v : mesh.vertices) out << v.x << " " << v.y << " " << v.z << "\n";
    for (auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  }
}

}  // namespace pavel
