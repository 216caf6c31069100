#include "udfsw/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace udfsw {

void TriMesh::ensure_adjacency() const {
  if (adjacency_valid_) return;
  const int nv = static_cast<int>(vertices.size());
  vertex_ring_.assign(nv, {});
  vertex_faces_.assign(nv, {});
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    const Face& t = faces[f];
    for (int c = 0; c < 3; ++c) {
      vertex_faces_[t[c]].push_back(f);
      vertex_ring_[t[c]].push_back(t[(c + 1) % 3]);
      vertex_ring_[t[c]].push_back(t[(c + 2) % 3]);
    }
  }
  for (auto& ring : vertex_ring_) {
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  }
  adjacency_valid_ = true;
}

Vec3 laplacian(const TriMesh& mesh, int vertex, bool* isolated) {
  const auto& ring = mesh.vertex_ring(vertex);
  if (ring.empty()) {
    if (isolated) *isolated = true;
    return Vec3::Zero();
  }
  if (isolated) *isolated = false;
  Vec3 mean = Vec3::Zero();
  for (int j : ring) mean += mesh.vertices[j];
  mean /= static_cast<double>(ring.size());
  return mesh.vertices[vertex] - mean;
}

std::vector<Vec3> vertex_normals(const TriMesh& mesh) {
  std::vector<Vec3> normals(mesh.vertices.size(), Vec3::Zero());
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Vec3 n = mesh.face_normal(f);  // length = 2 * area
    for (int c = 0; c < 3; ++c) normals[mesh.faces[f][c]] += n;
  }
  for (auto& n : normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return normals;
}

namespace {

struct EdgeInfo {
  std::vector<int> faces;
};

using EdgeMap = std::unordered_map<std::uint64_t, EdgeInfo>;

EdgeMap build_edge_map(const TriMesh& mesh) {
  EdgeMap edges;
  edges.reserve(mesh.faces.size() * 2);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Face& t = mesh.faces[f];
    for (int c = 0; c < 3; ++c) {
      edges[edge_key(t[c], t[(c + 1) % 3])].faces.push_back(f);
    }
  }
  return edges;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

TopologyStats topology_stats(const TriMesh& mesh) {
  TopologyStats stats;
  const int nf = mesh.face_count();
  if (nf == 0) return stats;

  EdgeMap edges = build_edge_map(mesh);

  // Edge-connected face components.
  UnionFind uf(nf);
  for (const auto& [key, info] : edges) {
    for (size_t i = 1; i < info.faces.size(); ++i) {
      uf.unite(info.faces[0], info.faces[i]);
    }
  }
  std::unordered_map<int, int> comp_id;
  std::vector<int> face_comp(nf);
  for (int f = 0; f < nf; ++f) {
    int root = uf.find(f);
    auto [it, inserted] = comp_id.emplace(root, static_cast<int>(comp_id.size()));
    face_comp[f] = it->second;
  }
  const int ncomp = static_cast<int>(comp_id.size());
  stats.components = ncomp;

  std::vector<int> comp_faces(ncomp, 0), comp_edges(ncomp, 0), comp_bedges(ncomp, 0);
  std::vector<bool> comp_bad(ncomp, false);
  for (int f = 0; f < nf; ++f) comp_faces[face_comp[f]]++;

  std::vector<std::uint64_t> boundary_edges;
  for (const auto& [key, info] : edges) {
    const int comp = face_comp[info.faces[0]];
    comp_edges[comp]++;
    if (info.faces.size() == 1) {
      comp_bedges[comp]++;
      boundary_edges.push_back(key);
    } else if (info.faces.size() >= 3) {
      stats.non_manifold_edges++;
      comp_bad[comp] = true;
    }
  }

  // Per-component vertex counts. A vertex shared between components only
  // through non-edge contact is counted in each.
  std::vector<std::set<int>> comp_verts(ncomp);
  for (int f = 0; f < nf; ++f) {
    for (int c = 0; c < 3; ++c) comp_verts[face_comp[f]].insert(mesh.faces[f][c]);
  }

  // Non-manifold vertices: the incident-face fan splits into >= 2 groups
  // under shared-edge connectivity restricted to edges through the vertex.
  const int nv = mesh.vertex_count();
  for (int v = 0; v < nv; ++v) {
    const auto& inc = mesh.vertex_faces(v);
    if (inc.size() < 2) continue;
    UnionFind fan(static_cast<int>(inc.size()));
    std::unordered_map<std::uint64_t, int> first_face;
    for (int i = 0; i < static_cast<int>(inc.size()); ++i) {
      const Face& t = mesh.faces[inc[i]];
      for (int c = 0; c < 3; ++c) {
        const int a = t[c], b = t[(c + 1) % 3];
        if (a != v && b != v) continue;
        auto [it, inserted] = first_face.emplace(edge_key(a, b), i);
        if (!inserted) fan.unite(it->second, i);
      }
    }
    int groups = 0;
    for (int i = 0; i < static_cast<int>(inc.size()); ++i) {
      if (fan.find(i) == i) groups++;
    }
    if (groups >= 2) {
      stats.non_manifold_vertices++;
      comp_bad[face_comp[inc[0]]] = true;
    }
  }

  // Boundary loops: connected components of the boundary-edge graph.
  {
    std::unordered_map<int, std::vector<int>> vert_to_bedge;
    for (int i = 0; i < static_cast<int>(boundary_edges.size()); ++i) {
      const int a = static_cast<int>(boundary_edges[i] >> 32);
      const int b = static_cast<int>(boundary_edges[i] & 0xffffffffu);
      vert_to_bedge[a].push_back(i);
      vert_to_bedge[b].push_back(i);
    }
    UnionFind buf(static_cast<int>(boundary_edges.size()));
    for (const auto& [v, list] : vert_to_bedge) {
      for (size_t i = 1; i < list.size(); ++i) buf.unite(list[0], list[i]);
    }
    std::vector<int> comp_loops(ncomp, 0);
    for (int i = 0; i < static_cast<int>(boundary_edges.size()); ++i) {
      if (buf.find(i) == i) {
        stats.boundary_loops++;
        // Attribute the loop to the component of any face on the edge.
        const EdgeInfo& info = edges[boundary_edges[i]];
        comp_loops[face_comp[info.faces[0]]]++;
      }
    }
    stats.genus_per_component.resize(ncomp);
    for (int c = 0; c < ncomp; ++c) {
      if (comp_bad[c]) {
        stats.genus_per_component[c] = -1;
        continue;
      }
      const int chi = static_cast<int>(comp_verts[c].size()) - comp_edges[c] + comp_faces[c];
      stats.genus_per_component[c] = (2 - chi - comp_loops[c]) / 2;
    }
  }
  return stats;
}

TriMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open OBJ file: " + path);
  TriMesh mesh;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p[0] >> p[1] >> p[2])) fail("malformed vertex line");
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        // Strip /vt/vn suffixes.
        const size_t slash = tok.find('/');
        if (slash != std::string::npos) tok = tok.substr(0, slash);
        int v = 0;
        try {
          v = std::stoi(tok);
        } catch (...) {
          fail("malformed face index '" + tok + "'");
        }
        if (v == 0) fail("OBJ indices are 1-based; 0 is invalid");
        // Negative indices count back from the current vertex list.
        const int resolved = v > 0 ? v - 1 : static_cast<int>(mesh.vertices.size()) + v;
        if (resolved < 0 || resolved >= static_cast<int>(mesh.vertices.size())) {
          fail("face index out of range");
        }
        idx.push_back(resolved);
      }
      if (idx.size() < 3) fail("face with fewer than 3 vertices");
      for (size_t i = 2; i < idx.size(); ++i) {
        mesh.faces.push_back(Face(idx[0], idx[i - 1], idx[i]));
      }
    }
    // Other tags (vn, vt, usemtl, ...) are ignored.
  }
  return mesh;
}

void save_obj(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write OBJ file: " + path);
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v[0], v[1], v[2]);
    out << buf;
  }
  for (const Face& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  if (!out) throw std::runtime_error("write failure: " + path);
}

void save_ply(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PLY file: " + path);
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.faces.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (const Vec3& v : mesh.vertices) {
    out.write(reinterpret_cast<const char*>(v.data()), 3 * sizeof(double));
  }
  for (const Face& f : mesh.faces) {
    const unsigned char n = 3;
    out.write(reinterpret_cast<const char*>(&n), 1);
    out.write(reinterpret_cast<const char*>(f.data()), 3 * sizeof(int));
  }
  if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace udfsw
