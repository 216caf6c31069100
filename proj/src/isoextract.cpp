#include "udfsw/isoextract.hpp"

#include <cmath>
#include <unordered_map>

namespace udfsw {

namespace {

#include "mc_tables.inc"

// Cube corners: 0..3 bottom ring (y = j) in the x-z plane, 4..7 top ring.
const int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1},
                           {0, 1, 0}, {1, 1, 0}, {1, 1, 1}, {0, 1, 1}};
const int kEdgeCorner[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

// Maps a local cube edge to (base corner, axis) of the global lattice edge.
struct GlobalEdge {
  int base;  // corner index of the lower endpoint
  int axis;  // 0 = x, 1 = y, 2 = z
};
GlobalEdge global_edge(int e) {
  const int a = kEdgeCorner[e][0], b = kEdgeCorner[e][1];
  for (int axis = 0; axis < 3; ++axis) {
    if (kCorner[a][axis] != kCorner[b][axis]) {
      return {kCorner[a][axis] < kCorner[b][axis] ? a : b, axis};
    }
  }
  return {a, 0};  // unreachable
}

}  // namespace

TriMesh marching_cubes_raw(const GridDims& dims, const Box3& bbox,
                           const std::vector<float>& values, double iso) {
  const Vec3 h = bbox.extent().cwiseQuotient(Vec3(dims.x - 1.0, dims.y - 1.0, dims.z - 1.0));
  auto at = [&](int i, int j, int k) -> double {
    double v = values[(static_cast<std::int64_t>(k) * dims.y + j) * dims.x + i];
    // Deterministic tie-break for samples landing exactly on the iso-value.
    if (v == iso) v += 1e-9;
    return v;
  };
  auto lattice = [&](int i, int j, int k) -> Vec3 {
    return bbox.min + Vec3(i * h[0], j * h[1], k * h[2]);
  };

  TriMesh mesh;
  std::unordered_map<std::int64_t, int> edge_vertex;
  // Vertex on the global lattice edge starting at (i,j,k) along axis.
  auto edge_vert = [&](int i, int j, int k, int axis) {
    const std::int64_t key =
        ((static_cast<std::int64_t>(k) * dims.y + j) * dims.x + i) * 3 + axis;
    auto [it, inserted] = edge_vertex.emplace(key, mesh.vertex_count());
    if (inserted) {
      int i2 = i + (axis == 0), j2 = j + (axis == 1), k2 = k + (axis == 2);
      const double va = at(i, j, k), vb = at(i2, j2, k2);
      const double t = (iso - va) / (vb - va);
      mesh.vertices.push_back(lattice(i, j, k) + t * (lattice(i2, j2, k2) - lattice(i, j, k)));
    }
    return it->second;
  };

  for (int k = 0; k + 1 < dims.z; ++k) {
    for (int j = 0; j + 1 < dims.y; ++j) {
      for (int i = 0; i + 1 < dims.x; ++i) {
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          if (at(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]) < iso) {
            cube |= 1 << c;
          }
        }
        if (kEdgeTable[cube] == 0) continue;
        int local[12];
        for (int e = 0; e < 12; ++e) {
          if (!(kEdgeTable[cube] & (1 << e))) continue;
          const GlobalEdge ge = global_edge(e);
          local[e] = edge_vert(i + kCorner[ge.base][0], j + kCorner[ge.base][1],
                               k + kCorner[ge.base][2], ge.axis);
        }
        for (const int* t = kTriTable[cube]; *t != -1; t += 3) {
          // With the below-iso corner convention the table's winding already
          // leaves normals pointing toward increasing field value.
          Face f(local[t[0]], local[t[1]], local[t[2]]);
          if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
          mesh.faces.push_back(f);
        }
      }
    }
  }

  // Drop zero-area triangles created by the vertex merge.
  std::vector<Face> kept;
  kept.reserve(mesh.faces.size());
  for (const Face& f : mesh.faces) {
    const Vec3 n = (mesh.vertices[f[1]] - mesh.vertices[f[0]])
                       .cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
    if (n.squaredNorm() > 0.0) kept.push_back(f);
  }
  mesh.faces = std::move(kept);
  return mesh;
}

TriMesh marching_cubes(const GridField& grid, double r) {
  if (r <= 0.0) throw std::invalid_argument("marching_cubes: iso-value must be > 0");
  TriMesh mesh = marching_cubes_raw(grid.dims(), grid.bbox(), grid.values(), r);
  if (mesh.faces.empty()) {
    throw EmptyLevelSet("no iso-surface at r = " + std::to_string(r) +
                        "; the iso-value is larger than every sample or smaller than all of them");
  }
  return mesh;
}

TriMesh orient_outward(TriMesh mesh, const ScalarField& field) {
  // Edge -> incident (face, direction) pairs; manifoldness check on the way.
  std::unordered_map<std::uint64_t, std::vector<std::pair<int, bool>>> edges;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Face& t = mesh.faces[f];
    for (int c = 0; c < 3; ++c) {
      const int a = t[c], b = t[(c + 1) % 3];
      edges[edge_key(a, b)].emplace_back(f, a < b);
    }
  }
  for (const auto& [key, inc] : edges) {
    if (inc.size() > 2) {
      throw ContractViolation("orient_outward: non-manifold edge with " +
                              std::to_string(inc.size()) + " incident faces");
    }
  }

  // BFS per component, flipping faces to agree with the seed's winding.
  const int nf = mesh.face_count();
  std::vector<int> state(nf, 0);  // 0 unvisited, 1 keep, 2 flip
  std::vector<int> stack, component;
  for (int seed = 0; seed < nf; ++seed) {
    if (state[seed]) continue;
    state[seed] = 1;
    stack.assign(1, seed);
    component.assign(1, seed);
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      const Face t = state[f] == 2
                         ? Face(mesh.faces[f][0], mesh.faces[f][2], mesh.faces[f][1])
                         : mesh.faces[f];
      for (int c = 0; c < 3; ++c) {
        const int a = t[c], b = t[(c + 1) % 3];
        for (const auto& [g, gdir] : edges[edge_key(a, b)]) {
          if (g == f || state[g]) continue;
          // Consistent winding means the shared edge is traversed in
          // opposite directions by the two effective faces.
          const bool my_dir = a < b;
          state[g] = (gdir == my_dir) ? 2 : 1;
          stack.push_back(g);
          component.push_back(g);
        }
      }
    }
    // Decide the component's global flip by the field gradient vote.
    double score = 0.0;
    for (int f : component) {
      Face t = mesh.faces[f];
      if (state[f] == 2) std::swap(t[1], t[2]);
      const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                         .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
      const Vec3 centroid = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
      bool degenerate = false;
      const Vec3 g = field.gradient(centroid, &degenerate);
      if (!degenerate) score += g.dot(n);
    }
    const bool flip_all = score < 0.0;
    for (int f : component) {
      if ((state[f] == 2) != flip_all) std::swap(mesh.faces[f][1], mesh.faces[f][2]);
      state[f] = 1;  // normalize so outer loop skips it
    }
  }
  mesh.invalidate_adjacency();
  return mesh;
}

}  // namespace udfsw
