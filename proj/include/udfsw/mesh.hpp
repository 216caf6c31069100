#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace udfsw {

using Vec3 = Eigen::Vector3d;
using Face = Eigen::Vector3i;

/// Indexed triangle mesh in unit-box coordinates with lazily built adjacency.
/// Mutating positions keeps adjacency valid; editing the face list requires
/// invalidate_adjacency().
class TriMesh {
 public:
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  TriMesh() = default;
  TriMesh(std::vector<Vec3> v, std::vector<Face> f)
      : vertices(std::move(v)), faces(std::move(f)) {}

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  void invalidate_adjacency() { adjacency_valid_ = false; }

  // 1-ring vertex neighbors of vertex i (unique, unordered).
  const std::vector<int>& vertex_ring(int i) const {
    ensure_adjacency();
    return vertex_ring_[i];
  }
  // Faces incident to vertex i.
  const std::vector<int>& vertex_faces(int i) const {
    ensure_adjacency();
    return vertex_faces_[i];
  }

  Vec3 face_centroid(int f) const {
    const Face& t = faces[f];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
  }

  Vec3 face_normal(int f) const {
    const Face& t = faces[f];
    return (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
  }

  double face_area(int f) const { return 0.5 * face_normal(f).norm(); }

 private:
  void ensure_adjacency() const;

  mutable bool adjacency_valid_ = false;
  mutable std::vector<std::vector<int>> vertex_ring_;
  mutable std::vector<std::vector<int>> vertex_faces_;
};

// Uniform (umbrella) Laplacian: p_i minus the mean of its 1-ring.
// Isolated vertices yield the zero vector; *isolated is set when supplied.
Vec3 laplacian(const TriMesh& mesh, int vertex, bool* isolated = nullptr);

// Area-weighted vertex normals, normalized. Vertices whose incident faces all
// have zero area get a zero normal.
std::vector<Vec3> vertex_normals(const TriMesh& mesh);

struct TopologyStats {
  int components = 0;
  int non_manifold_vertices = 0;
  int non_manifold_edges = 0;
  int boundary_loops = 0;
  // One entry per edge-connected face component; -1 means undefined
  // (component touches a non-manifold edge or vertex).
  std::vector<int> genus_per_component;
};

TopologyStats topology_stats(const TriMesh& mesh);

// I/O. OBJ is ASCII; PLY is binary little-endian. Parse failures throw
// std::runtime_error with a line number.
TriMesh load_obj(const std::string& path);
void save_obj(const TriMesh& mesh, const std::string& path);
void save_ply(const TriMesh& mesh, const std::string& path);

// Packs an undirected edge into a map key.
inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace udfsw
