#pragma once

#include <array>
#include <vector>

#include "udfsw/mesh.hpp"

namespace udfsw {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Axis-aligned bounding box tree over triangles for exact closest-point
/// queries. Read-only after construction.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriMesh& mesh);

  struct Hit {
    double distance;
    Vec3 point;     // closest point on the surface
    int triangle;   // index into the source mesh
  };
  Hit closest(const Vec3& p) const;

 private:
  struct Node {
    Vec3 bb_min, bb_max;
    int left = -1, right = -1;  // internal children
    int begin = 0, end = 0;     // leaf triangle range
    bool leaf() const { return left < 0; }
  };

  int build(int begin, int end, int depth);
  void query(int node, const Vec3& p, Hit& best) const;
  double box_distance2(const Node& n, const Vec3& p) const;

  std::vector<Node> nodes_;
  std::vector<int> tri_order_;
  std::vector<std::array<Vec3, 3>> tris_;
  std::vector<Vec3> tri_centroids_;
};

}  // namespace udfsw
