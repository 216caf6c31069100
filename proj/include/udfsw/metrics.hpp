#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "udfsw/mesh.hpp"

namespace udfsw {

/// Deterministic area-uniform surface samples (or a point cloud given
/// directly). Per-face counts follow face areas with largest-remainder
/// rounding.
struct SampleCloud {
  std::vector<Vec3> points;
  std::uint64_t seed = 0;
};

SampleCloud sample_mesh_surface(const TriMesh& mesh, int count, std::uint64_t seed);

/// Exact nearest-neighbor index over a fixed point set.
class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& points);
  // Returns (index, distance) of the nearest point.
  std::pair<int, double> nearest(const Vec3& q) const;

 private:
  struct Node {
    int axis = -1;      // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };
  int build(int begin, int end);
  void query(int node, const Vec3& q, int& best, double& best_d2) const;

  std::vector<Node> nodes_;
  std::vector<int> order_;
  std::vector<Vec3> points_;
};

struct ChamferResult {
  double a_to_b = 0.0;  // mean distance from points of a to nearest in b
  double b_to_a = 0.0;
  double average = 0.0;
};

// Unsquared L2 Chamfer distance. squared=true switches both directions to
// mean squared distances for cross-paper comparison.
ChamferResult chamfer_distance(const SampleCloud& a, const SampleCloud& b,
                               bool squared = false);

struct MeshReport {
  ChamferResult chamfer;  // prediction vs ground truth; a = ground truth side
  TopologyStats topology;
  int vertices = 0;
  int faces = 0;
};

// 10k-point seeded sampling of `mesh` against the ground-truth cloud.
MeshReport mesh_report(const TriMesh& mesh, const SampleCloud& ground_truth,
                       int sample_count = 10000, std::uint64_t seed = 20240101);

// CSV row in the order: cd_gt_to_pred, cd_pred_to_gt, cd_avg (all x1e3),
// nm_vertices, nm_edges, genus (or n/a), boundaries, components, vertices, faces.
std::string report_csv_header();
std::string report_csv_row(const std::string& name, const MeshReport& report);
std::string report_pretty(const std::string& name, const MeshReport& report);

}  // namespace udfsw
