#pragma once

#include <string>
#include <vector>

#include "udfsw/mesh.hpp"
#include "udfsw/optimizer.hpp"

namespace udfsw {

/// Edge-connected set of high-weight faces with its rim description.
struct RegionCluster {
  std::vector<int> faces;
  std::vector<std::vector<int>> boundary_loops;  // closed vertex cycles
  bool has_ambient_boundary = false;  // touches a mesh boundary edge
  bool pinched = false;               // rim loops share a vertex

  // Columnar = exactly two closed rim curves, no ambient boundary.
  bool columnar() const {
    return !pinched && !has_ambient_boundary && boundary_loops.size() == 2;
  }
};

// Maximal edge-connected components of {faces : weight > w_s}; components
// smaller than min_cluster_faces are discarded.
std::vector<RegionCluster> cluster_high_weight_faces(const TriMesh& mesh,
                                                     const std::vector<double>& face_weights,
                                                     double w_s, int min_cluster_faces = 10);

// Removes the columnar cluster and caps both rim loops with minimum-area
// triangulations, refined where triangles are oversized. Unreferenced
// vertices are compacted and `state` is remapped in place. Returns false
// without touching anything when the cluster must be skipped (pinched rim
// or oversized loop); *why receives the reason.
bool excise_and_fill(TriMesh& mesh, OptimizerState& state, const RegionCluster& cluster,
                     std::string* why = nullptr);

// Red-green subdivision: faces with weight > w_s split 1->4, neighbors
// split 1->2 or 1->3 so no T-junctions remain. Returns the number of red
// faces split. `state` grows consistently (new vertices active, moments
// zero, accumulated loss interpolated).
int subdivide_high_weight(TriMesh& mesh, OptimizerState& state, double w_s);

}  // namespace udfsw
