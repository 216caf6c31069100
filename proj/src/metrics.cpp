#include "udfsw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace udfsw {

SampleCloud sample_mesh_surface(const TriMesh& mesh, int count, std::uint64_t seed) {
  if (mesh.faces.empty() || count <= 0) {
    throw std::invalid_argument("sample_mesh_surface: need a non-empty mesh and count > 0");
  }
  const int nf = mesh.face_count();
  std::vector<double> areas(nf);
  double total = 0.0;
  for (int f = 0; f < nf; ++f) total += areas[f] = mesh.face_area(f);
  if (total <= 0.0) throw std::invalid_argument("sample_mesh_surface: zero total area");

  // Largest-remainder apportionment of samples to faces.
  std::vector<int> per_face(nf);
  std::vector<std::pair<double, int>> remainders(nf);
  int assigned = 0;
  for (int f = 0; f < nf; ++f) {
    const double exact = count * areas[f] / total;
    per_face[f] = static_cast<int>(std::floor(exact));
    assigned += per_face[f];
    remainders[f] = {exact - per_face[f], f};
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; i < count - assigned; ++i) per_face[remainders[i].second]++;

  SampleCloud cloud;
  cloud.seed = seed;
  cloud.points.reserve(count);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int f = 0; f < nf; ++f) {
    const Face& t = mesh.faces[f];
    const Vec3 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
    for (int s = 0; s < per_face[f]; ++s) {
      double u = uni(rng), v = uni(rng);
      if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
      }
      cloud.points.push_back(a + u * (b - a) + v * (c - a));
    }
  }
  return cloud;
}

KdTree::KdTree(const std::vector<Vec3>& points) : points_(points) {
  if (points_.empty()) throw std::invalid_argument("KdTree: empty point set");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * points_.size() / 8 + 2);
  build(0, static_cast<int>(points_.size()));
}

int KdTree::build(int begin, int end) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= 8) {
    nodes_[idx].begin = begin;
    nodes_[idx].end = end;
    return idx;
  }
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis;
  (hi - lo).maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  nodes_[idx].axis = axis;
  nodes_[idx].split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  return idx;
}

void KdTree::query(int node, const Vec3& q, int& best, double& best_d2) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      const double d2 = (points_[order_[i]] - q).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && order_[i] < best)) {
        best_d2 = d2;
        best = order_[i];
      }
    }
    return;
  }
  const double delta = q[n.axis] - n.split;
  const int near = delta <= 0.0 ? n.left : n.right;
  const int far = delta <= 0.0 ? n.right : n.left;
  query(near, q, best, best_d2);
  if (delta * delta <= best_d2) query(far, q, best, best_d2);
}

std::pair<int, double> KdTree::nearest(const Vec3& q) const {
  int best = -1;
  double best_d2 = std::numeric_limits<double>::max();
  query(0, q, best, best_d2);
  return {best, std::sqrt(best_d2)};
}

namespace {

double mean_nearest(const std::vector<Vec3>& from, const KdTree& to, bool squared) {
  double sum = 0.0;
  for (const Vec3& p : from) {
    const double d = to.nearest(p).second;
    sum += squared ? d * d : d;
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

ChamferResult chamfer_distance(const SampleCloud& a, const SampleCloud& b, bool squared) {
  if (a.points.empty() || b.points.empty()) {
    throw std::invalid_argument("chamfer_distance: empty cloud");
  }
  KdTree tree_a(a.points), tree_b(b.points);
  ChamferResult r;
  r.a_to_b = mean_nearest(a.points, tree_b, squared);
  r.b_to_a = mean_nearest(b.points, tree_a, squared);
  r.average = 0.5 * (r.a_to_b + r.b_to_a);
  return r;
}

MeshReport mesh_report(const TriMesh& mesh, const SampleCloud& ground_truth,
                       int sample_count, std::uint64_t seed) {
  MeshReport report;
  const SampleCloud pred = sample_mesh_surface(mesh, sample_count, seed);
  report.chamfer = chamfer_distance(ground_truth, pred);
  report.topology = topology_stats(mesh);
  report.vertices = mesh.vertex_count();
  report.faces = mesh.face_count();
  return report;
}

std::string report_csv_header() {
  return "name,cd_gt_to_pred,cd_pred_to_gt,cd_avg,nm_vertices,nm_edges,genus,boundaries,"
         "components,vertices,faces";
}

namespace {

std::string genus_string(const TopologyStats& t) {
  std::string s;
  for (size_t i = 0; i < t.genus_per_component.size(); ++i) {
    if (i) s += '+';
    s += t.genus_per_component[i] < 0 ? "n/a" : std::to_string(t.genus_per_component[i]);
  }
  return s.empty() ? "n/a" : s;
}

}  // namespace

std::string report_csv_row(const std::string& name, const MeshReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%d,%d,%s,%d,%d,%d,%d", name.c_str(),
                r.chamfer.a_to_b * 1e3, r.chamfer.b_to_a * 1e3, r.chamfer.average * 1e3,
                r.topology.non_manifold_vertices, r.topology.non_manifold_edges,
                genus_string(r.topology).c_str(), r.topology.boundary_loops,
                r.topology.components, r.vertices, r.faces);
  return buf;
}

std::string report_pretty(const std::string& name, const MeshReport& r) {
  std::ostringstream out;
  char buf[256];
  out << "  model: " << name << "\n";
  std::snprintf(buf, sizeof(buf),
                "  CD (gt->pred, 1e-3): %.3f\n  CD (pred->gt, 1e-3): %.3f\n"
                "  CD (average, 1e-3):  %.3f\n",
                r.chamfer.a_to_b * 1e3, r.chamfer.b_to_a * 1e3, r.chamfer.average * 1e3);
  out << buf;
  out << "  non-manifold vertices: " << r.topology.non_manifold_vertices
      << "\n  non-manifold edges:    " << r.topology.non_manifold_edges
      << "\n  boundary loops:        " << r.topology.boundary_loops
      << "\n  components:            " << r.topology.components
      << "\n  genus per component:   " << genus_string(r.topology)
      << "\n  vertices/faces:        " << r.vertices << "/" << r.faces << "\n";
  return out.str();
}

}  // namespace udfsw
