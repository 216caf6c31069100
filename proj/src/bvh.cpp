#include "udfsw/bvh.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace udfsw {

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

TriangleBvh::TriangleBvh(const TriMesh& mesh) {
  const int nf = mesh.face_count();
  if (nf == 0) throw std::invalid_argument("TriangleBvh: empty mesh");
  tris_.resize(nf);
  tri_centroids_.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const Face& t = mesh.faces[f];
    tris_[f] = {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
    tri_centroids_[f] = mesh.face_centroid(f);
  }
  tri_order_.resize(nf);
  std::iota(tri_order_.begin(), tri_order_.end(), 0);
  nodes_.reserve(2 * nf);
  build(0, nf, 0);
}

int TriangleBvh::build(int begin, int end, int depth) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    for (const Vec3& v : tris_[tri_order_[i]]) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  nodes_[idx].bb_min = lo;
  nodes_[idx].bb_max = hi;
  if (end - begin <= 4 || depth > 48) {
    nodes_[idx].begin = begin;
    nodes_[idx].end = end;
    return idx;
  }
  int axis;
  (hi - lo).maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(tri_order_.begin() + begin, tri_order_.begin() + mid,
                   tri_order_.begin() + end, [&](int a, int b) {
                     return tri_centroids_[a][axis] < tri_centroids_[b][axis];
                   });
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  return idx;
}

double TriangleBvh::box_distance2(const Node& n, const Vec3& p) const {
  const Vec3 d = (n.bb_min - p).cwiseMax(p - n.bb_max).cwiseMax(0.0);
  return d.squaredNorm();
}

void TriangleBvh::query(int node, const Vec3& p, Hit& best) const {
  const Node& n = nodes_[node];
  if (n.leaf()) {
    for (int i = n.begin; i < n.end; ++i) {
      const int t = tri_order_[i];
      const Vec3 q = closest_point_on_triangle(p, tris_[t][0], tris_[t][1], tris_[t][2]);
      const double d = (p - q).norm();
      if (d < best.distance) best = {d, q, t};
    }
    return;
  }
  const double dl = box_distance2(nodes_[n.left], p);
  const double dr = box_distance2(nodes_[n.right], p);
  const int first = dl <= dr ? n.left : n.right;
  const int second = dl <= dr ? n.right : n.left;
  const double dfirst = std::min(dl, dr), dsecond = std::max(dl, dr);
  if (dfirst < best.distance * best.distance) query(first, p, best);
  if (dsecond < best.distance * best.distance) query(second, p, best);
}

TriangleBvh::Hit TriangleBvh::closest(const Vec3& p) const {
  Hit best{std::numeric_limits<double>::max(), Vec3::Zero(), -1};
  query(0, p, best);
  return best;
}

}  // namespace udfsw
