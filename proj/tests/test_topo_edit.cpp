#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "udfsw/mesh.hpp"
#include "udfsw/optimizer.hpp"
#include "udfsw/topo_edit.hpp"

using namespace udfsw;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed capped cylinder: `nr` rings of `nv` vertices plus two cap hubs,
// consistently outward-oriented. Side faces come first, caps last.
struct Cylinder {
  TriMesh mesh;
  int nv = 0, nr = 0;
  // Side faces of the band between ring j and j+1.
  std::vector<int> band(int j) const {
    std::vector<int> out;
    for (int i = 0; i < 2 * nv; ++i) out.push_back(2 * nv * j + i);
    return out;
  }
};

Cylinder make_cylinder(int nv, int nr, double radius = 0.1, double z0 = -0.2,
                       double height = 0.4) {
  Cylinder c;
  c.nv = nv;
  c.nr = nr;
  TriMesh& m = c.mesh;
  const double dz = height / (nr - 1);
  for (int j = 0; j < nr; ++j) {
    for (int i = 0; i < nv; ++i) {
      const double a = 2.0 * kPi * i / nv;
      m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), z0 + j * dz);
    }
  }
  const int hub_b = m.vertex_count();
  m.vertices.emplace_back(0, 0, z0);
  const int hub_t = m.vertex_count();
  m.vertices.emplace_back(0, 0, z0 + height);
  for (int j = 0; j + 1 < nr; ++j) {
    for (int i = 0; i < nv; ++i) {
      const int a = j * nv + i, b = j * nv + (i + 1) % nv;
      const int cc = (j + 1) * nv + (i + 1) % nv, d = (j + 1) * nv + i;
      m.faces.emplace_back(a, b, cc);
      m.faces.emplace_back(a, cc, d);
    }
  }
  for (int i = 0; i < nv; ++i) {
    m.faces.emplace_back(hub_b, (i + 1) % nv, i);
    m.faces.emplace_back(hub_t, (nr - 1) * nv + i, (nr - 1) * nv + (i + 1) % nv);
  }
  return c;
}

OptimizerState fresh_state(const TriMesh& m) {
  OptimizerState s;
  s.init(m.vertex_count(), m.face_count());
  return s;
}

int euler(const TriMesh& m) {
  std::set<std::uint64_t> edges;
  for (const Face& f : m.faces)
    for (int c = 0; c < 3; ++c) edges.insert(edge_key(f[c], f[(c + 1) % 3]));
  return m.vertex_count() - static_cast<int>(edges.size()) + m.face_count();
}

int max_edge_valence(const TriMesh& m) {
  std::map<std::uint64_t, int> count;
  for (const Face& f : m.faces)
    for (int c = 0; c < 3; ++c) count[edge_key(f[c], f[(c + 1) % 3])]++;
  int worst = 0;
  for (const auto& [e, n] : count) worst = std::max(worst, n);
  return worst;
}

void check_state_sizes(const TriMesh& m, const OptimizerState& s) {
  CHECK(s.vertex_count() == m.vertex_count());
  CHECK(static_cast<int>(s.accum_vertex.size()) == m.vertex_count());
  CHECK(static_cast<int>(s.w_sa_vertex.size()) == m.vertex_count());
  CHECK(static_cast<int>(s.active.size()) == m.vertex_count());
  CHECK(static_cast<int>(s.cached_f_vertex.size()) == m.vertex_count());
  CHECK(s.face_count() == m.face_count());
  CHECK(static_cast<int>(s.w_sa_face.size()) == m.face_count());
  CHECK(static_cast<int>(s.cached_f_face.size()) == m.face_count());
}

}  // namespace

TEST_CASE("no clusters when every weight is below threshold") {
  const Cylinder c = make_cylinder(8, 4);
  const std::vector<double> w(c.mesh.face_count(), 1.0);
  CHECK(cluster_high_weight_faces(c.mesh, w, 2.0, 1).empty());
}

TEST_CASE("clusters below the minimum size are dropped") {
  const Cylinder c = make_cylinder(8, 4);
  std::vector<double> w(c.mesh.face_count(), 1.0);
  w[0] = w[1] = 5.0;  // two adjacent faces
  CHECK(cluster_high_weight_faces(c.mesh, w, 2.0, 3).empty());
  CHECK(cluster_high_weight_faces(c.mesh, w, 2.0, 2).size() == 1);
}

TEST_CASE("mid-band on a closed cylinder is columnar with two rim loops") {
  const Cylinder c = make_cylinder(10, 4);
  std::vector<double> w(c.mesh.face_count(), 1.0);
  for (int f : c.band(1)) w[f] = 5.0;
  const auto clusters = cluster_high_weight_faces(c.mesh, w, 2.0, 1);
  REQUIRE(clusters.size() == 1);
  const RegionCluster& cl = clusters[0];
  CHECK(cl.faces.size() == 20);
  CHECK_FALSE(cl.has_ambient_boundary);
  CHECK_FALSE(cl.pinched);
  REQUIRE(cl.boundary_loops.size() == 2);
  CHECK(cl.columnar());
  for (const auto& loop : cl.boundary_loops) CHECK(loop.size() == 10);
  // The loops are exactly rings 1 and 2.
  std::set<int> loop_verts;
  for (const auto& loop : cl.boundary_loops) loop_verts.insert(loop.begin(), loop.end());
  std::set<int> expect;
  for (int i = 10; i < 30; ++i) expect.insert(i);
  CHECK(loop_verts == expect);
}

TEST_CASE("disk-shaped patch has one rim loop and is not columnar") {
  const Cylinder c = make_cylinder(8, 3);
  std::vector<double> w(c.mesh.face_count(), 1.0);
  // The whole bottom cap fan: a disk.
  for (int f = 0; f < c.mesh.face_count(); ++f) {
    const Face& t = c.mesh.faces[f];
    if (t[0] == 8 * 3) w[f] = 5.0;  // bottom hub id = nv * nr
  }
  const auto clusters = cluster_high_weight_faces(c.mesh, w, 2.0, 1);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].boundary_loops.size() == 1);
  CHECK_FALSE(clusters[0].columnar());
}

TEST_CASE("cluster touching a mesh boundary is flagged ambient") {
  // Strip with open boundary: one band of a cylinder without caps.
  Cylinder c = make_cylinder(8, 2);
  c.mesh.faces.resize(16);  // keep only the side faces
  c.mesh.invalidate_adjacency();
  std::vector<double> w(c.mesh.face_count(), 5.0);
  const auto clusters = cluster_high_weight_faces(c.mesh, w, 2.0, 1);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].has_ambient_boundary);
  CHECK_FALSE(clusters[0].columnar());
}

TEST_CASE("excising the mid-band splits the cylinder into two closed parts") {
  Cylinder c = make_cylinder(12, 4);
  OptimizerState s = fresh_state(c.mesh);
  // Mark the band in both the weights and the per-face state.
  for (int f : c.band(1)) s.w_sa_face[f] = 5.0;
  const auto clusters = cluster_high_weight_faces(c.mesh, s.w_sa_face, 2.0, 1);
  REQUIRE(clusters.size() == 1);
  REQUIRE(clusters[0].columnar());

  const int faces_before = c.mesh.face_count();
  std::string why;
  REQUIRE(excise_and_fill(c.mesh, s, clusters[0], &why));

  const auto stats = topology_stats(c.mesh);
  CHECK(stats.components == 2);
  CHECK(stats.boundary_loops == 0);
  CHECK(stats.non_manifold_edges == 0);
  CHECK(stats.non_manifold_vertices == 0);
  CHECK(stats.genus_per_component == std::vector<int>{0, 0});
  CHECK(euler(c.mesh) == 4);  // two spheres
  CHECK(c.mesh.face_count() < faces_before);
  check_state_sizes(c.mesh, s);
}

TEST_CASE("triangular rim loops are filled with a single triangle each") {
  Cylinder c = make_cylinder(3, 2);  // triangular prism
  OptimizerState s = fresh_state(c.mesh);
  for (int f : c.band(0)) s.w_sa_face[f] = 5.0;
  const auto clusters = cluster_high_weight_faces(c.mesh, s.w_sa_face, 2.0, 1);
  REQUIRE(clusters.size() == 1);
  REQUIRE(clusters[0].columnar());
  for (const auto& loop : clusters[0].boundary_loops) CHECK(loop.size() == 3);
  REQUIRE(excise_and_fill(c.mesh, s, clusters[0]));
  // 6 cap faces + 2 fill triangles, two closed components.
  CHECK(c.mesh.face_count() == 8);
  const auto stats = topology_stats(c.mesh);
  CHECK(stats.components == 2);
  CHECK(stats.boundary_loops == 0);
  CHECK(euler(c.mesh) == 4);
  check_state_sizes(c.mesh, s);
}

TEST_CASE("excise_and_fill refuses non-columnar clusters") {
  Cylinder c = make_cylinder(8, 3);
  OptimizerState s = fresh_state(c.mesh);
  RegionCluster cl;
  cl.faces = {0, 1};
  cl.boundary_loops = {{0, 1, 2}};
  std::string why;
  CHECK_FALSE(excise_and_fill(c.mesh, s, cl, &why));
  CHECK(why == "not columnar");
}

TEST_CASE("excised vertices are compacted and state remapped") {
  Cylinder c = make_cylinder(10, 5);
  OptimizerState s = fresh_state(c.mesh);
  // Tag a recognizable vertex state before the edit.
  const int probe = 4 * 10 + 3;  // top ring vertex, survives the edit
  const Vec3 probe_pos = c.mesh.vertices[probe];
  s.w_sa_vertex[probe] = 7.5;
  for (int f : c.band(1)) s.w_sa_face[f] = 5.0;
  for (int f : c.band(2)) s.w_sa_face[f] = 5.0;  // two-band column: rings 1..3 removed
  const auto clusters = cluster_high_weight_faces(c.mesh, s.w_sa_face, 2.0, 1);
  REQUIRE(clusters.size() == 1);
  REQUIRE(excise_and_fill(c.mesh, s, clusters[0]));
  // Ring 2 (interior of the column) is gone entirely.
  CHECK(c.mesh.vertex_count() < 52);
  // The probe vertex kept its state through the remap.
  int found = -1;
  for (int v = 0; v < c.mesh.vertex_count(); ++v) {
    if ((c.mesh.vertices[v] - probe_pos).norm() < 1e-15) found = v;
  }
  REQUIRE(found >= 0);
  CHECK(s.w_sa_vertex[found] == 7.5);
  check_state_sizes(c.mesh, s);
}

TEST_CASE("red-green subdivision") {
  SUBCASE("single interior red face: 1->4 plus three green neighbors") {
    Cylinder c = make_cylinder(8, 4);
    OptimizerState s = fresh_state(c.mesh);
    const int nf = c.mesh.face_count();
    const int nv = c.mesh.vertex_count();
    s.w_sa_face[5] = 5.0;
    const int red = subdivide_high_weight(c.mesh, s, 2.0);
    CHECK(red == 1);
    CHECK(c.mesh.vertex_count() == nv + 3);
    // Red face becomes 4, each of 3 neighbors becomes 2: net +6.
    CHECK(c.mesh.face_count() == nf + 6);
    CHECK(max_edge_valence(c.mesh) == 2);  // no T-junctions
    const auto stats = topology_stats(c.mesh);
    CHECK(stats.components == 1);
    CHECK(stats.boundary_loops == 0);
    CHECK(stats.non_manifold_edges == 0);
    CHECK(euler(c.mesh) == 2);
    check_state_sizes(c.mesh, s);
  }

  SUBCASE("two adjacent red faces promote the shared-edge layout") {
    Cylinder c = make_cylinder(8, 4);
    OptimizerState s = fresh_state(c.mesh);
    s.w_sa_face[4] = 5.0;
    s.w_sa_face[5] = 5.0;  // the quad partner of face 4
    subdivide_high_weight(c.mesh, s, 2.0);
    CHECK(max_edge_valence(c.mesh) == 2);
    CHECK(euler(c.mesh) == 2);
    CHECK(topology_stats(c.mesh).non_manifold_edges == 0);
    check_state_sizes(c.mesh, s);
  }

  SUBCASE("all faces red quadruples the face count and keeps the topology") {
    Cylinder c = make_cylinder(6, 3);
    OptimizerState s = fresh_state(c.mesh);
    const int nf = c.mesh.face_count();
    for (double& w : s.w_sa_face) w = 5.0;
    const int red = subdivide_high_weight(c.mesh, s, 2.0);
    CHECK(red == nf);
    CHECK(c.mesh.face_count() == 4 * nf);
    CHECK(max_edge_valence(c.mesh) == 2);
    CHECK(euler(c.mesh) == 2);
    check_state_sizes(c.mesh, s);
  }

  SUBCASE("midpoint state is the endpoint mean; children inherit the parent") {
    Cylinder c = make_cylinder(8, 4);
    OptimizerState s = fresh_state(c.mesh);
    for (int v = 0; v < s.vertex_count(); ++v) s.accum_vertex[v] = v;
    s.w_sa_face[5] = 5.0;
    s.accum_face[5] = 1.25;
    const Face parent = c.mesh.faces[5];
    const int old_nv = c.mesh.vertex_count();
    subdivide_high_weight(c.mesh, s, 2.0);
    // The three new vertices are the midpoints of face 5's edges.
    for (int v = old_nv; v < c.mesh.vertex_count(); ++v) {
      bool matched = false;
      for (int e = 0; e < 3; ++e) {
        const int a = parent[e], b = parent[(e + 1) % 3];
        const Vec3 mid = 0.5 * (c.mesh.vertices[a] + c.mesh.vertices[b]);
        if ((c.mesh.vertices[v] - mid).norm() < 1e-15) {
          matched = true;
          CHECK(s.accum_vertex[v] == doctest::Approx(0.5 * (a + b)).epsilon(1e-15));
        }
      }
      CHECK(matched);
      CHECK(s.active[v] == 1);
      CHECK(s.moment1[v] == Vec3::Zero());
    }
    // Children of face 5 carry its weight and accumulated loss.
    int children = 0;
    for (int f = 0; f < c.mesh.face_count(); ++f) {
      if (s.w_sa_face[f] == 5.0) {
        ++children;
        CHECK(s.accum_face[f] == 1.25);
      }
    }
    CHECK(children == 4);
  }

  SUBCASE("no red faces is a no-op") {
    Cylinder c = make_cylinder(8, 4);
    OptimizerState s = fresh_state(c.mesh);
    const int nf = c.mesh.face_count();
    CHECK(subdivide_high_weight(c.mesh, s, 2.0) == 0);
    CHECK(c.mesh.face_count() == nf);
  }
}

TEST_CASE("cluster ordering is deterministic") {
  Cylinder c = make_cylinder(10, 6);
  std::vector<double> w(c.mesh.face_count(), 1.0);
  for (int f : c.band(1)) w[f] = 5.0;
  for (int f : c.band(3)) w[f] = 5.0;
  const auto a = cluster_high_weight_faces(c.mesh, w, 2.0, 1);
  const auto b = cluster_high_weight_faces(c.mesh, w, 2.0, 1);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  CHECK(a[0].faces == b[0].faces);
  CHECK(a[1].faces == b[1].faces);
  CHECK(a[0].faces.front() < a[1].faces.front());
}
