#include "udfsw/topo_edit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace udfsw {

namespace {

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

std::vector<RegionCluster> cluster_high_weight_faces(const TriMesh& mesh,
                                                     const std::vector<double>& face_weights,
                                                     double w_s, int min_cluster_faces) {
  const int nf = mesh.face_count();
  std::vector<char> high(nf, 0);
  for (int f = 0; f < nf; ++f) high[f] = face_weights[f] > w_s ? 1 : 0;

  // Edge -> incident faces over the whole mesh.
  std::unordered_map<std::uint64_t, std::vector<int>> edges;
  for (int f = 0; f < nf; ++f) {
    const Face& t = mesh.faces[f];
    for (int c = 0; c < 3; ++c) edges[edge_key(t[c], t[(c + 1) % 3])].push_back(f);
  }

  UnionFind uf(nf);
  for (const auto& [key, inc] : edges) {
    int first_high = -1;
    for (int f : inc) {
      if (!high[f]) continue;
      if (first_high < 0) {
        first_high = f;
      } else {
        uf.unite(first_high, f);
      }
    }
  }

  std::unordered_map<int, int> root_to_cluster;
  std::vector<RegionCluster> clusters;
  for (int f = 0; f < nf; ++f) {
    if (!high[f]) continue;
    const int root = uf.find(f);
    auto [it, inserted] = root_to_cluster.emplace(root, static_cast<int>(clusters.size()));
    if (inserted) clusters.emplace_back();
    clusters[it->second].faces.push_back(f);
  }

  // Computes rim description for a member set: loops, pinch flag, ambient
  // flag. Rim edges are traversed by exactly one member face, directed as
  // that face traverses them.
  const auto describe_rim = [&](const std::unordered_set<int>& members, RegionCluster& out) {
    out.boundary_loops.clear();
    out.pinched = false;
    out.has_ambient_boundary = false;
    std::unordered_map<int, int> next;  // directed rim edge a -> b
    for (int f : members) {
      const Face& t = mesh.faces[f];
      for (int c = 0; c < 3; ++c) {
        const int a = t[c], b = t[(c + 1) % 3];
        const auto& inc = edges[edge_key(a, b)];
        int in_cluster = 0;
        for (int g : inc) in_cluster += members.count(g) ? 1 : 0;
        if (inc.size() == 1) out.has_ambient_boundary = true;
        if (in_cluster == 1 && inc.size() == 2) {
          if (!next.emplace(a, b).second) out.pinched = true;
        }
      }
    }
    if (out.pinched) return;
    std::unordered_set<int> visited;
    for (const auto& [start, unused] : next) {
      if (visited.count(start)) continue;
      std::vector<int> loop;
      int v = start;
      while (true) {
        loop.push_back(v);
        visited.insert(v);
        auto it = next.find(v);
        if (it == next.end()) {
          out.pinched = true;  // open chain: rim not a clean cycle
          break;
        }
        v = it->second;
        if (v == start) break;
        if (visited.count(v)) {
          out.pinched = true;
          break;
        }
      }
      out.boundary_loops.push_back(std::move(loop));
    }
  };

  std::vector<RegionCluster> result;
  for (auto& cluster : clusters) {
    if (static_cast<int>(cluster.faces.size()) < min_cluster_faces) continue;
    std::unordered_set<int> members(cluster.faces.begin(), cluster.faces.end());
    describe_rim(members, cluster);

    // Raw high-weight regions are often ragged: the rim may touch itself
    // (pinched) or enclose small low-weight islands (extra loops). Grow a
    // pinched region by one face ring and absorb small enclosed islands so
    // that a genuinely columnar region presents a clean two-loop rim.
    for (int attempt = 0; attempt < 4 && !cluster.has_ambient_boundary; ++attempt) {
      if (cluster.pinched) {
        std::unordered_set<int> grown = members;
        for (int f : members) {
          const Face& t = mesh.faces[f];
          for (int c = 0; c < 3; ++c) {
            for (int g : edges[edge_key(t[c], t[(c + 1) % 3])]) grown.insert(g);
          }
        }
        if (grown.size() == members.size()) break;
        members = std::move(grown);
        describe_rim(members, cluster);
        continue;
      }
      if (cluster.boundary_loops.size() <= 2) break;
      // Non-member components adjacent to the region, grown over non-member
      // faces; absorb the small ones (enclosed islands), keep the sheets.
      const std::size_t island_cap = std::max<std::size_t>(32, members.size() / 2);
      std::unordered_set<int> seen;
      bool absorbed_any = false;
      for (int f : members) {
        const Face& t = mesh.faces[f];
        for (int c = 0; c < 3; ++c) {
          for (int g : edges[edge_key(t[c], t[(c + 1) % 3])]) {
            if (members.count(g) || seen.count(g)) continue;
            std::vector<int> component{g};
            seen.insert(g);
            bool too_big = false;
            for (std::size_t i = 0; i < component.size() && !too_big; ++i) {
              const Face& u = mesh.faces[component[i]];
              for (int cc = 0; cc < 3; ++cc) {
                for (int h : edges[edge_key(u[cc], u[(cc + 1) % 3])]) {
                  if (members.count(h) || seen.count(h)) continue;
                  seen.insert(h);
                  component.push_back(h);
                  if (component.size() > island_cap) {
                    too_big = true;
                    break;
                  }
                }
                if (too_big) break;
              }
            }
            if (!too_big) {
              members.insert(component.begin(), component.end());
              absorbed_any = true;
            }
          }
        }
      }
      if (!absorbed_any) break;
      describe_rim(members, cluster);
    }
    cluster.faces.assign(members.begin(), members.end());
    std::sort(cluster.faces.begin(), cluster.faces.end());
    result.push_back(std::move(cluster));
  }
  // Deterministic order regardless of hash iteration.
  std::sort(result.begin(), result.end(), [](const RegionCluster& a, const RegionCluster& b) {
    return a.faces.front() < b.faces.front();
  });
  return result;
}

namespace {

// Minimum-weight polygon triangulation, Liepa-style: triangle area first,
// worst dihedral deviation as tie-break.
struct FillCost {
  double dihedral = 0.0;  // max(1 - cos angle) over adjacent patch triangles
  double area = 0.0;
  bool operator<(const FillCost& o) const {
    if (area != o.area) return area < o.area;
    return dihedral < o.dihedral;
  }
  FillCost operator+(const FillCost& o) const {
    return {std::max(dihedral, o.dihedral), area + o.area};
  }
};

double tri_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

double dihedral_penalty(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  // Triangles (a,b,c) and (a,c,d)? Caller passes shared edge implicitly;
  // penalty = 1 - cos of the normals' angle.
  Vec3 n1 = (b - a).cross(c - a);
  Vec3 n2 = (c - a).cross(d - a);
  const double l1 = n1.norm(), l2 = n2.norm();
  if (l1 <= 0.0 || l2 <= 0.0) return 2.0;
  return 1.0 - n1.dot(n2) / (l1 * l2);
}

// Triangulates the polygon given by `ring` (positions); returns triangles as
// index triples into the ring, oriented along the ring. `chord_ok` vetoes
// interior cap edges (called with non-adjacent ring indices); a chord that
// would duplicate an existing mesh edge must be refused or the cap would
// stack four faces on it. Returns empty when no feasible triangulation
// exists.
constexpr double kInfeasibleArea = 1e300;

std::vector<std::array<int, 3>> fill_polygon(const std::vector<Vec3>& ring,
                                             const std::function<bool(int, int)>& chord_ok) {
  const int n = static_cast<int>(ring.size());
  std::vector<std::array<int, 3>> tris;
  if (n < 3) return tris;
  if (n == 3) {
    tris.push_back({0, 1, 2});
    return tris;
  }
  std::vector<std::vector<FillCost>> cost(n, std::vector<FillCost>(n));
  std::vector<std::vector<int>> pick(n, std::vector<int>(n, -1));
  for (int span = 2; span < n; ++span) {
    for (int i = 0; i + span < n; ++i) {
      const int k = i + span;
      FillCost best{0.0, std::numeric_limits<double>::max()};
      int best_j = -1;
      const bool chord_banned = !(i == 0 && k == n - 1) && chord_ok && !chord_ok(i, k);
      for (int j = i + 1; j < k; ++j) {
        FillCost c = cost[i][j] + cost[j][k];
        c.area += tri_area(ring[i], ring[j], ring[k]);
        if (chord_banned) c.area += kInfeasibleArea;
        // Dihedral against the two sub-triangulations' rim triangles.
        if (j - i >= 2 && pick[i][j] >= 0) {
          c.dihedral = std::max(
              c.dihedral, dihedral_penalty(ring[i], ring[pick[i][j]], ring[j], ring[k]));
        }
        if (k - j >= 2 && pick[j][k] >= 0) {
          c.dihedral = std::max(
              c.dihedral, dihedral_penalty(ring[j], ring[pick[j][k]], ring[k], ring[i]));
        }
        if (c < best) {
          best = c;
          best_j = j;
        }
      }
      cost[i][k] = best;
      pick[i][k] = best_j;
    }
  }
  if (pick[0][n - 1] < 0 || cost[0][n - 1].area >= kInfeasibleArea) return tris;
  // Recover the triangulation.
  std::vector<std::pair<int, int>> stack = {{0, n - 1}};
  while (!stack.empty()) {
    auto [i, k] = stack.back();
    stack.pop_back();
    if (k - i < 2) continue;
    const int j = pick[i][k];
    tris.push_back({i, j, k});
    stack.emplace_back(i, j);
    stack.emplace_back(j, k);
  }
  return tris;
}

constexpr int kMaxLoopLength = 500;

}  // namespace

bool excise_and_fill(TriMesh& mesh, OptimizerState& state, const RegionCluster& cluster,
                     std::string* why) {
  if (!cluster.columnar()) {
    if (why) *why = "not columnar";
    return false;
  }
  std::vector<char> removed(mesh.face_count(), 0);
  for (int f : cluster.faces) removed[f] = 1;

  // A triangular rim whose three vertices already carry a kept face is
  // edge-adjacent to that face on all three rim edges (each rim edge has one
  // kept face besides the cluster's). Capping such a rim would duplicate
  // that "lid" and create a zero-volume two-face pillow, so the lid is
  // absorbed into the excision instead and the rim is re-derived from the
  // enlarged removal set.
  std::vector<std::vector<int>> loops = cluster.boundary_loops;
  bool absorbed = false;
  {
    auto face_key = [](int a, int b, int c) {
      int v[3] = {a, b, c};
      std::sort(v, v + 3);
      return (static_cast<std::uint64_t>(v[0]) << 42) ^ (static_cast<std::uint64_t>(v[1]) << 21) ^
             static_cast<std::uint64_t>(v[2]);
    };
    std::unordered_set<int> rim_verts;
    for (const auto& loop : loops) rim_verts.insert(loop.begin(), loop.end());
    std::unordered_map<std::uint64_t, int> kept_rim_faces;
    for (int f = 0; f < mesh.face_count(); ++f) {
      if (removed[f]) continue;
      const Face& t = mesh.faces[f];
      if (rim_verts.count(t[0]) && rim_verts.count(t[1]) && rim_verts.count(t[2])) {
        kept_rim_faces.emplace(face_key(t[0], t[1], t[2]), f);
      }
    }
    for (const auto& loop : loops) {
      if (loop.size() != 3) continue;
      const auto it = kept_rim_faces.find(face_key(loop[0], loop[1], loop[2]));
      if (it != kept_rim_faces.end() && !removed[it->second]) {
        removed[it->second] = 1;
        absorbed = true;
      }
    }
  }
  if (absorbed) {
    // Re-derive the rim loops of the enlarged removal set.
    std::unordered_map<std::uint64_t, std::vector<int>> edges;
    for (int f = 0; f < mesh.face_count(); ++f) {
      const Face& t = mesh.faces[f];
      for (int c = 0; c < 3; ++c) edges[edge_key(t[c], t[(c + 1) % 3])].push_back(f);
    }
    std::unordered_map<int, int> next;  // directed rim edge a -> b
    for (int f = 0; f < mesh.face_count(); ++f) {
      if (!removed[f]) continue;
      const Face& t = mesh.faces[f];
      for (int c = 0; c < 3; ++c) {
        const int a = t[c], b = t[(c + 1) % 3];
        const auto& inc = edges[edge_key(a, b)];
        if (inc.size() != 2) {
          if (why) *why = "rim touches a non-manifold or boundary edge";
          return false;
        }
        int removed_count = 0;
        for (int g : inc) removed_count += removed[g] ? 1 : 0;
        if (removed_count == 1 && !next.emplace(a, b).second) {
          if (why) *why = "pinched rim after absorbing lid";
          return false;
        }
      }
    }
    loops.clear();
    std::unordered_set<int> visited;
    for (const auto& [start, unused] : next) {
      if (visited.count(start)) continue;
      std::vector<int> loop;
      int v = start;
      while (true) {
        loop.push_back(v);
        visited.insert(v);
        const auto it = next.find(v);
        if (it == next.end() || (it->second != start && visited.count(it->second))) {
          if (why) *why = "open rim chain after absorbing lid";
          return false;
        }
        v = it->second;
        if (v == start) break;
      }
      loops.push_back(std::move(loop));
    }
  }

  for (const auto& loop : loops) {
    if (static_cast<int>(loop.size()) < 3) {
      if (why) *why = "degenerate loop";
      return false;
    }
    if (static_cast<int>(loop.size()) > kMaxLoopLength) {
      if (why) *why = "loop too long";
      return false;
    }
  }
  // Loops sharing a vertex would produce a non-manifold cap.
  {
    std::unordered_set<int> seen;
    for (const auto& loop : loops) {
      for (int v : loop) {
        if (!seen.insert(v).second) {
          if (why) *why = "loops share a vertex";
          return false;
        }
      }
    }
  }

  struct NewFace {
    Face face;
    double accum;
    double w_sa;
  };
  std::vector<NewFace> new_faces;
  std::vector<int> new_vertex_parents;  // 3 ring-vertex ids per refined vertex

  // Edges of the kept mesh: a cap chord duplicating one would stack four
  // faces on that edge.
  std::unordered_set<std::uint64_t> kept_edges;
  for (int f = 0; f < mesh.face_count(); ++f) {
    if (removed[f]) continue;
    const Face& t = mesh.faces[f];
    for (int c = 0; c < 3; ++c) kept_edges.insert(edge_key(t[c], t[(c + 1) % 3]));
  }

  for (const auto& loop : loops) {
    std::vector<Vec3> ring(loop.size());
    for (size_t i = 0; i < loop.size(); ++i) ring[i] = mesh.vertices[loop[i]];
    double mean_edge = 0.0;
    for (size_t i = 0; i < loop.size(); ++i) {
      mean_edge += (ring[(i + 1) % ring.size()] - ring[i]).norm();
    }
    mean_edge /= static_cast<double>(ring.size());

    double loop_accum = 0.0, loop_w = 0.0;
    for (int v : loop) {
      loop_accum += state.accum_vertex[v];
      loop_w += state.w_sa_vertex[v];
    }
    loop_accum /= static_cast<double>(loop.size());
    loop_w /= static_cast<double>(loop.size());

    struct PatchTri {
      int v[3];  // mesh vertex ids
    };
    std::vector<PatchTri> patch;
    const auto chord_ok = [&](int a, int b) {
      return !kept_edges.count(edge_key(loop[a], loop[b]));
    };
    const auto cap = fill_polygon(ring, chord_ok);
    if (cap.empty()) {
      if (why) *why = "no valid cap";
      return false;
    }
    for (const auto& t : cap) {
      patch.push_back({{loop[t[0]], loop[t[1]], loop[t[2]]}});
    }

    // Refine oversized triangles by centroid insertion; conformity is
    // preserved because edges are untouched.
    const double max_circumradius = 2.0 * mean_edge;
    for (int round = 0; round < 8; ++round) {
      bool changed = false;
      std::vector<PatchTri> next;
      for (const PatchTri& t : patch) {
        const Vec3 &a = mesh.vertices[t.v[0]], &b = mesh.vertices[t.v[1]],
                   &c = mesh.vertices[t.v[2]];
        const double area = tri_area(a, b, c);
        const double la = (b - c).norm(), lb = (a - c).norm(), lc = (a - b).norm();
        const double circum = area > 1e-16 ? la * lb * lc / (4.0 * area) : 0.0;
        if (circum > max_circumradius) {
          const int m = mesh.vertex_count();
          mesh.vertices.push_back((a + b + c) / 3.0);
          state.moment1.push_back(Vec3::Zero());
          state.moment2.push_back(0.0);
          state.accum_vertex.push_back(loop_accum);
          state.w_sa_vertex.push_back(loop_w);
          state.active.push_back(1);
          state.cached_f_vertex.push_back(-1.0);
          next.push_back({{t.v[0], t.v[1], m}});
          next.push_back({{t.v[1], t.v[2], m}});
          next.push_back({{t.v[2], t.v[0], m}});
          changed = true;
        } else {
          next.push_back(t);
        }
      }
      patch = std::move(next);
      if (!changed) break;
    }
    for (const PatchTri& t : patch) {
      new_faces.push_back({Face(t.v[0], t.v[1], t.v[2]), loop_accum, loop_w});
    }
  }

  // Rebuild the face list and per-face state.
  std::vector<Face> faces;
  std::vector<double> accum_face, w_sa_face, cached_f_face;
  faces.reserve(mesh.faces.size() - cluster.faces.size() + new_faces.size());
  for (int f = 0; f < mesh.face_count(); ++f) {
    if (removed[f]) continue;
    faces.push_back(mesh.faces[f]);
    accum_face.push_back(state.accum_face[f]);
    w_sa_face.push_back(state.w_sa_face[f]);
    cached_f_face.push_back(state.cached_f_face[f]);
  }
  for (const NewFace& nf : new_faces) {
    faces.push_back(nf.face);
    accum_face.push_back(nf.accum);
    w_sa_face.push_back(nf.w_sa);
    // -2 distinguishes freshly added caps from merely unevaluated faces;
    // both read as "no cached value" (< 0) everywhere else.
    cached_f_face.push_back(-2.0);
  }
  mesh.faces = std::move(faces);
  state.accum_face = std::move(accum_face);
  state.w_sa_face = std::move(w_sa_face);
  state.cached_f_face = std::move(cached_f_face);

  // Compact vertices no longer referenced by any face.
  std::vector<int> remap(mesh.vertex_count(), -1);
  int next_id = 0;
  for (const Face& f : mesh.faces) {
    for (int c = 0; c < 3; ++c) {
      if (remap[f[c]] < 0) remap[f[c]] = next_id++;
    }
  }
  std::vector<Vec3> vertices(next_id);
  std::vector<Vec3> moment1(next_id);
  std::vector<double> moment2(next_id), accum_vertex(next_id), w_sa_vertex(next_id),
      cached_f_vertex(next_id);
  std::vector<char> active(next_id);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const int m = remap[v];
    if (m < 0) continue;
    vertices[m] = mesh.vertices[v];
    moment1[m] = state.moment1[v];
    moment2[m] = state.moment2[v];
    accum_vertex[m] = state.accum_vertex[v];
    w_sa_vertex[m] = state.w_sa_vertex[v];
    cached_f_vertex[m] = state.cached_f_vertex[v];
    active[m] = state.active[v];
  }
  for (Face& f : mesh.faces) {
    for (int c = 0; c < 3; ++c) f[c] = remap[f[c]];
  }
  mesh.vertices = std::move(vertices);
  state.moment1 = std::move(moment1);
  state.moment2 = std::move(moment2);
  state.accum_vertex = std::move(accum_vertex);
  state.w_sa_vertex = std::move(w_sa_vertex);
  state.cached_f_vertex = std::move(cached_f_vertex);
  state.active = std::move(active);
  mesh.invalidate_adjacency();
  return true;
}

int subdivide_high_weight(TriMesh& mesh, OptimizerState& state, double w_s) {
  const int nf = mesh.face_count();
  std::vector<char> red(nf, 0);
  int red_count = 0;
  for (int f = 0; f < nf; ++f) {
    if (state.w_sa_face[f] > w_s) {
      red[f] = 1;
      red_count++;
    }
  }
  if (red_count == 0) return 0;

  // Edges to split = all edges of red faces.
  std::unordered_map<std::uint64_t, int> midpoint;  // edge -> new vertex id
  auto split_edge = [&](int a, int b) {
    auto [it, inserted] = midpoint.emplace(edge_key(a, b), -1);
    if (inserted) {
      const int m = mesh.vertex_count();
      it->second = m;
      mesh.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
      state.moment1.push_back(Vec3::Zero());
      state.moment2.push_back(0.0);
      state.accum_vertex.push_back(0.5 * (state.accum_vertex[a] + state.accum_vertex[b]));
      state.w_sa_vertex.push_back(0.5 * (state.w_sa_vertex[a] + state.w_sa_vertex[b]));
      state.active.push_back(1);
      state.cached_f_vertex.push_back(-1.0);
    }
    return it->second;
  };
  for (int f = 0; f < nf; ++f) {
    if (!red[f]) continue;
    const Face& t = mesh.faces[f];
    for (int c = 0; c < 3; ++c) split_edge(t[c], t[(c + 1) % 3]);
  }
  // A non-red face with all three edges split becomes red too (its edges
  // are already in the split set, so no iteration is needed).
  for (int f = 0; f < nf; ++f) {
    if (red[f]) continue;
    const Face& t = mesh.faces[f];
    int split = 0;
    for (int c = 0; c < 3; ++c) split += midpoint.count(edge_key(t[c], t[(c + 1) % 3]));
    if (split == 3) red[f] = 1;
  }

  std::vector<Face> faces;
  std::vector<double> accum_face, w_sa_face, cached_f_face;
  faces.reserve(nf + 3 * red_count);
  auto emit = [&](int a, int b, int c, int parent) {
    faces.emplace_back(a, b, c);
    accum_face.push_back(state.accum_face[parent]);
    w_sa_face.push_back(state.w_sa_face[parent]);
    cached_f_face.push_back(-1.0);
  };
  for (int f = 0; f < nf; ++f) {
    const Face t = mesh.faces[f];
    int mid[3];
    int split_count = 0;
    for (int c = 0; c < 3; ++c) {
      auto it = midpoint.find(edge_key(t[c], t[(c + 1) % 3]));
      mid[c] = it == midpoint.end() ? -1 : it->second;
      if (mid[c] >= 0) split_count++;
    }
    if (red[f]) {
      // Red 1->4.
      emit(t[0], mid[0], mid[2], f);
      emit(mid[0], t[1], mid[1], f);
      emit(mid[2], mid[1], t[2], f);
      emit(mid[0], mid[1], mid[2], f);
    } else if (split_count == 0) {
      faces.push_back(t);
      accum_face.push_back(state.accum_face[f]);
      w_sa_face.push_back(state.w_sa_face[f]);
      cached_f_face.push_back(state.cached_f_face[f]);
    } else {
      // Green conformity splits. Rotate so that edge 0 is split.
      int rot = 0;
      while (mid[rot] < 0) rot++;
      const int v0 = t[rot], v1 = t[(rot + 1) % 3], v2 = t[(rot + 2) % 3];
      const int m0 = mid[rot];
      const int m1 = mid[(rot + 1) % 3];
      const int m2 = mid[(rot + 2) % 3];
      if (split_count == 1) {
        emit(v0, m0, v2, f);
        emit(m0, v1, v2, f);
      } else {
        // Two split edges; rotate again if the pair is (e0, e2) instead of
        // (e0, e1) so the layout below always sees m on edges 0 and 1.
        if (m1 < 0) {
          // Split edges are e0 and e2: relabel with rot' = rot + 2.
          const int w0 = v2, w1 = v0, w2 = v1;
          const int n0 = m2, n1 = m0;
          emit(n0, w1, n1, f);
          emit(w0, n0, n1, f);
          emit(w0, n1, w2, f);
        } else {
          emit(m0, v1, m1, f);
          emit(v0, m0, m1, f);
          emit(v0, m1, v2, f);
        }
      }
    }
  }
  mesh.faces = std::move(faces);
  state.accum_face = std::move(accum_face);
  state.w_sa_face = std::move(w_sa_face);
  state.cached_f_face = std::move(cached_f_face);
  mesh.invalidate_adjacency();
  return red_count;
}

}  // namespace udfsw
