// Acceptance gate: runs the end-to-end extraction pipeline on the synthetic
// fixture suite and checks every release criterion, printing one PASS/FAIL
// line per criterion. Exit status is 0 only if all criteria pass.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "udfsw/field.hpp"
#include "udfsw/fixtures.hpp"
#include "udfsw/isoextract.hpp"
#include "udfsw/mesh.hpp"
#include "udfsw/metrics.hpp"
#include "udfsw/optimizer.hpp"
#include "udfsw/topo_edit.hpp"

using namespace udfsw;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void verdict(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) g_failures++;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct TimedRun {
  ExtractionResult result;
  double wall_s = 0.0;
};

TimedRun timed_extraction(const GridField& grid, const ExtractionConfig& config,
                          const ScalarField* query) {
  TimedRun out;
  const auto t0 = Clock::now();
  out.result = run_extraction(grid, config, query);
  out.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

// Chamfer(average) between a sampling of `mesh` and the analytic ground
// truth, both with `n` points.
double cd_avg(const TriMesh& mesh, const SampleCloud& ground_truth, int n) {
  const SampleCloud pred = sample_mesh_surface(mesh, n, 20240101);
  return chamfer_distance(ground_truth, pred).average;
}

// Component/genus signature used for the topology-correction comparison:
// component count plus the sorted genus multiset; only meaningful for
// manifold, closed results.
struct TopoSignature {
  int components = 0;
  int boundary_loops = 0;
  std::vector<int> genus;

  bool operator==(const TopoSignature& o) const {
    return components == o.components && boundary_loops == o.boundary_loops && genus == o.genus;
  }
  std::string str() const {
    std::string s = std::to_string(components) + " comps, genus {";
    for (size_t i = 0; i < genus.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(genus[i]);
    }
    return s + "}, " + std::to_string(boundary_loops) + " loops";
  }
};

TopoSignature topo_signature(const TriMesh& mesh) {
  const TopologyStats s = topology_stats(mesh);
  TopoSignature sig;
  sig.components = s.components;
  sig.boundary_loops = s.boundary_loops;
  sig.genus = s.genus_per_component;
  std::sort(sig.genus.begin(), sig.genus.end());
  return sig;
}

ExtractionConfig components_off(ExtractionConfig cfg) {
  cfg.mask_enabled = false;
  cfg.direction_correction_enabled = false;
  cfg.topology_correction_enabled = false;
  cfg.subdivision_enabled = false;
  return cfg;
}

ExtractionConfig dcudf_mode(ExtractionConfig cfg) {
  cfg = components_off(cfg);
  cfg.self_adaptive_weights_enabled = false;
  cfg.max_iterations = 300;  // emulates the two-stage baseline schedule
  return cfg;
}

double percentile95(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t idx = static_cast<size_t>(0.95 * static_cast<double>(v.size() - 1));
  return v[idx];
}

// ---------------------------------------------------------------------------
// Criterion 8: the property suite, inlined so the gate binary is standalone.
// ---------------------------------------------------------------------------

TriMesh octahedron(double radius) {
  TriMesh m;
  m.vertices = {Vec3(radius, 0, 0), Vec3(-radius, 0, 0), Vec3(0, radius, 0),
                Vec3(0, -radius, 0), Vec3(0, 0, radius), Vec3(0, 0, -radius)};
  m.faces = {Face(0, 2, 4), Face(2, 1, 4), Face(1, 3, 4), Face(3, 0, 4),
             Face(2, 0, 5), Face(1, 2, 5), Face(3, 1, 5), Face(0, 3, 5)};
  return m;
}

// Closed cylinder: nr rings of nv vertices plus two cap hubs.
TriMesh tube(int nv, int nr) {
  TriMesh m;
  for (int j = 0; j < nr; ++j) {
    const double z = -0.2 + 0.4 * j / (nr - 1);
    for (int i = 0; i < nv; ++i) {
      const double a = 2.0 * M_PI * i / nv;
      m.vertices.emplace_back(0.1 * std::cos(a), 0.1 * std::sin(a), z);
    }
  }
  const int bottom_hub = static_cast<int>(m.vertices.size());
  m.vertices.emplace_back(0, 0, -0.2);
  const int top_hub = bottom_hub + 1;
  m.vertices.emplace_back(0, 0, 0.2);
  for (int j = 0; j + 1 < nr; ++j) {
    for (int i = 0; i < nv; ++i) {
      const int a = j * nv + i, b = j * nv + (i + 1) % nv;
      m.faces.emplace_back(a, b, a + nv);
      m.faces.emplace_back(b, b + nv, a + nv);
    }
  }
  for (int i = 0; i < nv; ++i) {
    m.faces.emplace_back((i + 1) % nv, i, bottom_hub);
    m.faces.emplace_back((nr - 1) * nv + i, (nr - 1) * nv + (i + 1) % nv, top_hub);
  }
  return m;
}

bool property_suite(std::string& detail) {
  std::mt19937_64 rng(7);
  auto urand = [&] { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); };

  // w_sa mean-1 normalization and empty-history weight.
  {
    OptimizerState st;
    st.init(64, 32);
    for (double& a : st.accum_vertex) a = std::abs(urand()) + 0.01;
    for (double& a : st.accum_face) a = std::abs(urand()) + 0.01;
    update_self_adaptive_weights(st);
    double pooled = 0.0;
    for (double w : st.w_sa_vertex) pooled += w;
    for (double w : st.w_sa_face) pooled += w;
    if (std::abs(pooled / 96.0 - 1.0) > 1e-9) {
      detail = "w_sa mean-1 normalization";
      return false;
    }
    OptimizerState fresh;
    fresh.init(8, 4);
    update_self_adaptive_weights(fresh);
    for (double w : fresh.w_sa_vertex) {
      if (w != 1.0) {
        detail = "empty-history weight != 1";
        return false;
      }
    }
  }

  // Mask zero-delta: inactive vertices never move under an Adam step.
  {
    TriMesh m = octahedron(0.3);
    OptimizerState st;
    st.init(m.vertex_count(), m.face_count());
    for (int i = 0; i < 3; ++i) st.active[i] = 0;
    std::vector<Vec3> g(m.vertex_count(), Vec3(0.1, -0.2, 0.05));
    const std::vector<Vec3> before = m.vertices;
    vector_adam_step(st, g, 1e-3, m);
    for (int i = 0; i < 3; ++i) {
      if ((m.vertices[i] - before[i]).norm() != 0.0) {
        detail = "mask zero-delta";
        return false;
      }
    }
  }

  // Direction correction never lengthens a gradient.
  {
    TriMesh m = octahedron(0.3);
    OptimizerState st;
    st.init(m.vertex_count(), m.face_count());
    for (double& w : st.w_sa_face) w = std::abs(urand()) * 3.0;
    std::vector<Vec3> g(m.vertex_count()), n = vertex_normals(m);
    for (Vec3& v : g) v = Vec3(urand(), urand(), urand());
    const std::vector<Vec3> raw = g;
    correct_direction(st, m, n, g);
    for (int i = 0; i < m.vertex_count(); ++i) {
      if (g[i].norm() > raw[i].norm() + 1e-12) {
        detail = "corrected gradient norm bound";
        return false;
      }
    }
  }

  // Vector-Adam rotation equivariance.
  {
    Eigen::Matrix3d R =
        Eigen::AngleAxisd(0.83, Vec3(1, 2, 3).normalized()).toRotationMatrix();
    TriMesh a = octahedron(0.3), b = a;
    for (Vec3& v : b.vertices) v = R * v;
    OptimizerState sa, sb;
    sa.init(a.vertex_count(), a.face_count());
    sb.init(b.vertex_count(), b.face_count());
    std::vector<Vec3> ga(a.vertex_count()), gb(a.vertex_count());
    for (int step = 0; step < 5; ++step) {
      for (int i = 0; i < a.vertex_count(); ++i) {
        ga[i] = Vec3(urand(), urand(), urand());
        gb[i] = R * ga[i];
      }
      vector_adam_step(sa, ga, 1e-3, a);
      vector_adam_step(sb, gb, 1e-3, b);
    }
    for (int i = 0; i < a.vertex_count(); ++i) {
      if ((R * a.vertices[i] - b.vertices[i]).norm() > 1e-10) {
        detail = "Adam rotation equivariance";
        return false;
      }
    }
  }

  // Loss gradient against central finite differences.
  {
    TriMesh m = octahedron(0.25);
    auto field = make_sphere_field({Vec3::Zero(), 0.3});
    ExtractionConfig cfg;
    OptimizerState st;
    st.init(m.vertex_count(), m.face_count());
    std::vector<Vec3> grad;
    accuracy_aware_loss(m, *field, st, cfg, &grad);
    const double h = 1e-6;
    for (int i = 0; i < m.vertex_count(); ++i) {
      for (int c = 0; c < 3; ++c) {
        TriMesh mp = m, mm = m;
        mp.vertices[i][c] += h;
        mm.vertices[i][c] -= h;
        OptimizerState sp = st, sm = st;
        const double lp = accuracy_aware_loss(mp, *field, sp, cfg, nullptr).total;
        const double lm = accuracy_aware_loss(mm, *field, sm, cfg, nullptr).total;
        const double fd = (lp - lm) / (2.0 * h);
        if (std::abs(fd - grad[i][c]) > 1e-4 * std::max(1.0, std::abs(fd))) {
          detail = "loss gradient vs finite differences";
          return false;
        }
      }
    }
  }

  // Marching-cubes double cover is closed and manifold.
  {
    auto field = make_sphere_field({Vec3::Zero(), 0.3});
    const GridField grid = sample_grid(*field, GridDims::cubic(64), Box3::unit());
    const TopologyStats s = topology_stats(marching_cubes(grid, 0.02));
    if (s.boundary_loops != 0 || s.non_manifold_edges != 0 || s.non_manifold_vertices != 0) {
      detail = "MC double-cover closedness";
      return false;
    }
  }

  // Subdivision conformity: a closed mesh stays closed with every edge on
  // exactly two faces (no T-junctions).
  {
    TriMesh m = tube(12, 5);
    OptimizerState st;
    st.init(m.vertex_count(), m.face_count());
    for (int f = 0; f < 20; ++f) st.w_sa_face[f] = 3.0;
    subdivide_high_weight(m, st, 2.0);
    std::map<std::pair<int, int>, int> count;
    for (const Face& t : m.faces) {
      for (int c = 0; c < 3; ++c) {
        int u = t[c], v = t[(c + 1) % 3];
        if (u > v) std::swap(u, v);
        count[{u, v}]++;
      }
    }
    for (const auto& [e, n] : count) {
      if (n != 2) {
        detail = "subdivision conformity";
        return false;
      }
    }
  }

  // Excision Euler bookkeeping: cutting a mid-band column from a closed tube
  // must leave two closed genus-0 pieces (Euler characteristic 2 each).
  {
    TriMesh m = tube(16, 7);
    OptimizerState st;
    st.init(m.vertex_count(), m.face_count());
    for (int i = 0; i < 2 * 16; ++i) st.w_sa_face[3 * 2 * 16 + i] = 3.0;
    const auto clusters = cluster_high_weight_faces(m, st.w_sa_face, 2.0, 10);
    std::string why;
    if (clusters.size() != 1 || !excise_and_fill(m, st, clusters[0], &why)) {
      detail = "excision setup (" + why + ")";
      return false;
    }
    const TopologyStats s = topology_stats(m);
    if (s.components != 2 || s.boundary_loops != 0 || s.non_manifold_edges != 0 ||
        s.genus_per_component != std::vector<int>{0, 0}) {
      detail = "excision Euler bookkeeping";
      return false;
    }
  }

  // Chamfer: kd-tree path equals the brute force definition.
  {
    SampleCloud a, b;
    for (int i = 0; i < 200; ++i) {
      a.points.emplace_back(urand(), urand(), urand());
      b.points.emplace_back(urand(), urand(), urand());
    }
    const ChamferResult fast = chamfer_distance(a, b);
    double ab = 0.0, ba = 0.0;
    for (const Vec3& p : a.points) {
      double best = 1e300;
      for (const Vec3& q : b.points) best = std::min(best, (p - q).norm());
      ab += best;
    }
    for (const Vec3& q : b.points) {
      double best = 1e300;
      for (const Vec3& p : a.points) best = std::min(best, (p - q).norm());
      ba += best;
    }
    ab /= 200.0;
    ba /= 200.0;
    if (std::abs(fast.a_to_b - ab) > 1e-12 || std::abs(fast.b_to_a - ba) > 1e-12) {
      detail = "Chamfer brute-force equivalence";
      return false;
    }
  }

  // OBJ round-trip.
  {
    const TriMesh m = tube(10, 4);
    const std::string path = "acceptance_roundtrip.obj";
    save_obj(m, path);
    const TriMesh back = load_obj(path);
    std::remove(path.c_str());
    if (back.faces.size() != m.faces.size() || back.vertices.size() != m.vertices.size()) {
      detail = "OBJ round-trip";
      return false;
    }
    for (size_t i = 0; i < m.vertices.size(); ++i) {
      if ((m.vertices[i] - back.vertices[i]).cwiseAbs().maxCoeff() > 1e-6) {
        detail = "OBJ round-trip precision";
        return false;
      }
    }
  }

  detail = "all 11 property checks";
  return true;
}

}  // namespace

int main() {
  const auto t_start = Clock::now();
  std::vector<Fixture> fixtures = make_standard_fixtures(10000);
  std::vector<Fixture> fixtures50 = make_standard_fixtures(50000);

  // Shared grids and full-configuration runs at the default settings.
  std::map<std::string, GridField> grids;
  std::map<std::string, TimedRun> full_runs;
  for (const Fixture& fx : fixtures) {
    grids.emplace(fx.name, sample_grid(*fx.field, GridDims::cubic(128), Box3::unit()));
  }
  for (const Fixture& fx : fixtures) {
    std::fprintf(stderr, "[accept] full run: %s\n", fx.name.c_str());
    full_runs.emplace(fx.name,
                      timed_extraction(grids.at(fx.name), ExtractionConfig{}, fx.field.get()));
  }

  // -------------------------------------------------------------------
  // Criterion 1: manifold guarantee on clean and noisy inputs.
  // -------------------------------------------------------------------
  {
    bool ok = true;
    std::string detail;
    for (const Fixture& fx : fixtures) {
      const TimedRun& run = full_runs.at(fx.name);
      const TopologyStats s = topology_stats(run.result.mesh);
      if (s.non_manifold_vertices != 0 || s.non_manifold_edges != 0 || s.boundary_loops != 0 ||
          run.wall_s > 120.0) {
        ok = false;
        detail += fx.name + "(clean nm_v=" + std::to_string(s.non_manifold_vertices) +
                  " nm_e=" + std::to_string(s.non_manifold_edges) +
                  " loops=" + std::to_string(s.boundary_loops) + " " + fmt(run.wall_s) + "s) ";
      }
      // Noisy variant: sigma = 0.005 with the wider iso-value preset.
      const GridField noisy =
          sample_grid(*fx.field, GridDims::cubic(128), Box3::unit(), NoiseSpec{0.005, 1234});
      const TimedRun nrun =
          timed_extraction(noisy, ExtractionConfig::noisy_preset(), fx.field.get());
      const TopologyStats ns = topology_stats(nrun.result.mesh);
      if (ns.non_manifold_vertices != 0 || ns.non_manifold_edges != 0 ||
          ns.boundary_loops != 0 || nrun.wall_s > 120.0) {
        ok = false;
        detail += fx.name + "(noisy nm_v=" + std::to_string(ns.non_manifold_vertices) +
                  " nm_e=" + std::to_string(ns.non_manifold_edges) +
                  " loops=" + std::to_string(ns.boundary_loops) + ") ";
      }
    }
    verdict(1, ok,
            "manifoldness on 5 fixtures, clean r=0.005 and noisy sigma=0.005 r=0.01" +
                (detail.empty() ? std::string(" — all closed manifolds") : ": " + detail));
  }

  // -------------------------------------------------------------------
  // Criterion 2: sphere accuracy vs bound and signed-MC oracle.
  // -------------------------------------------------------------------
  {
    const Fixture& sphere = fixtures[0];
    const double cd = cd_avg(full_runs.at("sphere").result.mesh, sphere.ground_truth, 10000);
    // Oracle: marching cubes at the zero crossing of the signed field
    // ||x|| - R on the same lattice.
    const GridDims dims = GridDims::cubic(128);
    std::vector<float> signed_vals(static_cast<size_t>(dims.x) * dims.y * dims.z);
    const Box3 box = Box3::unit();
    const Vec3 h = (box.max - box.min).cwiseQuotient(Vec3(dims.x - 1, dims.y - 1, dims.z - 1));
    size_t idx = 0;
    for (int k = 0; k < dims.z; ++k) {
      for (int j = 0; j < dims.y; ++j) {
        for (int i = 0; i < dims.x; ++i) {
          const Vec3 p = box.min + Vec3(i * h[0], j * h[1], k * h[2]);
          signed_vals[idx++] = static_cast<float>(p.norm() - 0.3);
        }
      }
    }
    const TriMesh oracle = marching_cubes_raw(dims, box, signed_vals, 0.0);
    const double cd_oracle = cd_avg(oracle, sphere.ground_truth, 10000);
    const double bound = 1.0 / 128.0;
    const bool ok = cd <= bound && cd <= 2.0 * cd_oracle;
    verdict(2, ok,
            "sphere CD(avg) " + fmt(cd) + " <= 1/k=" + fmt(bound) + " and <= 2x oracle CD " +
                fmt(cd_oracle));
  }

  // -------------------------------------------------------------------
  // Criterion 3: topology correction restores the correct-r structure.
  // -------------------------------------------------------------------
  {
    const Fixture& cp = *std::find_if(fixtures.begin(), fixtures.end(),
                                      [](const Fixture& f) { return f.name == "cylinder_plane"; });
    const GridField& grid = grids.at("cylinder_plane");
    // Reference: largest iso-value whose 2r band both clears the gap and
    // spans >= 2 cells at 128^3, giving cleanly separated double covers.
    ExtractionConfig ref_cfg;
    ref_cfg.r = 0.007;
    std::fprintf(stderr, "[accept] cylinder_plane reference r=0.007\n");
    const TopoSignature ref =
        topo_signature(run_extraction(grid, ref_cfg, cp.field.get()).mesh);

    ExtractionConfig merged_cfg;
    merged_cfg.r = 1.5 * cp.eta_min / 2.0;  // oversized: covers merge across the gap
    std::fprintf(stderr, "[accept] cylinder_plane merged r=%.4f with topo\n", merged_cfg.r);
    const TopoSignature with_topo =
        topo_signature(run_extraction(grid, merged_cfg, cp.field.get()).mesh);

    ExtractionConfig no_topo_cfg = merged_cfg;
    no_topo_cfg.topology_correction_enabled = false;
    std::fprintf(stderr, "[accept] cylinder_plane merged without topo\n");
    const TopoSignature without_topo =
        topo_signature(run_extraction(grid, no_topo_cfg, cp.field.get()).mesh);

    const bool ok = with_topo == ref && !(without_topo == ref);
    verdict(3, ok,
            "topology correction at r=1.5*eta/2: reference " + ref.str() + "; with topo " +
                with_topo.str() + "; without " + without_topo.str());
  }

  // -------------------------------------------------------------------
  // Criterion 4: direction correction pulls into the concave slot.
  // -------------------------------------------------------------------
  {
    const Fixture& uc = *std::find_if(fixtures.begin(), fixtures.end(),
                                      [](const Fixture& f) { return f.name == "u_channel"; });
    auto p95_of = [&](const TriMesh& m) {
      std::vector<double> vals;
      vals.reserve(m.vertex_count());
      for (const Vec3& v : m.vertices) vals.push_back(uc.field->value(v));
      return percentile95(std::move(vals));
    };
    const double with_dc = p95_of(full_runs.at("u_channel").result.mesh);
    ExtractionConfig cfg;
    cfg.direction_correction_enabled = false;
    std::fprintf(stderr, "[accept] u_channel without direction correction\n");
    const double without_dc =
        p95_of(run_extraction(grids.at("u_channel"), cfg, uc.field.get()).mesh);
    const double ratio = with_dc / without_dc;
    verdict(4, ratio <= 0.5,
            "u_channel p95 residual with dircorr " + fmt(with_dc) + " vs without " +
                fmt(without_dc) + " (ratio " + fmt(ratio) + " <= 0.5)");
  }

  // -------------------------------------------------------------------
  // Criterion 5: activation-mask efficiency on the sphere.
  // -------------------------------------------------------------------
  {
    const TimedRun& masked = full_runs.at("sphere");
    double frac100 = 1.0;
    for (const IterationRecord& rec : masked.result.log) {
      if (rec.iteration == 100) {
        frac100 = static_cast<double>(rec.active_vertices) / rec.vertex_count;
      }
    }
    ExtractionConfig no_mask;
    no_mask.mask_enabled = false;
    std::fprintf(stderr, "[accept] sphere without activation mask\n");
    const TimedRun unmasked = timed_extraction(grids.at("sphere"), no_mask,
                                               fixtures[0].field.get());
    auto iter_wall = [](const TimedRun& r) {
      double total = 0.0;
      for (const IterationRecord& rec : r.result.log) total += rec.wall_ms;
      return total;
    };
    const double masked_ms = iter_wall(masked), unmasked_ms = iter_wall(unmasked);
    const bool ok = frac100 <= 0.30 && masked_ms <= 0.7 * unmasked_ms;
    verdict(5, ok,
            "sphere active fraction at iter 100 = " + fmt(frac100) +
                " (<= 0.30), wall with mask " + fmt(masked_ms) + "ms vs without " +
                fmt(unmasked_ms) + "ms (ratio " + fmt(masked_ms / unmasked_ms) + " <= 0.7)");
  }

  // -------------------------------------------------------------------
  // Criteria 6 + 7: runtime and ablation orderings.
  // -------------------------------------------------------------------
  std::map<std::string, TimedRun> dcudf_runs;
  for (const Fixture& fx : fixtures) {
    std::fprintf(stderr, "[accept] baseline-mode run: %s\n", fx.name.c_str());
    dcudf_runs.emplace(fx.name, timed_extraction(grids.at(fx.name),
                                                 dcudf_mode(ExtractionConfig{}), fx.field.get()));
  }
  {
    int faster = 0;
    std::string detail;
    for (const Fixture& fx : fixtures) {
      const double full_s = full_runs.at(fx.name).wall_s;
      const double base_s = dcudf_runs.at(fx.name).wall_s;
      if (2.0 * full_s <= base_s) faster++;
      detail += fx.name + " " + fmt(base_s / full_s) + "x ";
    }
    verdict(6, faster >= 4, "full vs baseline speedup on >=4/5 fixtures: " + detail);
  }
  {
    bool ordered = true, strict = false;
    std::string detail;
    for (const std::string& name : {std::string("u_channel"), std::string("torus")}) {
      const Fixture& fx50 = *std::find_if(fixtures50.begin(), fixtures50.end(),
                                          [&](const Fixture& f) { return f.name == name; });
      std::fprintf(stderr, "[accept] components-off run: %s\n", name.c_str());
      const TimedRun comp_off = timed_extraction(grids.at(name),
                                                 components_off(ExtractionConfig{}),
                                                 fx50.field.get());
      const double cd_full = cd_avg(full_runs.at(name).result.mesh, fx50.ground_truth, 50000);
      const double cd_off = cd_avg(comp_off.result.mesh, fx50.ground_truth, 50000);
      const double cd_base = cd_avg(dcudf_runs.at(name).result.mesh, fx50.ground_truth, 50000);
      if (!(cd_full <= cd_off && cd_off <= cd_base)) ordered = false;
      if (cd_full < cd_off || cd_off < cd_base) strict = true;
      detail += name + "(" + fmt(cd_full) + " <= " + fmt(cd_off) + " <= " + fmt(cd_base) + ") ";
    }
    verdict(7, ordered && strict, "ablation CD ordering full <= components-off <= baseline: " +
                                      detail);
  }

  // -------------------------------------------------------------------
  // Criterion 8: property suite.
  // -------------------------------------------------------------------
  {
    std::string detail;
    const bool ok = property_suite(detail);
    verdict(8, ok, "property suite: " + detail);
  }

  // -------------------------------------------------------------------
  // Criterion 9: resolution and iso-value sweep on the sphere.
  // -------------------------------------------------------------------
  {
    const Fixture& sphere50 = fixtures50[0];
    std::vector<double> cds;
    std::string detail = "sphere CD by resolution: ";
    for (int res : {64, 128, 256}) {
      std::fprintf(stderr, "[accept] sphere sweep %d^3\n", res);
      const GridField g = sample_grid(*sphere50.field, GridDims::cubic(res), Box3::unit());
      ExtractionConfig cfg;
      cfg.mc_resolution = res;
      const TimedRun run = timed_extraction(g, cfg, sphere50.field.get());
      cds.push_back(cd_avg(run.result.mesh, sphere50.ground_truth, 50000));
      detail += std::to_string(res) + ":" + fmt(cds.back()) + " ";
    }
    const bool monotone = cds[1] <= cds[0] && cds[2] <= cds[1];

    std::fprintf(stderr, "[accept] sphere sweep r=0.015\n");
    ExtractionConfig wide;
    wide.r = 0.015;
    const TimedRun wide_run = timed_extraction(grids.at("sphere"), wide, sphere50.field.get());
    const double cd_wide = cd_avg(wide_run.result.mesh, sphere50.ground_truth, 50000);
    const double rel = std::abs(cd_wide / cds[1] - 1.0);
    const bool ok = monotone && rel <= 0.10;
    verdict(9, ok,
            detail + "(non-increasing), r=0.015 CD " + fmt(cd_wide) + " within 10% of r=0.005 (" +
                fmt(rel * 100.0) + "%)");
  }

  const double total_s = std::chrono::duration<double>(Clock::now() - t_start).count();
  std::printf("%d/9 criteria passed (%.1f s total)\n", 9 - g_failures, total_s);
  return g_failures == 0 ? 0 : 1;
}
