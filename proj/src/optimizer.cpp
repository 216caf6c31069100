#include "udfsw/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <limits>

#include "udfsw/isoextract.hpp"
#include "udfsw/topo_edit.hpp"

namespace udfsw {

void ExtractionConfig::validate() const {
  if (r <= 0.0) throw std::invalid_argument("config: r must be > 0");
  if (mc_resolution < 2) throw std::invalid_argument("config: mc_resolution must be >= 2");
  if (lambda1 < 0.0) throw std::invalid_argument("config: lambda1 must be >= 0");
  if (learning_rate <= 0.0) throw std::invalid_argument("config: learning_rate must be > 0");
  if (max_iterations < 0) throw std::invalid_argument("config: max_iterations must be >= 0");
  if (reset_period < 1 || s1 < 1 || s2 < 1 || beta_m < 1) {
    throw std::invalid_argument("config: all periods must be >= 1");
  }
}

ExtractionConfig ExtractionConfig::noisy_preset() {
  ExtractionConfig cfg;
  cfg.r = 0.01;
  return cfg;
}

ExtractionConfig ExtractionConfig::car_preset() {
  ExtractionConfig cfg;
  cfg.w_s = 3.0;
  return cfg;
}

void OptimizerState::init(int vertex_count, int face_count) {
  moment1.assign(vertex_count, Vec3::Zero());
  moment2.assign(vertex_count, 0.0);
  accum_vertex.assign(vertex_count, 0.0);
  w_sa_vertex.assign(vertex_count, 1.0);
  active.assign(vertex_count, 1);
  cached_f_vertex.assign(vertex_count, -1.0);
  accum_face.assign(face_count, 0.0);
  w_sa_face.assign(face_count, 1.0);
  cached_f_face.assign(face_count, -1.0);
  iteration = 0;
  adam_step = 0;
  last_reset = 0;
}

void update_self_adaptive_weights(OptimizerState& state) {
  double sum = 0.0;
  for (double a : state.accum_vertex) sum += a;
  for (double a : state.accum_face) sum += a;
  const double n = static_cast<double>(state.vertex_count() + state.face_count());
  const double mean = sum / n;
  if (mean <= 0.0) {
    // Empty history (first iteration or right after a reset).
    std::fill(state.w_sa_vertex.begin(), state.w_sa_vertex.end(), 1.0);
    std::fill(state.w_sa_face.begin(), state.w_sa_face.end(), 1.0);
    return;
  }
  for (int i = 0; i < state.vertex_count(); ++i) {
    state.w_sa_vertex[i] = state.accum_vertex[i] / mean;
  }
  for (int i = 0; i < state.face_count(); ++i) {
    state.w_sa_face[i] = state.accum_face[i] / mean;
  }
}

LossBreakdown accuracy_aware_loss(const TriMesh& mesh, const ScalarField& field,
                                  OptimizerState& state, const ExtractionConfig& config,
                                  std::vector<Vec3>* gradients) {
  const int nv = mesh.vertex_count();
  const int nf = mesh.face_count();
  LossBreakdown out;
  if (gradients) gradients->assign(nv, Vec3::Zero());

  auto check_finite = [&](double v, const char* what, int idx) {
    if (!std::isfinite(v)) {
      throw NonFiniteLoss(std::string("non-finite field value at ") + what + " " +
                          std::to_string(idx));
    }
  };

  // Distance term over active vertices.
  for (int i = 0; i < nv; ++i) {
    if (state.active[i]) {
      state.cached_f_vertex[i] = field.value(mesh.vertices[i]);
    } else if (state.cached_f_vertex[i] < 0.0) {
      state.cached_f_vertex[i] = field.value(mesh.vertices[i]);
    }
    check_finite(state.cached_f_vertex[i], "vertex", i);
    if (!state.active[i]) continue;
    out.distance_term += state.w_sa_vertex[i] * state.cached_f_vertex[i];
    out.active_points++;
    if (gradients) {
      (*gradients)[i] += state.w_sa_vertex[i] * field.gradient(mesh.vertices[i]);
    }
  }

  // Centroids of faces with at least one active vertex.
  for (int f = 0; f < nf; ++f) {
    const Face& t = mesh.faces[f];
    const bool face_active = state.active[t[0]] || state.active[t[1]] || state.active[t[2]];
    if (face_active) {
      state.cached_f_face[f] = field.value(mesh.face_centroid(f));
    } else if (state.cached_f_face[f] < 0.0) {
      state.cached_f_face[f] = field.value(mesh.face_centroid(f));
    }
    check_finite(state.cached_f_face[f], "face centroid", f);
    if (!face_active) continue;
    out.distance_term += state.w_sa_face[f] * state.cached_f_face[f];
    out.active_points++;
    if (gradients) {
      const Vec3 g = state.w_sa_face[f] * field.gradient(mesh.face_centroid(f)) / 3.0;
      for (int c = 0; c < 3; ++c) (*gradients)[t[c]] += g;
    }
  }

  // Laplacian regularization over active vertices; inactive neighbors act
  // as frozen constants.
  if (config.lambda1 > 0.0) {
    for (int i = 0; i < nv; ++i) {
      if (!state.active[i]) continue;
      const Vec3 d = laplacian(mesh, i);
      out.laplacian_term += config.lambda1 * d.squaredNorm();
      if (gradients) {
        (*gradients)[i] += 2.0 * config.lambda1 * d;
        const auto& ring = mesh.vertex_ring(i);
        const Vec3 spread = -2.0 * config.lambda1 * d / static_cast<double>(ring.size());
        for (int j : ring) (*gradients)[j] += spread;
      }
    }
  }

  if (gradients) {
    for (int i = 0; i < nv; ++i) {
      if (!state.active[i]) (*gradients)[i].setZero();
    }
  }
  out.total = out.distance_term + out.laplacian_term;
  return out;
}

void correct_direction(const OptimizerState& state, const TriMesh& mesh,
                       const std::vector<Vec3>& normals, std::vector<Vec3>& gradients,
                       double residual_scale_r) {
  const int nv = mesh.vertex_count();
  std::vector<double> w_1ring(nv, 0.0);
  double lo = std::numeric_limits<double>::max();
  double hi = -lo;
  for (int i = 0; i < nv; ++i) {
    if (!state.active[i]) continue;
    double w = 0.0;
    for (int f : mesh.vertex_faces(i)) w += state.w_sa_face[f];
    w_1ring[i] = w;
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  if (!(hi > lo)) return;  // all equal (or no active vertices): correction off
  for (int i = 0; i < nv; ++i) {
    if (!state.active[i]) continue;
    double wn = (w_1ring[i] - lo) / (hi - lo);
    // Fade the normal component out as the vertex reaches the zero set;
    // without this, converged vertices drift monotonically through the
    // surface (the mesh normal does not flip when they cross it).
    if (residual_scale_r > 0.0 && state.cached_f_vertex[i] >= 0.0) {
      wn *= std::min(1.0, state.cached_f_vertex[i] / residual_scale_r);
    }
    gradients[i] = wn * gradients[i].norm() * normals[i] + (1.0 - wn) * gradients[i];
  }
}

void vector_adam_step(OptimizerState& state, const std::vector<Vec3>& gradients,
                      double learning_rate, TriMesh& mesh) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  state.adam_step++;
  const double bc1 = 1.0 - std::pow(kBeta1, state.adam_step);
  const double bc2 = 1.0 - std::pow(kBeta2, state.adam_step);
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    if (!state.active[i]) continue;
    const Vec3& g = gradients[i];
    state.moment1[i] = kBeta1 * state.moment1[i] + (1.0 - kBeta1) * g;
    state.moment2[i] = kBeta2 * state.moment2[i] + (1.0 - kBeta2) * g.squaredNorm();
    const Vec3 mhat = state.moment1[i] / bc1;
    const double vhat = state.moment2[i] / bc2;
    mesh.vertices[i] -= learning_rate * mhat / (std::sqrt(vhat) + kEps);
  }
}

void update_activation_mask(OptimizerState& state, const TriMesh& mesh,
                            const ExtractionConfig& config) {
  // Masking is monotone: a vertex whose neighborhood once dropped below the
  // threshold is converged and stays excluded. Re-admitting it would only
  // re-process the noise tail of the converged population (its stale
  // accumulation mirrors its last evaluated residual). Fresh vertices from
  // subdivision or hole filling start active and earn their own history.
  const int nv = mesh.vertex_count();
  for (int i = 0; i < nv; ++i) {
    if (!state.active[i]) continue;
    bool keep = state.w_sa_vertex[i] >= config.w_t;
    if (!keep) {
      for (int f : mesh.vertex_faces(i)) {
        if (state.w_sa_face[f] >= config.w_t) {
          keep = true;
          break;
        }
      }
    }
    state.active[i] = keep ? 1 : 0;
  }
}

void reset_weights(OptimizerState& state) {
  std::fill(state.accum_vertex.begin(), state.accum_vertex.end(), 0.0);
  std::fill(state.accum_face.begin(), state.accum_face.end(), 0.0);
  std::fill(state.w_sa_vertex.begin(), state.w_sa_vertex.end(), 1.0);
  std::fill(state.w_sa_face.begin(), state.w_sa_face.end(), 1.0);
  state.last_reset = state.iteration;
}

ExtractionResult run_extraction(const GridField& grid, const ExtractionConfig& config,
                                const ScalarField* query_field,
                                const IterationCallback& callback) {
  config.validate();
  const ScalarField& field = query_field ? *query_field : grid;

  ExtractionResult result;
  result.mesh = orient_outward(marching_cubes(grid, config.r), field);
  TriMesh& mesh = result.mesh;

  OptimizerState state;
  state.init(mesh.vertex_count(), mesh.face_count());

  std::vector<Vec3> gradients;
  TriMesh last_good;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    state.iteration = iter;
    std::string event;

    if (config.topology_correction_enabled && iter % config.s1 == 0) {
      struct TopoSummary {
        long genus_sum = 0;
        int components = 0;
        int nm_e = 0, nm_v = 0, loops = 0;
        bool clean = false;  // manifold and closed
      };
      auto summarize = [](const TriMesh& m) {
        TopoSummary s;
        const auto stats = topology_stats(m);
        s.components = stats.components;
        s.nm_e = stats.non_manifold_edges;
        s.nm_v = stats.non_manifold_vertices;
        s.loops = stats.boundary_loops;
        s.clean = stats.non_manifold_edges == 0 && stats.non_manifold_vertices == 0 &&
                  stats.boundary_loops == 0;
        for (int g : stats.genus_per_component) s.genus_sum += std::max(g, 0);
        return s;
      };
      // Face ids go stale after a commit, so re-cluster after every edit.
      for (int pass = 0; pass < 32; ++pass) {
        const auto clusters = cluster_high_weight_faces(mesh, state.w_sa_face, config.w_s,
                                                        config.min_cluster_faces);
        bool committed = false;
        for (const auto& cluster : clusters) {
          if (!cluster.columnar()) {
            if (std::getenv("UDFSW_DEBUG_TOPOCHECK")) {
              Vec3 lo = Vec3::Constant(1e30), hi = Vec3::Constant(-1e30);
              for (int fidx : cluster.faces) {
                for (int c = 0; c < 3; ++c) {
                  const Vec3& v = mesh.vertices[mesh.faces[fidx][c]];
                  lo = lo.cwiseMin(v);
                  hi = hi.cwiseMax(v);
                }
              }
              std::fprintf(stderr,
                           "[topogate] iter %d cluster %zu not columnar (loops=%zu pinched=%d "
                           "ambient=%d) bbox z[%.3f,%.3f] x[%.3f,%.3f] y[%.3f,%.3f]\n",
                           iter, cluster.faces.size(), cluster.boundary_loops.size(),
                           static_cast<int>(cluster.pinched),
                           static_cast<int>(cluster.has_ambient_boundary), lo[2], hi[2], lo[0],
                           hi[0], lo[1], hi[1]);
            }
            continue;
          }
          // Trial excision: commit only when the result stays manifold and
          // watertight. Spurious membranes wider than one cluster are eaten
          // across passes, so a cut need not change the topology by itself.
          TriMesh trial_mesh = mesh;
          OptimizerState trial_state = state;
          std::string why;
          if (!excise_and_fill(trial_mesh, trial_state, cluster, &why)) {
            if (pass == 0) {
            event += "skip_column(" + std::to_string(cluster.faces.size()) + "," + why + ");";
          }
            continue;
          }
          const TopoSummary before = summarize(mesh);
          const TopoSummary after = summarize(trial_mesh);
          // Stuck-cluster gate: a spurious column holds faces that cannot
          // reach the surface (they straddle a local maximum of the field),
          // so their residual stays a sizable fraction of a grid cell. A
          // converged region whose weights are merely relatively noisy sits
          // orders of magnitude closer and is left alone.
          double removed_mean = 0.0;
          {
            int n = 0;
            for (int fidx : cluster.faces) {
              if (state.cached_f_face[fidx] >= 0.0) {
                removed_mean += state.cached_f_face[fidx];
                ++n;
              }
            }
            removed_mean = n ? removed_mean / n : 0.0;
          }
          const double stuck_threshold = 0.25 * grid.cell_size().maxCoeff();
          const bool residual_ok = removed_mean >= stuck_threshold;
          if (std::getenv("UDFSW_DEBUG_TOPOCHECK")) {
            Vec3 lo = Vec3::Constant(1e30), hi = Vec3::Constant(-1e30);
            double f_sum = 0.0, f_max = 0.0;
            int f_n = 0;
            for (int fidx : cluster.faces) {
              if (state.cached_f_face[fidx] >= 0.0) {
                f_sum += state.cached_f_face[fidx];
                f_max = std::max(f_max, state.cached_f_face[fidx]);
                ++f_n;
              }
              for (int c = 0; c < 3; ++c) {
                const Vec3& v = mesh.vertices[mesh.faces[fidx][c]];
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
              }
            }
            std::fprintf(stderr,
                         "[topogate]   f_mean=%.5f f_max=%.5f threshold=%.5f residual_ok=%d "
                         "(r=%.4f)\n",
                         f_n ? f_sum / f_n : -1.0, f_max, stuck_threshold,
                         static_cast<int>(residual_ok), config.r);
            std::string loop_sizes;
            for (const auto& lp : cluster.boundary_loops) {
              loop_sizes += std::to_string(lp.size()) + " ";
            }
            std::fprintf(stderr,
                         "[topogate] iter %d cluster %zu loops[ %s] bbox z[%.3f,%.3f] "
                         "xy[%.3f,%.3f]x[%.3f,%.3f] before(g=%ld,c=%d) after(g=%ld,c=%d,clean=%d,"
                         "nm_e=%d,nm_v=%d,loops=%d)\n",
                         iter, cluster.faces.size(), loop_sizes.c_str(), lo[2], hi[2], lo[0], hi[0],
                         lo[1], hi[1], before.genus_sum, before.components, after.genus_sum,
                         after.components, static_cast<int>(after.clean), after.nm_e, after.nm_v,
                         after.loops);
          }
          if (after.clean && residual_ok) {
            mesh = std::move(trial_mesh);
            state = std::move(trial_state);
            event += "excised_column(" + std::to_string(cluster.faces.size()) + ");";
            committed = true;
            break;
          }
          if (pass == 0) {
            event += "skip_column(" + std::to_string(cluster.faces.size()) + "," +
                     (after.clean ? "no residual benefit" : "unclean result") + ");";
          }
        }
        if (!committed) break;
      }
    }
    if (config.subdivision_enabled && iter % config.s2 == 0) {
      const int split = subdivide_high_weight(mesh, state, config.w_s);
      if (split > 0) event += "subdivided(" + std::to_string(split) + ");";
      if (std::getenv("UDFSW_DEBUG_TOPOCHECK") && split > 0) {
        const auto s = topology_stats(mesh);
        std::fprintf(stderr, "[topocheck] iter %d post-subdiv nm_e=%d nm_v=%d loops=%d\n", iter,
                     s.non_manifold_edges, s.non_manifold_vertices, s.boundary_loops);
        if (s.non_manifold_edges > 0) {
          std::map<std::pair<int, int>, std::vector<int>> inc;
          for (int fidx = 0; fidx < mesh.face_count(); ++fidx) {
            const Face& t = mesh.faces[fidx];
            for (int c = 0; c < 3; ++c) {
              int a = t[c], b = t[(c + 1) % 3];
              if (a > b) std::swap(a, b);
              inc[{a, b}].push_back(fidx);
            }
          }
          for (const auto& [e, fl] : inc) {
            if (fl.size() == 2) continue;
            std::fprintf(stderr, "  nm edge (%d,%d) x%zu at (%.4f,%.4f,%.4f):\n", e.first,
                         e.second, fl.size(), mesh.vertices[e.first][0],
                         mesh.vertices[e.first][1], mesh.vertices[e.first][2]);
            for (int fidx : fl) {
              const Face& t = mesh.faces[fidx];
              std::fprintf(stderr, "    face %d = (%d,%d,%d)\n", fidx, t[0], t[1], t[2]);
            }
          }
        }
      }
    }
    // After subdivision, so freshly inserted vertices are masked by their
    // interpolated weights rather than starting unconditionally active.
    if (config.mask_enabled && iter % config.beta_m == 0) {
      update_activation_mask(state, mesh, config);
      event += "mask_update;";
      if (std::getenv("UDFSW_DEBUG_MASK")) {
        int v_hi = 0, f_hi = 0, act = 0;
        for (double w : state.w_sa_vertex) v_hi += w >= config.w_t;
        for (double w : state.w_sa_face) f_hi += w >= config.w_t;
        for (char a : state.active) act += a;
        std::fprintf(stderr,
                     "[mask] iter %d: v>=wt %d/%d (%.3f)  f>=wt %d/%d (%.3f)  active %d (%.3f)\n",
                     iter, v_hi, state.vertex_count(),
                     double(v_hi) / state.vertex_count(), f_hi, state.face_count(),
                     double(f_hi) / state.face_count(), act,
                     double(act) / state.vertex_count());
      }
    }

    LossBreakdown loss;
    try {
      loss = accuracy_aware_loss(mesh, field, state, config, &gradients);
    } catch (NonFiniteLoss& err) {
      err.last_good_mesh = std::move(last_good);
      err.has_last_good = iter > 1;
      throw;
    }

    // Accumulate this iteration's field values, then refresh the weights.
    // Masked-off points accumulate their last evaluated value so the whole
    // population stays in the normalization; without it, the mean would
    // collapse onto the remaining anomalies and they would look normal.
    for (int i = 0; i < mesh.vertex_count(); ++i) {
      if (state.cached_f_vertex[i] >= 0.0) state.accum_vertex[i] += state.cached_f_vertex[i];
    }
    for (int f = 0; f < mesh.face_count(); ++f) {
      if (state.cached_f_face[f] >= 0.0) state.accum_face[f] += state.cached_f_face[f];
    }
    if (config.self_adaptive_weights_enabled) update_self_adaptive_weights(state);

    if (config.direction_correction_enabled) {
      // Normals are only needed for active vertices, so accumulate incident
      // face normals per active vertex instead of sweeping the whole mesh.
      // Each normal is re-aligned with the local field gradient: a vertex
      // that overshot through the zero level set keeps its mesh normal, so
      // the blend would otherwise push it ever further downhill on the
      // wrong side.
      std::vector<Vec3> normals(mesh.vertex_count(), Vec3::Zero());
      for (int i = 0; i < mesh.vertex_count(); ++i) {
        if (!state.active[i]) continue;
        Vec3 n = Vec3::Zero();
        for (int f : mesh.vertex_faces(i)) n += mesh.face_normal(f);
        const double len = n.norm();
        if (len > 0.0) n /= len;
        bool degenerate = false;
        const Vec3 g = field.gradient(mesh.vertices[i], &degenerate);
        if (!degenerate && n.dot(g) < 0.0) n = -n;
        normals[i] = n;
      }
      correct_direction(state, mesh, normals, gradients, config.r);
    }
    vector_adam_step(state, gradients, config.learning_rate, mesh);

    if (iter % config.reset_period == 0) reset_weights(state);

    IterationRecord rec;
    rec.iteration = iter;
    rec.distance_term = loss.distance_term;
    rec.laplacian_term = loss.laplacian_term;
    rec.active_vertices = 0;
    for (char a : state.active) rec.active_vertices += a;
    rec.vertex_count = mesh.vertex_count();
    rec.face_count = mesh.face_count();
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    rec.event = event;
    result.log.push_back(rec);
    if (callback) callback(rec);
    result.final_loss = loss;
    last_good = mesh;
  }
  return result;
}

std::string iteration_csv_header() {
  return "iter,distance_term,laplacian_term,active_vertices,vertex_count,face_count,wall_ms,event";
}

std::string iteration_csv_row(const IterationRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%d,%d,%d,%.3f,%s", r.iteration,
                r.distance_term, r.laplacian_term, r.active_vertices, r.vertex_count,
                r.face_count, r.wall_ms, r.event.c_str());
  return buf;
}

}  // namespace udfsw
