#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "udfsw/field.hpp"
#include "udfsw/mesh.hpp"

namespace udfsw {

struct NonFiniteLoss : std::runtime_error {
  explicit NonFiniteLoss(const std::string& what) : std::runtime_error(what) {}
  // Filled by run_extraction: the mesh from the last completed iteration.
  TriMesh last_good_mesh;
  bool has_last_good = false;
};

enum class LaplacianWeightMode { kUniform };

struct ExtractionConfig {
  double r = 0.005;
  int mc_resolution = 128;
  double lambda1 = 1800.0;
  double learning_rate = 0.0005;
  int max_iterations = 150;
  int reset_period = 50;       // N
  double w_s = 2.0;            // subdivision / clustering threshold
  double w_t = 2.0;            // activation-mask threshold
  int s1 = 100;                // topology-edit period
  int s2 = 50;                 // subdivision period
  int beta_m = 50;             // mask-update period
  bool direction_correction_enabled = true;
  bool topology_correction_enabled = true;
  bool subdivision_enabled = true;
  bool mask_enabled = true;
  bool self_adaptive_weights_enabled = true;  // false: uniform weights throughout
  LaplacianWeightMode laplacian_weight_mode = LaplacianWeightMode::kUniform;
  int min_cluster_faces = 10;

  void validate() const;

  // r = 0.01 for noisy inputs.
  static ExtractionConfig noisy_preset();
  // w_s = 3 to avoid over-subdividing car-like models.
  static ExtractionConfig car_preset();
};

/// Per-point optimizer bookkeeping; vertices first, then face centroids.
struct OptimizerState {
  // Per vertex.
  std::vector<Vec3> moment1;
  std::vector<double> moment2;        // scalar second moment of the 3-vector
  std::vector<double> accum_vertex;   // accumulated field loss since reset
  std::vector<double> w_sa_vertex;
  std::vector<char> active;
  std::vector<double> cached_f_vertex;  // field value at the current position
  // Per face centroid.
  std::vector<double> accum_face;
  std::vector<double> w_sa_face;
  std::vector<double> cached_f_face;

  int iteration = 0;
  int adam_step = 0;
  int last_reset = 0;

  void init(int vertex_count, int face_count);
  int vertex_count() const { return static_cast<int>(moment1.size()); }
  int face_count() const { return static_cast<int>(accum_face.size()); }
};

struct LossBreakdown {
  double total = 0.0;
  double distance_term = 0.0;
  double laplacian_term = 0.0;
  int active_points = 0;
};

// Eq-style weight recomputation: w_sa = A / mean(A) over vertices and
// centroids; all-ones when every accumulated loss is zero.
void update_self_adaptive_weights(OptimizerState& state);

// Loss over active vertices and the centroids of faces with at least one
// active vertex, plus lambda1-weighted uniform-Laplacian regularization over
// active vertices. Also refreshes cached field values. When `gradients`
// is non-null it receives d(loss)/d(vertex), with inactive rows zeroed.
// Throws NonFiniteLoss on a non-finite field value.
LossBreakdown accuracy_aware_loss(const TriMesh& mesh, const ScalarField& field,
                                  OptimizerState& state, const ExtractionConfig& config,
                                  std::vector<Vec3>* gradients);

// Blends each active vertex's raw gradient with the scaled mesh normal,
// weighted by the min-max-normalized 1-ring centroid weight. `normals` are
// the outward (field-gradient-aligned) vertex normals. When
// residual_scale_r > 0 the blend additionally fades with the vertex's
// cached field value (full strength at >= residual_scale_r, zero at the
// surface) so converged vertices are left alone.
void correct_direction(const OptimizerState& state, const TriMesh& mesh,
                       const std::vector<Vec3>& normals, std::vector<Vec3>& gradients,
                       double residual_scale_r = 0.0);

// Rotation-equivariant Adam: per-vertex 3-vector first moment and scalar
// second moment over the gradient norm. Only active vertices move.
void vector_adam_step(OptimizerState& state, const std::vector<Vec3>& gradients,
                      double learning_rate, TriMesh& mesh);

// Vertex active iff its own weight or any incident centroid weight reaches w_t.
void update_activation_mask(OptimizerState& state, const TriMesh& mesh,
                            const ExtractionConfig& config);

// Clears accumulated losses and weights; Adam moments are retained.
void reset_weights(OptimizerState& state);

struct IterationRecord {
  int iteration = 0;
  double distance_term = 0.0;
  double laplacian_term = 0.0;
  int active_vertices = 0;
  int vertex_count = 0;
  int face_count = 0;
  double wall_ms = 0.0;
  std::string event;  // topology-edit / subdivision notes
};

struct ExtractionResult {
  TriMesh mesh;
  std::vector<IterationRecord> log;
  LossBreakdown final_loss;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

// The full pipeline: marching cubes at r, outward orientation, then the
// optimization loop with scheduled topology correction, subdivision, mask
// updates, weight resets, and direction correction.
// `query_field` defaults to the grid itself when null.
ExtractionResult run_extraction(const GridField& grid, const ExtractionConfig& config,
                                const ScalarField* query_field = nullptr,
                                const IterationCallback& callback = nullptr);

std::string iteration_csv_header();
std::string iteration_csv_row(const IterationRecord& rec);

}  // namespace udfsw
