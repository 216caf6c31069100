#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "udfsw/mesh.hpp"

namespace udfsw {

/// Queryable unsigned distance function. Thread-safe for concurrent reads
/// after construction.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  // Non-negative field value at p.
  virtual double value(const Vec3& p) const = 0;

  // Field gradient at p. When the gradient is undefined (query exactly on
  // the zero set) implementations return the zero vector and set
  // *degenerate when supplied. The default falls back to central finite
  // differences with step fd_step().
  virtual Vec3 gradient(const Vec3& p, bool* degenerate = nullptr) const;

  virtual double fd_step() const { return 1e-4; }
};

struct Box3 {
  Vec3 min;
  Vec3 max;
  Vec3 extent() const { return max - min; }
  static Box3 unit() { return {Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)}; }
};

struct GridDims {
  int x = 0, y = 0, z = 0;
  std::int64_t count() const {
    return static_cast<std::int64_t>(x) * y * z;
  }
  static GridDims cubic(int n) { return {n, n, n}; }
};

/// Regular lattice of sampled field values with trilinear interpolation.
/// Queries outside the bbox clamp to the boundary.
class GridField : public ScalarField {
 public:
  GridField(GridDims dims, Box3 bbox, std::vector<float> values);

  double value(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p, bool* degenerate = nullptr) const override;
  double fd_step() const override { return 0.5 * cell_size().minCoeff(); }

  const GridDims& dims() const { return dims_; }
  const Box3& bbox() const { return bbox_; }
  const std::vector<float>& values() const { return values_; }
  Vec3 cell_size() const;

  float at(int i, int j, int k) const {
    return values_[(static_cast<std::int64_t>(k) * dims_.y + j) * dims_.x + i];
  }
  Vec3 lattice_point(int i, int j, int k) const;

 private:
  GridDims dims_;
  Box3 bbox_;
  std::vector<float> values_;
};

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Analytic primitives, all exact unsigned distances to the named surface
// and fitted inside the unit box.
struct SphereParams {
  Vec3 center = Vec3::Zero();
  double radius = 0.3;
};
struct TorusParams {
  Vec3 center = Vec3::Zero();
  double major_radius = 0.25;
  double minor_radius = 0.1;
};
struct DiskParams {  // open flat disk in the plane z = center.z
  Vec3 center = Vec3::Zero();
  double radius = 0.3;
};
struct CylinderPlaneParams {
  // Capped vertical cylinder hovering above a horizontal rectangle, with a
  // clearance `gap` between the cylinder's bottom cap and the rectangle.
  double cylinder_radius = 0.12;
  double cylinder_height = 0.35;
  double gap = 0.02;
  double plane_half_extent = 0.38;
  double plane_z = -0.3;
};
struct UChannelParams {
  // Boundary surface of a block with a deep rectangular slot cut from the
  // top: outer block [-hx,hx]x[-hy,hy]x[-hz,hz], slot width 2*slot_half_width
  // in x, reaching down to slot_floor_z.
  double half_x = 0.35;
  double half_y = 0.25;
  double half_z = 0.25;
  double slot_half_width = 0.1;
  double slot_floor_z = -0.15;
};

std::unique_ptr<ScalarField> make_sphere_field(const SphereParams& p);
std::unique_ptr<ScalarField> make_torus_field(const TorusParams& p);
std::unique_ptr<ScalarField> make_disk_field(const DiskParams& p);
std::unique_ptr<ScalarField> make_cylinder_plane_field(const CylinderPlaneParams& p);
std::unique_ptr<ScalarField> make_u_channel_field(const UChannelParams& p);

// Shared entry point used by the CLI; throws std::invalid_argument for an
// unknown kind. Parameters use each primitive's defaults except where the
// key=value list overrides them.
std::unique_ptr<ScalarField> make_primitive_field(
    const std::string& kind, const std::vector<std::pair<std::string, double>>& params = {});

// The reference triangle mesh for the u_channel surface (also the geometry
// its field measures distance to).
TriMesh u_channel_mesh(const UChannelParams& p);

// Exact point-to-triangle-soup distance backed by an AABB tree.
// Throws std::invalid_argument on an empty mesh.
std::unique_ptr<ScalarField> make_mesh_field(const TriMesh& mesh);

// Samples `field` on a lattice; optional additive Gaussian noise, clamped
// at zero so the result stays a valid unsigned field.
GridField sample_grid(const ScalarField& field, GridDims dims, const Box3& bbox,
                      const std::optional<NoiseSpec>& noise = std::nullopt);

struct IsoValueCheck {
  bool ok = true;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::string message;  // empty when ok
};

// Advisory check of r against max{1/(2k), d_max} <= r <= eta_min/2.
IsoValueCheck validate_iso_value(double r, int k, double d_max, double eta_min);

// ".udfgrid" container: magic "UDFG", u32 version, u32 dims[3],
// f64 bbox[6] (min xyz, max xyz), f32 values x-fastest, little-endian.
void save_udfgrid(const GridField& grid, const std::string& path);
GridField load_udfgrid(const std::string& path);

}  // namespace udfsw
