#include "udfsw/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "udfsw/bvh.hpp"

namespace udfsw {

Vec3 ScalarField::gradient(const Vec3& p, bool* degenerate) const {
  if (degenerate) *degenerate = false;
  const double h = fd_step();
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 lo = p, hi = p;
    lo[a] -= h;
    hi[a] += h;
    g[a] = (value(hi) - value(lo)) / (2.0 * h);
  }
  return g;
}

// ---------------------------------------------------------------------------
// GridField

GridField::GridField(GridDims dims, Box3 bbox, std::vector<float> values)
    : dims_(dims), bbox_(bbox), values_(std::move(values)) {
  if (dims_.x < 2 || dims_.y < 2 || dims_.z < 2) {
    throw std::invalid_argument("GridField: dims must be >= 2 per axis");
  }
  if (static_cast<std::int64_t>(values_.size()) != dims_.count()) {
    throw std::invalid_argument("GridField: value count does not match dims");
  }
  if ((bbox_.extent().array() <= 0.0).any()) {
    throw std::invalid_argument("GridField: bbox must have positive extent");
  }
  for (float v : values_) {
    if (v < 0.0f) throw std::invalid_argument("GridField: negative sample value");
  }
}

Vec3 GridField::cell_size() const {
  return bbox_.extent().cwiseQuotient(
      Vec3(dims_.x - 1.0, dims_.y - 1.0, dims_.z - 1.0));
}

Vec3 GridField::lattice_point(int i, int j, int k) const {
  const Vec3 h = cell_size();
  return bbox_.min + Vec3(i * h[0], j * h[1], k * h[2]);
}

namespace {

struct CellLookup {
  int i[3];      // base lattice index
  double t[3];   // fractional coordinate in the cell
};

CellLookup locate(const GridDims& dims, const Box3& bbox, const Vec3& p) {
  const Vec3 clamped = p.cwiseMax(bbox.min).cwiseMin(bbox.max);
  const Vec3 u = (clamped - bbox.min).cwiseQuotient(bbox.extent());
  CellLookup c;
  const int n[3] = {dims.x, dims.y, dims.z};
  for (int a = 0; a < 3; ++a) {
    const double s = u[a] * (n[a] - 1);
    c.i[a] = std::clamp(static_cast<int>(std::floor(s)), 0, n[a] - 2);
    c.t[a] = s - c.i[a];
  }
  return c;
}

}  // namespace

double GridField::value(const Vec3& p) const {
  const CellLookup c = locate(dims_, bbox_, p);
  double v = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const double w = (dx ? c.t[0] : 1.0 - c.t[0]) * (dy ? c.t[1] : 1.0 - c.t[1]) *
                         (dz ? c.t[2] : 1.0 - c.t[2]);
        v += w * at(c.i[0] + dx, c.i[1] + dy, c.i[2] + dz);
      }
    }
  }
  return v;
}

Vec3 GridField::gradient(const Vec3& p, bool* degenerate) const {
  if (degenerate) *degenerate = false;
  const CellLookup c = locate(dims_, bbox_, p);
  const Vec3 h = cell_size();
  Vec3 g = Vec3::Zero();
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const double f = at(c.i[0] + dx, c.i[1] + dy, c.i[2] + dz);
        const double wx = dx ? c.t[0] : 1.0 - c.t[0];
        const double wy = dy ? c.t[1] : 1.0 - c.t[1];
        const double wz = dz ? c.t[2] : 1.0 - c.t[2];
        g[0] += (dx ? 1.0 : -1.0) * wy * wz * f;
        g[1] += (dy ? 1.0 : -1.0) * wx * wz * f;
        g[2] += (dz ? 1.0 : -1.0) * wx * wy * f;
      }
    }
  }
  return g.cwiseQuotient(h);
}

// ---------------------------------------------------------------------------
// Analytic primitives

namespace {

class SphereField : public ScalarField {
 public:
  explicit SphereField(const SphereParams& p) : p_(p) {
    if (p.radius <= 0.0) throw std::invalid_argument("sphere: radius must be > 0");
  }
  double value(const Vec3& q) const override {
    return std::abs((q - p_.center).norm() - p_.radius);
  }
  Vec3 gradient(const Vec3& q, bool* degenerate) const override {
    const Vec3 d = q - p_.center;
    const double len = d.norm();
    if (len < 1e-15 || std::abs(len - p_.radius) < 1e-15) {
      if (degenerate) *degenerate = true;
      return Vec3::Zero();
    }
    if (degenerate) *degenerate = false;
    return (len >= p_.radius ? 1.0 : -1.0) * d / len;
  }

 private:
  SphereParams p_;
};

class TorusField : public ScalarField {
 public:
  explicit TorusField(const TorusParams& p) : p_(p) {
    if (p.minor_radius <= 0.0 || p.major_radius <= p.minor_radius) {
      throw std::invalid_argument("torus: need 0 < minor_radius < major_radius");
    }
  }
  double value(const Vec3& q) const override {
    const Vec3 d = q - p_.center;
    const double rho = std::hypot(d[0], d[1]);
    return std::abs(std::hypot(rho - p_.major_radius, d[2]) - p_.minor_radius);
  }
  Vec3 gradient(const Vec3& q, bool* degenerate) const override {
    const Vec3 d = q - p_.center;
    const double rho = std::hypot(d[0], d[1]);
    const double u = rho - p_.major_radius;
    const double m = std::hypot(u, d[2]);
    if (rho < 1e-15 || m < 1e-15 || std::abs(m - p_.minor_radius) < 1e-15) {
      if (degenerate) *degenerate = true;
      return Vec3::Zero();
    }
    if (degenerate) *degenerate = false;
    const double s = m >= p_.minor_radius ? 1.0 : -1.0;
    return s * Vec3(u / m * d[0] / rho, u / m * d[1] / rho, d[2] / m);
  }

 private:
  TorusParams p_;
};

class DiskField : public ScalarField {
 public:
  explicit DiskField(const DiskParams& p) : p_(p) {
    if (p.radius <= 0.0) throw std::invalid_argument("disk: radius must be > 0");
  }
  double value(const Vec3& q) const override {
    const Vec3 d = q - p_.center;
    const double a = std::max(std::hypot(d[0], d[1]) - p_.radius, 0.0);
    return std::hypot(a, d[2]);
  }
  Vec3 gradient(const Vec3& q, bool* degenerate) const override {
    const Vec3 d = q - p_.center;
    const double rho = std::hypot(d[0], d[1]);
    const double a = std::max(rho - p_.radius, 0.0);
    const double dist = std::hypot(a, d[2]);
    if (dist < 1e-15) {
      if (degenerate) *degenerate = true;
      return Vec3::Zero();
    }
    if (degenerate) *degenerate = false;
    Vec3 g(0.0, 0.0, d[2] / dist);
    if (a > 0.0 && rho > 1e-15) {
      g[0] = a / dist * d[0] / rho;
      g[1] = a / dist * d[1] / rho;
    }
    return g;
  }

 private:
  DiskParams p_;
};

class CylinderPlaneField : public ScalarField {
 public:
  explicit CylinderPlaneField(const CylinderPlaneParams& p) : p_(p) {
    if (p.cylinder_radius <= 0.0 || p.cylinder_height <= 0.0 || p.gap <= 0.0 ||
        p.plane_half_extent <= 0.0) {
      throw std::invalid_argument("cylinder_plane: all sizes must be > 0");
    }
    axis_z_ = p.plane_z + p.gap + 0.5 * p.cylinder_height;
  }

  double cylinder_distance(const Vec3& q) const {
    const double rho = std::hypot(q[0], q[1]);
    const double drho = rho - p_.cylinder_radius;
    const double dz = std::abs(q[2] - axis_z_) - 0.5 * p_.cylinder_height;
    const double outside = std::hypot(std::max(drho, 0.0), std::max(dz, 0.0));
    const double inside = std::min(std::max(drho, dz), 0.0);
    return std::abs(outside + inside);
  }
  double plane_distance(const Vec3& q) const {
    const double ax = std::max(std::abs(q[0]) - p_.plane_half_extent, 0.0);
    const double ay = std::max(std::abs(q[1]) - p_.plane_half_extent, 0.0);
    const double dz = q[2] - p_.plane_z;
    return std::sqrt(ax * ax + ay * ay + dz * dz);
  }
  double value(const Vec3& q) const override {
    return std::min(cylinder_distance(q), plane_distance(q));
  }
  double fd_step() const override { return 1e-6; }

 private:
  CylinderPlaneParams p_;
  double axis_z_;
};

class MeshField : public ScalarField {
 public:
  explicit MeshField(const TriMesh& mesh) : bvh_(mesh) {}
  double value(const Vec3& p) const override { return bvh_.closest(p).distance; }
  Vec3 gradient(const Vec3& p, bool* degenerate) const override {
    const auto hit = bvh_.closest(p);
    if (hit.distance < 1e-14) {
      if (degenerate) *degenerate = true;
      return Vec3::Zero();
    }
    if (degenerate) *degenerate = false;
    return (p - hit.point) / hit.distance;
  }

 private:
  TriangleBvh bvh_;
};

}  // namespace

std::unique_ptr<ScalarField> make_sphere_field(const SphereParams& p) {
  return std::make_unique<SphereField>(p);
}
std::unique_ptr<ScalarField> make_torus_field(const TorusParams& p) {
  return std::make_unique<TorusField>(p);
}
std::unique_ptr<ScalarField> make_disk_field(const DiskParams& p) {
  return std::make_unique<DiskField>(p);
}
std::unique_ptr<ScalarField> make_cylinder_plane_field(const CylinderPlaneParams& p) {
  return std::make_unique<CylinderPlaneField>(p);
}

TriMesh u_channel_mesh(const UChannelParams& p) {
  if (p.slot_half_width <= 0.0 || p.slot_half_width >= p.half_x ||
      p.slot_floor_z <= -p.half_z || p.slot_floor_z >= p.half_z) {
    throw std::invalid_argument("u_channel: slot must lie strictly inside the block");
  }
  const double hx = p.half_x, hy = p.half_y, hz = p.half_z;
  const double sx = p.slot_half_width, fz = p.slot_floor_z;
  // U-shaped cross-section in the (x, z) plane, extruded along y.
  const std::vector<Eigen::Vector2d> poly = {
      {-hx, -hz}, {hx, -hz}, {hx, hz},  {sx, hz},
      {sx, fz},   {-sx, fz}, {-sx, hz}, {-hx, hz}};
  TriMesh mesh;
  auto add_vertex = [&](double x, double y, double z) {
    mesh.vertices.emplace_back(x, y, z);
    return static_cast<int>(mesh.vertices.size()) - 1;
  };
  // Side walls.
  const int n = static_cast<int>(poly.size());
  for (int e = 0; e < n; ++e) {
    const auto& a = poly[e];
    const auto& b = poly[(e + 1) % n];
    const int v0 = add_vertex(a[0], -hy, a[1]);
    const int v1 = add_vertex(b[0], -hy, b[1]);
    const int v2 = add_vertex(b[0], hy, b[1]);
    const int v3 = add_vertex(a[0], hy, a[1]);
    mesh.faces.emplace_back(v0, v1, v2);
    mesh.faces.emplace_back(v0, v2, v3);
  }
  // End caps, each split into three rectangles around the slot.
  const double rects[3][4] = {{-hx, -sx, -hz, hz}, {-sx, sx, -hz, fz}, {sx, hx, -hz, hz}};
  for (double y : {-hy, hy}) {
    for (const auto& r : rects) {
      const int v0 = add_vertex(r[0], y, r[2]);
      const int v1 = add_vertex(r[1], y, r[2]);
      const int v2 = add_vertex(r[1], y, r[3]);
      const int v3 = add_vertex(r[0], y, r[3]);
      mesh.faces.emplace_back(v0, v1, v2);
      mesh.faces.emplace_back(v0, v2, v3);
    }
  }
  return mesh;
}

std::unique_ptr<ScalarField> make_u_channel_field(const UChannelParams& p) {
  return make_mesh_field(u_channel_mesh(p));
}

std::unique_ptr<ScalarField> make_mesh_field(const TriMesh& mesh) {
  if (mesh.faces.empty()) throw std::invalid_argument("make_mesh_field: empty mesh");
  for (int f = 0; f < mesh.face_count(); ++f) {
    if (mesh.face_area(f) <= 0.0) {
      throw std::invalid_argument("make_mesh_field: degenerate triangle " + std::to_string(f));
    }
  }
  return std::make_unique<MeshField>(mesh);
}

std::unique_ptr<ScalarField> make_primitive_field(
    const std::string& kind, const std::vector<std::pair<std::string, double>>& params) {
  auto get = [&](const std::string& name, double fallback) {
    for (const auto& [k, v] : params) {
      if (k == name) return v;
    }
    return fallback;
  };
  if (kind == "sphere") {
    SphereParams p;
    p.radius = get("radius", p.radius);
    p.center = Vec3(get("cx", 0.0), get("cy", 0.0), get("cz", 0.0));
    return make_sphere_field(p);
  }
  if (kind == "torus") {
    TorusParams p;
    p.major_radius = get("major_radius", p.major_radius);
    p.minor_radius = get("minor_radius", p.minor_radius);
    return make_torus_field(p);
  }
  if (kind == "disk") {
    DiskParams p;
    p.radius = get("radius", p.radius);
    p.center = Vec3(get("cx", 0.0), get("cy", 0.0), get("cz", 0.0));
    return make_disk_field(p);
  }
  if (kind == "cylinder_plane") {
    CylinderPlaneParams p;
    p.gap = get("gap", p.gap);
    p.cylinder_radius = get("cylinder_radius", p.cylinder_radius);
    p.cylinder_height = get("cylinder_height", p.cylinder_height);
    p.plane_half_extent = get("plane_half_extent", p.plane_half_extent);
    p.plane_z = get("plane_z", p.plane_z);
    return make_cylinder_plane_field(p);
  }
  if (kind == "u_channel") {
    UChannelParams p;
    p.half_x = get("half_x", p.half_x);
    p.half_y = get("half_y", p.half_y);
    p.half_z = get("half_z", p.half_z);
    p.slot_half_width = get("slot_half_width", p.slot_half_width);
    p.slot_floor_z = get("slot_floor_z", p.slot_floor_z);
    return make_u_channel_field(p);
  }
  throw std::invalid_argument("unknown primitive kind: " + kind);
}

// ---------------------------------------------------------------------------

GridField sample_grid(const ScalarField& field, GridDims dims, const Box3& bbox,
                      const std::optional<NoiseSpec>& noise) {
  if (dims.x < 2 || dims.y < 2 || dims.z < 2) {
    throw std::invalid_argument("sample_grid: dims must be >= 2 per axis");
  }
  std::vector<float> values(dims.count());
  const Vec3 h = bbox.extent().cwiseQuotient(Vec3(dims.x - 1.0, dims.y - 1.0, dims.z - 1.0));
  std::int64_t idx = 0;
  for (int k = 0; k < dims.z; ++k) {
    for (int j = 0; j < dims.y; ++j) {
      for (int i = 0; i < dims.x; ++i) {
        const Vec3 p = bbox.min + Vec3(i * h[0], j * h[1], k * h[2]);
        values[idx++] = static_cast<float>(field.value(p));
      }
    }
  }
  if (noise && noise->sigma > 0.0) {
    std::mt19937_64 rng(noise->seed);
    std::normal_distribution<double> dist(0.0, noise->sigma);
    for (float& v : values) {
      v = static_cast<float>(std::max(0.0, static_cast<double>(v) + dist(rng)));
    }
  }
  return GridField(dims, bbox, std::move(values));
}

IsoValueCheck validate_iso_value(double r, int k, double d_max, double eta_min) {
  if (r <= 0.0 || k < 2) throw std::invalid_argument("validate_iso_value: need r > 0, k >= 2");
  IsoValueCheck check;
  check.lower_bound = std::max(1.0 / (2.0 * k), d_max);
  check.upper_bound = eta_min / 2.0;
  if (r < check.lower_bound) {
    check.ok = false;
    check.message = "iso-value " + std::to_string(r) + " is below the stability bound max{1/(2k), d_max} = " +
                    std::to_string(check.lower_bound);
  } else if (r > check.upper_bound) {
    check.ok = false;
    check.message = "iso-value " + std::to_string(r) + " exceeds eta_min/2 = " +
                    std::to_string(check.upper_bound) +
                    "; expect merged gaps (topology correction may recover them)";
  }
  return check;
}

// ---------------------------------------------------------------------------
// .udfgrid container

namespace {
constexpr char kMagic[4] = {'U', 'D', 'F', 'G'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_udfgrid(const GridField& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), 4);
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(grid.dims().x),
                                 static_cast<std::uint32_t>(grid.dims().y),
                                 static_cast<std::uint32_t>(grid.dims().z)};
  out.write(reinterpret_cast<const char*>(dims), 12);
  const double bbox[6] = {grid.bbox().min[0], grid.bbox().min[1], grid.bbox().min[2],
                          grid.bbox().max[0], grid.bbox().max[1], grid.bbox().max[2]};
  out.write(reinterpret_cast<const char*>(bbox), 48);
  out.write(reinterpret_cast<const char*>(grid.values().data()),
            static_cast<std::streamsize>(grid.values().size() * sizeof(float)));
  if (!out) throw std::runtime_error("write failure: " + path);
}

GridField load_udfgrid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error(path + ": not a .udfgrid file (bad magic)");
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != kVersion) {
    throw std::runtime_error(path + ": unsupported format version " + std::to_string(version));
  }
  std::uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), 12);
  double bbox[6];
  in.read(reinterpret_cast<char*>(bbox), 48);
  if (!in) throw std::runtime_error(path + ": truncated header");
  GridDims d{static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2])};
  std::vector<float> values(d.count());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!in) throw std::runtime_error(path + ": truncated value block");
  return GridField(d, Box3{Vec3(bbox[0], bbox[1], bbox[2]), Vec3(bbox[3], bbox[4], bbox[5])},
                   std::move(values));
}

}  // namespace udfsw
