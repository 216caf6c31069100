#include "udfsw/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace udfsw {

namespace {

constexpr double kPi = std::numbers::pi;

SampleCloud sample_sphere(const SphereParams& p, int count, std::uint64_t seed) {
  SampleCloud cloud;
  cloud.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    Vec3 d(gauss(rng), gauss(rng), gauss(rng));
    cloud.points.push_back(p.center + p.radius * d.normalized());
  }
  return cloud;
}

SampleCloud sample_torus(const TorusParams& p, int count, std::uint64_t seed) {
  SampleCloud cloud;
  cloud.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  // Area element proportional to R + r cos(theta): rejection on theta.
  while (static_cast<int>(cloud.points.size()) < count) {
    const double phi = 2.0 * kPi * uni(rng);
    const double theta = 2.0 * kPi * uni(rng);
    const double accept = (p.major_radius + p.minor_radius * std::cos(theta)) /
                          (p.major_radius + p.minor_radius);
    if (uni(rng) > accept) continue;
    const double rho = p.major_radius + p.minor_radius * std::cos(theta);
    cloud.points.push_back(p.center + Vec3(rho * std::cos(phi), rho * std::sin(phi),
                                           p.minor_radius * std::sin(theta)));
  }
  return cloud;
}

SampleCloud sample_disk(const DiskParams& p, int count, std::uint64_t seed) {
  SampleCloud cloud;
  cloud.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    const double r = p.radius * std::sqrt(uni(rng));
    const double phi = 2.0 * kPi * uni(rng);
    cloud.points.push_back(p.center + Vec3(r * std::cos(phi), r * std::sin(phi), 0.0));
  }
  return cloud;
}

SampleCloud sample_cylinder_plane(const CylinderPlaneParams& p, int count,
                                  std::uint64_t seed) {
  SampleCloud cloud;
  cloud.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double lateral = 2.0 * kPi * p.cylinder_radius * p.cylinder_height;
  const double caps = 2.0 * kPi * p.cylinder_radius * p.cylinder_radius;
  const double rect = 4.0 * p.plane_half_extent * p.plane_half_extent;
  const double total = lateral + caps + rect;
  const double z0 = p.plane_z + p.gap;  // cylinder bottom
  for (int i = 0; i < count; ++i) {
    const double pickr = uni(rng) * total;
    if (pickr < lateral) {
      const double phi = 2.0 * kPi * uni(rng);
      cloud.points.emplace_back(p.cylinder_radius * std::cos(phi),
                                p.cylinder_radius * std::sin(phi),
                                z0 + uni(rng) * p.cylinder_height);
    } else if (pickr < lateral + caps) {
      const double r = p.cylinder_radius * std::sqrt(uni(rng));
      const double phi = 2.0 * kPi * uni(rng);
      const double z = uni(rng) < 0.5 ? z0 : z0 + p.cylinder_height;
      cloud.points.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    } else {
      cloud.points.emplace_back((2.0 * uni(rng) - 1.0) * p.plane_half_extent,
                                (2.0 * uni(rng) - 1.0) * p.plane_half_extent, p.plane_z);
    }
  }
  return cloud;
}

}  // namespace

Fixture make_fixture(const std::string& name, int gt_samples, std::uint64_t seed) {
  Fixture fx;
  fx.name = name;
  if (name == "sphere") {
    SphereParams p;
    fx.field = make_sphere_field(p);
    fx.ground_truth = sample_sphere(p, gt_samples, seed);
    fx.eta_min = 2.0 * p.radius;
  } else if (name == "torus") {
    TorusParams p;
    fx.field = make_torus_field(p);
    fx.ground_truth = sample_torus(p, gt_samples, seed);
    fx.eta_min = 2.0 * (p.major_radius - p.minor_radius);
  } else if (name == "disk") {
    DiskParams p;
    fx.field = make_disk_field(p);
    fx.ground_truth = sample_disk(p, gt_samples, seed);
    fx.eta_min = 1.0;  // no interior gap
  } else if (name == "cylinder_plane") {
    CylinderPlaneParams p;
    fx.field = make_cylinder_plane_field(p);
    fx.ground_truth = sample_cylinder_plane(p, gt_samples, seed);
    fx.eta_min = p.gap;
  } else if (name == "u_channel") {
    UChannelParams p;
    fx.field = make_u_channel_field(p);
    fx.ground_truth = sample_mesh_surface(u_channel_mesh(p), gt_samples, seed);
    fx.eta_min = 2.0 * p.slot_half_width;
  } else {
    throw std::invalid_argument("unknown fixture: " + name);
  }
  return fx;
}

std::vector<Fixture> make_standard_fixtures(int gt_samples, std::uint64_t seed) {
  std::vector<Fixture> out;
  for (const char* name : {"sphere", "torus", "disk", "cylinder_plane", "u_channel"}) {
    out.push_back(make_fixture(name, gt_samples, seed));
  }
  return out;
}

}  // namespace udfsw
