#pragma once

#include <memory>
#include <string>
#include <vector>

#include "udfsw/field.hpp"
#include "udfsw/metrics.hpp"

namespace udfsw {

/// One synthetic benchmark case: an analytic field plus a ground-truth
/// sampling of its zero set.
struct Fixture {
  std::string name;
  std::unique_ptr<ScalarField> field;
  SampleCloud ground_truth;
  double eta_min = 1.0;  // smallest gap size, where meaningful
};

// The five standard fixtures: sphere, torus, disk, cylinder_plane, u_channel.
std::vector<Fixture> make_standard_fixtures(int gt_samples = 10000,
                                            std::uint64_t seed = 20240101);

Fixture make_fixture(const std::string& name, int gt_samples = 10000,
                     std::uint64_t seed = 20240101);

}  // namespace udfsw
