#pragma once

#include <stdexcept>
#include <vector>

#include "udfsw/field.hpp"
#include "udfsw/mesh.hpp"

namespace udfsw {

// No cube edge crosses the iso-value; r is too large or too small.
struct EmptyLevelSet : std::runtime_error {
  explicit EmptyLevelSet(const std::string& what) : std::runtime_error(what) {}
};

struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Marching cubes on a raw lattice. Values may be signed (used by test
// oracles); vertices are merged exactly by global lattice-edge key and
// degenerate triangles are dropped. Winding is consistent with face normals
// pointing toward increasing value.
TriMesh marching_cubes_raw(const GridDims& dims, const Box3& bbox,
                           const std::vector<float>& values, double iso);

// Extraction of the double-cover mesh at iso-value r > 0.
// Throws EmptyLevelSet if the surface is empty.
TriMesh marching_cubes(const GridField& grid, double r);

// Makes per-component winding consistent and flips components so that
// gradient(centroid) . normal > 0 where the gradient is well defined.
// Throws ContractViolation on non-manifold input.
TriMesh orient_outward(TriMesh mesh, const ScalarField& field);

}  // namespace udfsw
