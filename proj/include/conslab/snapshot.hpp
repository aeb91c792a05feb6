#pragma once

#include <filesystem>
#include <vector>

#include "conslab/field.hpp"

namespace conslab {

/// Field snapshot file ("CSLB1"):
///   5 magic bytes "CSLB1"
///   u32 N1, u32 N2, u32 Nz, u32 component count      (little-endian)
///   f64 L1, f64 L2, f64 Zmax, f64 stretch            (little-endian)
///   components, each N1*N2*Nz f64 in row-major (i1, i2, k) order.
struct Snapshot {
  GridPtr grid;
  std::vector<ScalarField> components;
};

void write_snapshot(const std::filesystem::path& path, const std::vector<ScalarField>& components);
void write_snapshot(const std::filesystem::path& path, const VectorField& u);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace conslab
