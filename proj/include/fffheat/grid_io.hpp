#pragma once

#include <filesystem>
#include <string>

#include "fffheat/thermal.hpp"
#include "fffheat/voxel_grid.hpp"

namespace fffheat {

// Legacy VTK structured-points file with the material labels as CELL_DATA
// (0 = air, 1 = PLA).
void write_vtk_materials(const std::filesystem::path& path, const VoxelGrid& grid,
                         const std::string& title = "fffheat voxel grid");

// Legacy VTK structured-points file with nodal temperature as POINT_DATA.
void write_vtk_temperature(const std::filesystem::path& path, const TemperatureField& field,
                           const std::string& title = "fffheat temperature");

// Compact binary dump: magic, little-endian int64 counts, float64 spacings
// and origin, then one material byte per cell.
void write_grid_binary(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid read_grid_binary(const std::filesystem::path& path);

}  // namespace fffheat
