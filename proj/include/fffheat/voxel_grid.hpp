#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fffheat {

enum class Material : std::uint8_t { Air = 0, Pla = 1 };

// Structured hexahedral grid of an FFF specimen. Cell (i,j,k) occupies
// [i*dx,(i+1)*dx] x [j*dy,(j+1)*dy] x [k*dz,(k+1)*dz] in mm relative to
// `origin`. The bed-contact face is z = 0; the remaining exterior faces form
// the free surface (sides and top). `material` is cell-major with i fastest.
//
// Grids are immutable after construction and safe to share between threads.
struct VoxelGrid {
    int nx = 0, ny = 0, nz = 0;           // cell counts
    double dx = 0.0, dy = 0.0, dz = 0.0;  // cell dimensions, mm
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    std::vector<Material> material;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
    std::size_t node_count() const {
        return static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1);
    }
    std::size_t cell_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    std::size_t node_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * (ny + 1) + j) * (nx + 1) + i;
    }
    Material at(int i, int j, int k) const { return material[cell_index(i, j, k)]; }

    double length_mm() const { return nx * dx; }
    double width_mm() const { return ny * dy; }
    double height_mm() const { return nz * dz; }
    double cell_volume_mm3() const { return dx * dy * dz; }

    std::size_t pla_cell_count() const {
        std::size_t n = 0;
        for (Material m : material) n += (m == Material::Pla);
        return n;
    }
    double pla_fraction() const {
        return material.empty() ? 0.0
                                : static_cast<double>(pla_cell_count()) / material.size();
    }

    void validate() const;  // throws std::invalid_argument on inconsistency
};

}  // namespace fffheat
