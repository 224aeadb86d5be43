#include "fffheat/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fffheat {

namespace {

constexpr char kMagic[8] = {'F', 'F', 'F', 'G', 'R', 'D', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "grid binary format assumes a little-endian host");

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

void write_vtk_materials(const std::filesystem::path& path, const VoxelGrid& grid,
                         const std::string& title) {
    grid.validate();
    std::ofstream out = open_out(path, std::ios::out);
    out << "# vtk DataFile Version 3.0\n"
        << title << "\nASCII\nDATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << grid.nx + 1 << ' ' << grid.ny + 1 << ' ' << grid.nz + 1 << '\n'
        << "ORIGIN " << grid.origin[0] << ' ' << grid.origin[1] << ' ' << grid.origin[2]
        << '\n'
        << "SPACING " << grid.dx << ' ' << grid.dy << ' ' << grid.dz << '\n'
        << "CELL_DATA " << grid.cell_count() << '\n'
        << "SCALARS material int 1\nLOOKUP_TABLE default\n";
    for (std::size_t c = 0; c < grid.material.size(); ++c)
        out << static_cast<int>(grid.material[c]) << ((c + 1) % 20 == 0 ? '\n' : ' ');
    out << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_vtk_temperature(const std::filesystem::path& path, const TemperatureField& field,
                           const std::string& title) {
    const VoxelGrid& grid = *field.grid;
    if (field.values.size() != grid.node_count())
        throw std::invalid_argument("write_vtk_temperature: field/grid size mismatch");
    std::ofstream out = open_out(path, std::ios::out);
    out.precision(10);
    out << "# vtk DataFile Version 3.0\n"
        << title << " t=" << field.time << " s\nASCII\nDATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << grid.nx + 1 << ' ' << grid.ny + 1 << ' ' << grid.nz + 1 << '\n'
        << "ORIGIN " << grid.origin[0] << ' ' << grid.origin[1] << ' ' << grid.origin[2]
        << '\n'
        << "SPACING " << grid.dx << ' ' << grid.dy << ' ' << grid.dz << '\n'
        << "POINT_DATA " << grid.node_count() << '\n'
        << "SCALARS temperature_C double 1\nLOOKUP_TABLE default\n";
    for (std::size_t n = 0; n < field.values.size(); ++n)
        out << field.values[n] << ((n + 1) % 6 == 0 ? '\n' : ' ');
    out << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_grid_binary(const std::filesystem::path& path, const VoxelGrid& grid) {
    grid.validate();
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kMagic, sizeof(kMagic));
    const std::int64_t counts[3] = {grid.nx, grid.ny, grid.nz};
    out.write(reinterpret_cast<const char*>(counts), sizeof(counts));
    const double geo[6] = {grid.dx,        grid.dy,        grid.dz,
                           grid.origin[0], grid.origin[1], grid.origin[2]};
    out.write(reinterpret_cast<const char*>(geo), sizeof(geo));
    out.write(reinterpret_cast<const char*>(grid.material.data()),
              static_cast<std::streamsize>(grid.material.size()));
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

VoxelGrid read_grid_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::in | std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("'" + path.string() + "' is not a fffheat grid dump");

    std::int64_t counts[3];
    double geo[6];
    in.read(reinterpret_cast<char*>(counts), sizeof(counts));
    in.read(reinterpret_cast<char*>(geo), sizeof(geo));
    if (!in) throw std::runtime_error("truncated grid dump '" + path.string() + "'");

    VoxelGrid grid;
    grid.nx = static_cast<int>(counts[0]);
    grid.ny = static_cast<int>(counts[1]);
    grid.nz = static_cast<int>(counts[2]);
    grid.dx = geo[0];
    grid.dy = geo[1];
    grid.dz = geo[2];
    grid.origin = {geo[3], geo[4], geo[5]};
    if (grid.nx < 1 || grid.ny < 1 || grid.nz < 1)
        throw std::runtime_error("corrupt grid dump '" + path.string() + "'");
    grid.material.resize(grid.cell_count());
    in.read(reinterpret_cast<char*>(grid.material.data()),
            static_cast<std::streamsize>(grid.material.size()));
    if (!in || in.gcount() != static_cast<std::streamsize>(grid.material.size()))
        throw std::runtime_error("truncated grid dump '" + path.string() + "'");
    for (Material m : grid.material)
        if (m != Material::Air && m != Material::Pla)
            throw std::runtime_error("corrupt material labels in '" + path.string() + "'");
    grid.validate();
    return grid;
}

}  // namespace fffheat
