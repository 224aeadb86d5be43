#include "fffheat/mesostructure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fffheat {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

void VoxelGrid::validate() const {
    if (nx < 1 || ny < 1 || nz < 1)
        throw std::invalid_argument("VoxelGrid: cell counts must be >= 1");
    if (!(dx > 0.0) || !(dy > 0.0) || !(dz > 0.0))
        throw std::invalid_argument("VoxelGrid: cell spacings must be > 0");
    if (material.size() != cell_count())
        throw std::invalid_argument("VoxelGrid: material size does not match cell count");
}

void FilamentSection::validate() const {
    if (!(width_mm > 0.0))
        throw std::invalid_argument("FilamentSection: width must be > 0");
    if (!(layer_height_mm > 0.0))
        throw std::invalid_argument("FilamentSection: layer_height must be > 0");
}

void VoidGeometry::validate() const {
    section.validate();
    if (!(a >= 0.0) || a >= kInvSqrt2)
        throw std::domain_error("VoidGeometry: a must satisfy 0 <= a < 1/sqrt(2), got " + fmt(a));
}

void SampleMeasurement::validate() const {
    if (!(mass_g > 0.0)) throw std::invalid_argument("SampleMeasurement: mass must be > 0");
    if (!(total_volume_cm3 > 0.0))
        throw std::invalid_argument("SampleMeasurement: total_volume must be > 0");
    if (!(density_g_cm3 > 0.0))
        throw std::invalid_argument("SampleMeasurement: density must be > 0");
}

void InfillSpec::validate() const {
    if (!(density > 0.0) || density > 1.0)
        throw std::invalid_argument("InfillSpec: density must be in (0, 1], got " + fmt(density));
    if (pattern == InfillPattern::Dense && density != 1.0)
        throw std::invalid_argument("InfillSpec: dense pattern requires density = 1");
    if (perimeter_walls < 0)
        throw std::invalid_argument("InfillSpec: perimeter_walls must be >= 0");
    if (solid_top_bottom_layers < 0)
        throw std::invalid_argument("InfillSpec: solid_top_bottom_layers must be >= 0");
    if (!(gyroid_period_mm > 0.0))
        throw std::invalid_argument("InfillSpec: gyroid_period must be > 0");
}

std::string to_string(InfillPattern p) {
    switch (p) {
        case InfillPattern::Rectilinear: return "rectilinear";
        case InfillPattern::Gyroid: return "gyroid";
        case InfillPattern::Dense: return "dense";
    }
    return "dense";
}

InfillPattern infill_pattern_from_string(const std::string& s) {
    if (s == "rectilinear") return InfillPattern::Rectilinear;
    if (s == "gyroid") return InfillPattern::Gyroid;
    if (s == "dense") return InfillPattern::Dense;
    throw std::invalid_argument("unknown infill pattern '" + s +
                                "' (expected rectilinear, gyroid or dense)");
}

double void_fraction_from_a(double a) {
    if (!(a >= 0.0) || a >= kInvSqrt2)
        throw std::domain_error("void_fraction_from_a: a must be in [0, 1/sqrt(2)), got " +
                                fmt(a));
    return 2.0 * a * a;
}

MeasuredFractions fractions_from_measurement(const SampleMeasurement& s) {
    s.validate();
    // Measurement slack: caliper volume may come out slightly below m/rho.
    constexpr double kVolumeTolerance = 0.02;

    MeasuredFractions out;
    out.extruded_volume_cm3 = s.mass_g / s.density_g_cm3;
    out.filament_fraction = out.extruded_volume_cm3 / s.total_volume_cm3;
    out.air_fraction = 1.0 - out.filament_fraction;
    if (out.air_fraction < -kVolumeTolerance)
        throw std::invalid_argument(
            "fractions_from_measurement: extruded volume m/rho = " +
            fmt(out.extruded_volume_cm3) + " cm^3 exceeds the measured total volume " +
            fmt(s.total_volume_cm3) + " cm^3 beyond tolerance");
    out.a = std::sqrt(std::max(0.0, out.air_fraction) / 2.0);
    return out;
}

namespace {

// Largest odd count of whole filament widths fitting symmetrically inside the
// footprint span. Matches the 65-element edge of the reference 30 mm / 0.45 mm
// discretization.
int in_plane_cell_count(double span_mm, double width_mm) {
    const double q = span_mm / width_mm;
    int n = static_cast<int>(std::floor(q + 1e-9));
    if (n >= 1 && n % 2 == 0) --n;
    return n;
}

int layer_count(double height_mm, double layer_height_mm) {
    return static_cast<int>(std::floor(height_mm / layer_height_mm + 0.5));
}

VoxelGrid make_grid(int nx, int ny, int nz, double length_mm, double width_mm,
                    double height_mm, Material fill) {
    VoxelGrid g;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    g.dx = length_mm / nx;
    g.dy = width_mm / ny;
    g.dz = height_mm / nz;
    g.material.assign(g.cell_count(), fill);
    return g;
}

}  // namespace

VoxelGrid build_continuum_grid(double length_mm, double width_mm, double height_mm,
                               const FilamentSection& section) {
    section.validate();
    if (!(length_mm > 0.0) || !(width_mm > 0.0) || !(height_mm > 0.0))
        throw std::invalid_argument("build_continuum_grid: dimensions must be > 0");

    const int nx = in_plane_cell_count(length_mm, section.width_mm);
    const int ny = in_plane_cell_count(width_mm, section.width_mm);
    const int nz = layer_count(height_mm, section.layer_height_mm);
    if (nx < 1 || ny < 1 || nz < 1)
        throw std::invalid_argument(
            "build_continuum_grid: dimensions " + fmt(length_mm) + " x " + fmt(width_mm) +
            " x " + fmt(height_mm) + " mm are too small for the filament section");

    VoxelGrid g = make_grid(nx, ny, nz, length_mm, width_mm, height_mm, Material::Pla);
    g.validate();
    return g;
}

VoxelGrid build_void_grid(const VoidGeometry& geom, double length_mm, double width_mm,
                          double height_mm, int subdivision) {
    geom.validate();
    if (subdivision < 4 || subdivision % 2 != 0)
        throw std::invalid_argument("build_void_grid: subdivision must be even and >= 4");
    if (geom.a > 0.0 && geom.a * subdivision < 1.0)
        throw std::invalid_argument(
            "build_void_grid: subdivision " + fmt(subdivision) +
            " is too small to resolve a = " + fmt(geom.a) + " (need a*subdivision >= 1)");

    const VoxelGrid base =
        build_continuum_grid(length_mm, width_mm, height_mm, geom.section);
    const int s = subdivision;
    VoxelGrid g = make_grid(base.nx, base.ny * s, base.nz * s, length_mm, width_mm,
                            height_mm, Material::Pla);
    if (geom.a > 0.0) {
        // Diamonds sit where four filaments meet: at the interior junctions of
        // the base lattice in the y-z cross-section. Half-diagonals are a
        // filament width / layer height, i.e. a base cell in relative units.
        const double a = geom.a;
        for (int k = 0; k < g.nz; ++k) {
            const double zc = (k + 0.5) / s;  // in base-cell units
            const double znear = std::floor(zc + 0.5);
            if (znear < 0.5 || znear > base.nz - 0.5) continue;  // skin, no void
            const double vz = std::abs(zc - znear);
            if (vz >= a) continue;
            for (int j = 0; j < g.ny; ++j) {
                const double yc = (j + 0.5) / s;
                const double ynear = std::floor(yc + 0.5);
                if (ynear < 0.5 || ynear > base.ny - 0.5) continue;
                const double vy = std::abs(yc - ynear);
                if (vy / a + vz / a <= 1.0) {
                    const std::size_t row = g.cell_index(0, j, k);
                    std::fill_n(g.material.begin() + row, g.nx, Material::Air);
                }
            }
        }
    }
    g.validate();
    return g;
}

namespace {

// One raster line every 1/density rows, spread evenly (Bresenham-style) so any
// density in (0,1] maps to the closest realizable line count.
bool raster_row_is_solid(int row, double density) {
    return std::floor((row + 1) * density) > std::floor(row * density);
}

double gyroid_value(double x, double y, double z, double period) {
    const double w = 2.0 * M_PI / period;
    return std::sin(w * x) * std::cos(w * y) + std::sin(w * y) * std::cos(w * z) +
           std::sin(w * z) * std::cos(w * x);
}

}  // namespace

VoxelGrid build_infill_grid(const InfillSpec& spec, double length_mm, double width_mm,
                            double height_mm, const FilamentSection& section) {
    spec.validate();
    VoxelGrid g = build_continuum_grid(length_mm, width_mm, height_mm, section);
    if (spec.pattern == InfillPattern::Dense) return g;

    const int walls = spec.perimeter_walls;
    const int solid = spec.solid_top_bottom_layers;
    const int ix0 = walls, ix1 = g.nx - walls;
    const int iy0 = walls, iy1 = g.ny - walls;
    const int iz0 = solid, iz1 = g.nz - solid;
    if (ix1 - ix0 < 1 || iy1 - iy0 < 1 || iz1 - iz0 < 1)
        throw std::invalid_argument(
            "build_infill_grid: no interior cells left after " + fmt(walls) +
            " perimeter walls and " + fmt(solid) + " solid layers");

    std::size_t interior = 0, interior_pla = 0;
    if (spec.pattern == InfillPattern::Rectilinear) {
        for (int k = iz0; k < iz1; ++k) {
            const bool lines_along_x = (k % 2 == 0);
            for (int j = iy0; j < iy1; ++j) {
                for (int i = ix0; i < ix1; ++i) {
                    const int row = lines_along_x ? (j - iy0) : (i - ix0);
                    const bool pla = raster_row_is_solid(row, spec.density);
                    if (!pla) g.material[g.cell_index(i, j, k)] = Material::Air;
                    ++interior;
                    interior_pla += pla;
                }
            }
        }
    } else {  // Gyroid: |g(x,y,z)| <= t, t bisected to hit the density.
        const double period = spec.gyroid_period_mm;
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(ix1 - ix0) * (iy1 - iy0) * (iz1 - iz0));
        for (int k = iz0; k < iz1; ++k)
            for (int j = iy0; j < iy1; ++j)
                for (int i = ix0; i < ix1; ++i)
                    values.push_back(std::abs(gyroid_value((i + 0.5) * g.dx, (j + 0.5) * g.dy,
                                                           (k + 0.5) * g.dz, period)));
        interior = values.size();
        const auto fraction_at = [&](double t) {
            std::size_t c = 0;
            for (double v : values) c += (v <= t);
            return static_cast<double>(c) / values.size();
        };
        double lo = 0.0, hi = 1.5;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (fraction_at(mid) < spec.density ? lo : hi) = mid;
        }
        const double t = hi;
        std::size_t idx = 0;
        for (int k = iz0; k < iz1; ++k)
            for (int j = iy0; j < iy1; ++j)
                for (int i = ix0; i < ix1; ++i, ++idx) {
                    const bool pla = values[idx] <= t;
                    if (!pla) g.material[g.cell_index(i, j, k)] = Material::Air;
                    interior_pla += pla;
                }
    }

    const double achieved = static_cast<double>(interior_pla) / interior;
    if (std::abs(achieved - spec.density) > 0.03)
        throw std::runtime_error("build_infill_grid: requested density " + fmt(spec.density) +
                                 " is unreachable at this raster resolution; achieved " +
                                 fmt(achieved));
    return g;
}

VoxelGrid coarsen(const VoxelGrid& grid, int factor) {
    grid.validate();
    if (factor < 2) throw std::invalid_argument("coarsen: factor must be >= 2");

    const int f = factor;
    const int nx = (grid.nx + f - 1) / f;
    const int ny = (grid.ny + f - 1) / f;
    const int nz = (grid.nz + f - 1) / f;
    VoxelGrid g = make_grid(nx, ny, nz, grid.length_mm(), grid.width_mm(),
                            grid.height_mm(), Material::Pla);
    g.origin = grid.origin;

    std::vector<double> fraction(g.cell_count(), 0.0);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::size_t pla = 0, total = 0;
                for (int kk = k * f; kk < std::min((k + 1) * f, grid.nz); ++kk)
                    for (int jj = j * f; jj < std::min((j + 1) * f, grid.ny); ++jj)
                        for (int ii = i * f; ii < std::min((i + 1) * f, grid.nx); ++ii) {
                            pla += (grid.at(ii, jj, kk) == Material::Pla);
                            ++total;
                        }
                const std::size_t c = g.cell_index(i, j, k);
                fraction[c] = static_cast<double>(pla) / total;
                g.material[c] = fraction[c] >= 0.5 ? Material::Pla : Material::Air;
            }

    // Majority voting alone loses thin rasters (a 50% line pattern ties in
    // every block), so flip the closest-to-threshold cells until the global
    // PLA volume fraction is preserved. Ties scatter by a fixed hash to keep
    // the result deterministic and spatially uniform.
    const double target_pla = grid.pla_fraction() * grid.cell_count() *
                              grid.cell_volume_mm3() / g.cell_volume_mm3();
    long deficit = static_cast<long>(std::llround(target_pla)) -
                   static_cast<long>(g.pla_cell_count());
    if (deficit != 0) {
        std::vector<std::size_t> order(g.cell_count());
        std::iota(order.begin(), order.end(), 0);
        const auto scatter = [](std::size_t c) {
            std::uint64_t h = c * 0x9e3779b97f4a7c15ull;
            h ^= h >> 31;
            return h;
        };
        if (deficit > 0) {  // promote the most-PLA air cells
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (fraction[a] != fraction[b]) return fraction[a] > fraction[b];
                return scatter(a) < scatter(b);
            });
            for (std::size_t c : order) {
                if (deficit == 0) break;
                if (g.material[c] == Material::Air) {
                    g.material[c] = Material::Pla;
                    --deficit;
                }
            }
        } else {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (fraction[a] != fraction[b]) return fraction[a] < fraction[b];
                return scatter(a) < scatter(b);
            });
            for (std::size_t c : order) {
                if (deficit == 0) break;
                if (g.material[c] == Material::Pla) {
                    g.material[c] = Material::Air;
                    ++deficit;
                }
            }
        }
    }
    return g;
}

}  // namespace fffheat
