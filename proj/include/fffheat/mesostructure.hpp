#pragma once

#include <string>

#include "fffheat/voxel_grid.hpp"

namespace fffheat {

// Cross-section of an extruded filament. The layer height is named
// layer_height (h_l) rather than h to keep h for the heat transfer
// coefficient.
struct FilamentSection {
    double width_mm = 0.45;
    double layer_height_mm = 0.2;

    void validate() const;
};

// Diamond-shaped inter-filament air voids, parameterized by the dimensionless
// half-diagonal fraction a. Void area fraction of a filament cross-section is
// 2*a^2, so a must stay below 1/sqrt(2).
struct VoidGeometry {
    double a = 0.0;
    FilamentSection section;

    void validate() const;
};

// Mass / volume measurement of a printed sample, used to back out the real
// air content.
struct SampleMeasurement {
    double mass_g = 0.0;
    double total_volume_cm3 = 0.0;
    double density_g_cm3 = 1.24;
    double extrusion_factor = 1.0;

    void validate() const;
};

enum class InfillPattern { Rectilinear, Gyroid, Dense };

struct InfillSpec {
    InfillPattern pattern = InfillPattern::Dense;
    double density = 1.0;  // fraction of interior volume, (0, 1]
    int perimeter_walls = 2;
    int solid_top_bottom_layers = 0;
    double gyroid_period_mm = 6.0;

    void validate() const;
};

std::string to_string(InfillPattern p);
InfillPattern infill_pattern_from_string(const std::string& s);

// --- operations -----------------------------------------------------------

// v_fr;a = 2 a^2. Domain error outside 0 <= a < 1/sqrt(2).
double void_fraction_from_a(double a);

struct MeasuredFractions {
    double extruded_volume_cm3 = 0.0;  // V_extr = m / rho
    double filament_fraction = 0.0;    // v_fr;f
    double air_fraction = 0.0;         // v_fr;a
    double a = 0.0;                    // sqrt(v_fr;a / 2), clamped at 0
};

MeasuredFractions fractions_from_measurement(const SampleMeasurement& s);

// Dense grid with cell size matching the filament cross-section. In-plane the
// count is the largest odd number of whole filament widths that fits
// symmetrically inside the footprint; in z the layer count is rounded.
// Reproduces the 65 x 65 x 100 discretization of a 30 x 30 x 20 mm block.
VoxelGrid build_continuum_grid(double length_mm, double width_mm, double height_mm,
                               const FilamentSection& section);

// Continuum grid with each filament cross-section cell subdivided
// `subdivision` times in y and z, and diamond voids carved at the interior
// filament junctions (no voids on the outer skin). A sub-cell is AIR when its
// center falls inside a diamond. subdivision must be even, >= 4, and large
// enough that a*subdivision >= 1.
VoxelGrid build_void_grid(const VoidGeometry& geom, double length_mm, double width_mm,
                          double height_mm, int subdivision);

// Rasterized infill at the filament-sized lattice: perimeter walls are solid,
// interior cells follow the pattern at the requested density. Throws if the
// raster cannot realize the density within +-0.03, reporting the achievable
// fraction.
VoxelGrid build_infill_grid(const InfillSpec& spec, double length_mm, double width_mm,
                            double height_mm, const FilamentSection& section);

// Merge factor^3 blocks of cells (ceil division at the upper boundaries),
// keeping the physical outer dimensions. Material assignment is by PLA
// volume-fraction majority, followed by a density-preserving correction that
// flips the closest-to-the-threshold cells so the global PLA fraction is
// retained.
VoxelGrid coarsen(const VoxelGrid& grid, int factor);

}  // namespace fffheat
