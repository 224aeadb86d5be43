#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "fffheat/calibration.hpp"
#include "fffheat/materials.hpp"
#include "fffheat/mesostructure.hpp"
#include "fffheat/thermal.hpp"
#include "fffheat/voxel_grid.hpp"

namespace fffheat {

struct GeometryConfig {
    double length_mm = 30.0;
    double width_mm = 30.0;
    double height_mm = 20.0;
    FilamentSection section;
    InfillSpec infill;                           // ignored when void_geometry is set
    std::optional<VoidGeometry> void_geometry;   // diamond inter-filament voids
    int void_subdivision = 8;
    int coarsen_factor = 1;  // applied after generation; 1 disables
};

struct OutputConfig {
    std::string directory = "out";
    double snapshot_every_s = 0.0;  // 0 disables VTK snapshots
};

struct CalibrationConfig {
    AmbientCase ambient_case = AmbientCase::SideTopSplit;
    std::string experiment_csv;
    ParameterRange h_range{5.0, 60.0};
    ParameterRange side_range{25.0, 56.0};
    ParameterRange top_range{25.0, 56.0};
    int lattice_points = 4;
    bool coarse_sweep = false;     // search on a coarsened mesh, polish full
    int sweep_coarsen_factor = 5;
};

struct RunConfig {
    std::string name;
    GeometryConfig geometry;
    MaterialProperties pla = pla_properties();
    MaterialProperties air = air_properties();
    ThermalScenario scenario;
    OutputConfig output;
    std::optional<CalibrationConfig> calibration;
};

// Parse and fully validate a JSON run configuration; missing fields take the
// documented defaults, invalid fields report their path and constraint.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Serialization such that parse(emit(c)) == c.
std::string emit_config(const RunConfig& config);

// VoxelGrid for a config's geometry block, including coarsening.
VoxelGrid build_grid(const GeometryConfig& geometry);

// Calibration problem assembled from a config (reads the experiment CSV).
CalibrationProblem make_calibration_problem(const RunConfig& config,
                                            const std::filesystem::path& base_dir = {});

}  // namespace fffheat
