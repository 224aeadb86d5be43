#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fffheat/materials.hpp"
#include "fffheat/thermal.hpp"
#include "fffheat/voxel_grid.hpp"

namespace fffheat {

// Measured (or synthesized) top-surface temperature history, nominally 1 Hz.
struct ExperimentTrace {
    std::string specimen;
    std::vector<double> times;                // s, strictly increasing
    std::vector<double> mean;                 // degC
    std::vector<std::vector<double>> probes;  // optional, [probe][sample]

    double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
    void validate() const;
};

// Ambient-temperature hypotheses for the convective fit.
//   RoomTemperature: T_c,side = T_c,top = T_a (only h is free)
//   UniformElevated: T_c,side = T_c,top, both fitted
//   SideTopSplit:    T_c,side and T_c,top fitted independently
enum class AmbientCase { RoomTemperature = 1, UniformElevated = 2, SideTopSplit = 3 };

struct ParameterRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct CalibrationProblem {
    AmbientCase ambient_case = AmbientCase::SideTopSplit;
    ExperimentTrace trace;
    std::shared_ptr<const VoxelGrid> grid;
    MaterialProperties pla = pla_properties();
    MaterialProperties air = air_properties();
    ThermalScenario scenario;  // T_b, T_a, duration, dt fixed; convective fields fitted
    ParameterRange h_range{5.0, 60.0};
    ParameterRange side_range{25.0, 56.0};
    ParameterRange top_range{25.0, 56.0};
    int lattice_points = 4;       // per free parameter
    int coarse_search_factor = 1; // >= 2: search on a coarsened grid, polish on the full one
    int threads = 0;              // lattice workers; 0: all cores

    void validate() const;
};

struct CostEntry {
    double h = 0.0;
    double ambient_side = 0.0;
    double ambient_top = 0.0;
    double rmse = 0.0;
    std::string stage;  // "sweep" or "refine"
};

struct FitResult {
    double h = 0.0;
    double ambient_side = 0.0;
    double ambient_top = 0.0;
    double rmse = 0.0;
    std::vector<CostEntry> evaluations;
};

// RMSE between the simulated mean trace and the experimental mean trace over
// the shared time range, with the experiment linearly interpolated onto the
// simulation sample times.
double trace_cost(const ProbeSeries& sim, const ExperimentTrace& exp);

// Evaluate every lattice point of the case's free parameters.
std::vector<CostEntry> sweep(const CalibrationProblem& problem);

// Lattice sweep followed by Nelder-Mead refinement from the best point.
FitResult fit(const CalibrationProblem& problem);

struct ValidationEntry {
    std::string specimen;
    double rmse = 0.0;
    double steady_gap = 0.0;           // |sim - exp| at the final shared sample, degC
    double steady_gap_pct_rise = 0.0;  // as % of the experimental rise above T_a
};

// Re-simulate each specimen with the fitted parameters held fixed.
std::vector<ValidationEntry> validate(const FitResult& fitted,
                                      const std::vector<CalibrationProblem>& problems);

// Scenario with the case's parameter vector substituted.
ThermalScenario scenario_for(const CalibrationProblem& problem,
                             const std::vector<double>& params);

// Free-parameter count of a case (1, 2 or 3).
int free_parameter_count(AmbientCase c);

}  // namespace fffheat
