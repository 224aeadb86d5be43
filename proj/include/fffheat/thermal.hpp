#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "fffheat/materials.hpp"
#include "fffheat/sparse.hpp"
#include "fffheat/voxel_grid.hpp"

namespace fffheat {

// Boundary and timing data of one heating experiment. Temperatures in degC,
// h in W/(m^2 K), q_vol in W/m^3, times in s. The two ambient temperatures
// realize the split side/top convection zones; setting both to the room
// temperature or to a common elevated value recovers the simpler cases.
struct ThermalScenario {
    double bed_temperature = 56.0;             // T_b, Dirichlet at z = 0
    double initial_temperature = 25.0;         // T_a
    double ambient_side = 25.0;                // T_c at side faces
    double ambient_top = 25.0;                 // T_c at the top face
    double heat_transfer_coefficient = 25.0;   // h
    double volumetric_source = 0.0;            // q_vol
    double duration = 2400.0;
    double dt = 1.0;

    void validate() const;
};

struct TemperatureField {
    std::shared_ptr<const VoxelGrid> grid;
    std::vector<double> values;  // one per node, degC
    double time = 0.0;
};

// Top-surface probe traces sampled at 1 Hz.
struct ProbeSeries {
    std::vector<std::array<double, 2>> positions;   // (x, y) mm on the top face
    std::vector<double> times;                      // s
    std::vector<std::vector<double>> temperatures;  // [probe][sample]
    std::vector<double> mean;                       // [sample]
};

enum class FaceZone { Sides, Top };

struct RobinFace {
    std::array<std::size_t, 4> nodes;
    double area_m2 = 0.0;
    double h = 0.0;
    double ambient = 0.0;
};

// Assembled semi-discrete system C dT/dt + K T = F. K holds the conduction
// and Robin terms unconstrained; Dirichlet rows are recorded as a mask and
// eliminated when a solve operator is built.
struct ThermalSystem {
    std::shared_ptr<const VoxelGrid> grid;
    CsrMatrix conductivity;           // K, W/K
    std::vector<double> capacity;     // lumped C diagonal, J/K
    std::vector<double> load;         // F, W
    std::vector<std::uint8_t> fixed;  // Dirichlet mask per node
    std::vector<double> fixed_value;
    std::vector<RobinFace> robin_faces;
};

// Conductivity (2x2x2 Gauss, trilinear hexahedra) and row-sum lumped capacity
// with per-cell properties by material label.
ThermalSystem assemble(std::shared_ptr<const VoxelGrid> grid, const MaterialProperties& pla,
                       const MaterialProperties& air);

// Consistent 4-node face convection on one zone of the bounding-box surface.
void add_robin_faces(ThermalSystem& sys, FaceZone zone, double h, double ambient);

// Free-surface convection of the scenario: sides against ambient_side, top
// against ambient_top. h = 0 leaves the system untouched.
void apply_robin(ThermalSystem& sys, const ThermalScenario& scenario);

// Fix all nodes of the bed face z = 0 to T_b (row/column elimination happens
// when the solve operator is built, with the right-hand side corrected).
void apply_dirichlet(ThermalSystem& sys, double bed_temperature);

// Uniform volumetric source q_vol over the whole domain.
void add_volumetric_source(ThermalSystem& sys, double q_vol);

namespace detail {
// Fix an arbitrary node set; used by apply_dirichlet and by reference tests.
void constrain_nodes(ThermalSystem& sys, const std::vector<std::size_t>& nodes, double value);
}  // namespace detail

struct SolveOptions {
    double rel_tol = 1e-8;
    std::size_t max_iter = 0;  // 0: 10 * n
};

// One backward-Euler step (C/dt + K) T1 = C/dt T0 + F via Jacobi-PCG.
TemperatureField step(const TemperatureField& state, const ThermalSystem& sys, double dt,
                      const SolveOptions& solve = {});

std::vector<std::array<double, 2>> default_probe_positions(const VoxelGrid& grid);

struct TransientOptions {
    SolveOptions solve;
    std::vector<std::array<double, 2>> probes;  // empty: the five default probes
    double snapshot_every = 0.0;                // s; 0 disables
    std::function<void(const TemperatureField&)> snapshot;
};

struct TransientResult {
    ProbeSeries probes;
    TemperatureField final_field;
};

// Initialize T = T_a, march backward Euler to `duration`, sample the top-face
// probes at 1 Hz (bilinear in space, linear in time between steps).
TransientResult run_transient(std::shared_ptr<const VoxelGrid> grid,
                              const MaterialProperties& pla, const MaterialProperties& air,
                              const ThermalScenario& scenario,
                              const TransientOptions& options = {});

// Direct steady solve K T = F. Requires a Dirichlet face or h > 0.
TemperatureField steady_state(std::shared_ptr<const VoxelGrid> grid,
                              const MaterialProperties& pla, const MaterialProperties& air,
                              const ThermalScenario& scenario,
                              const SolveOptions& solve = {});
TemperatureField steady_state(const ThermalSystem& sys, const SolveOptions& solve = {});

// Bed reaction flux and total convective outflux of a steady field; the two
// agree to solver accuracy when q_vol = 0.
struct EnergyBalance {
    double bed_influx_w = 0.0;
    double convective_outflux_w = 0.0;
};
EnergyBalance steady_energy_balance(const ThermalSystem& sys, const TemperatureField& field);

// Probe readings on the top face by bilinear interpolation.
std::vector<double> sample_top_surface(const TemperatureField& field,
                                       const std::vector<std::array<double, 2>>& positions);

double mean_of(const std::vector<double>& v);

}  // namespace fffheat
