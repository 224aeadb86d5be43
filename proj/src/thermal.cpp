#include "fffheat/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fffheat {

void ThermalScenario::validate() const {
    if (!(duration > 0.0)) throw std::invalid_argument("ThermalScenario: duration must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("ThermalScenario: dt must be > 0");
    if (heat_transfer_coefficient < 0.0)
        throw std::invalid_argument("ThermalScenario: h must be >= 0");
}

namespace {

constexpr double kMmToM = 1e-3;

// Trilinear hexahedron on an hx x hy x hz brick (meters). Local node
// n = ix + 2*jy + 4*kz with (ix, jy, kz) in {0,1}^3.
struct ElementMatrices {
    double k_unit[8][8] = {};  // conductivity integrals for K_0 = 1
    double lumped[8] = {};     // row sums of the consistent mass, rho*c_p = 1
};

ElementMatrices element_matrices(double hx, double hy, double hz) {
    ElementMatrices em;
    const double g = 1.0 / std::sqrt(3.0);
    const double det_j = hx * hy * hz / 8.0;
    double consistent[8][8] = {};
    for (int gp = 0; gp < 8; ++gp) {
        const double xi = (gp & 1) ? g : -g;
        const double eta = (gp & 2) ? g : -g;
        const double zeta = (gp & 4) ? g : -g;
        double shape[8], grad[8][3];
        for (int n = 0; n < 8; ++n) {
            const double sx = (n & 1) ? 1.0 : -1.0;
            const double sy = (n & 2) ? 1.0 : -1.0;
            const double sz = (n & 4) ? 1.0 : -1.0;
            shape[n] = (1 + sx * xi) * (1 + sy * eta) * (1 + sz * zeta) / 8.0;
            grad[n][0] = sx * (1 + sy * eta) * (1 + sz * zeta) / 8.0 * (2.0 / hx);
            grad[n][1] = (1 + sx * xi) * sy * (1 + sz * zeta) / 8.0 * (2.0 / hy);
            grad[n][2] = (1 + sx * xi) * (1 + sy * eta) * sz / 8.0 * (2.0 / hz);
        }
        for (int n = 0; n < 8; ++n)
            for (int m = 0; m < 8; ++m) {
                em.k_unit[n][m] += (grad[n][0] * grad[m][0] + grad[n][1] * grad[m][1] +
                                    grad[n][2] * grad[m][2]) *
                                   det_j;
                consistent[n][m] += shape[n] * shape[m] * det_j;
            }
    }
    for (int n = 0; n < 8; ++n)
        for (int m = 0; m < 8; ++m) em.lumped[n] += consistent[n][m];
    return em;
}

}  // namespace

ThermalSystem assemble(std::shared_ptr<const VoxelGrid> grid, const MaterialProperties& pla,
                       const MaterialProperties& air) {
    grid->validate();
    pla.validate();
    air.validate();
    const VoxelGrid& g = *grid;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const ElementMatrices em =
        element_matrices(g.dx * kMmToM, g.dy * kMmToM, g.dz * kMmToM);
    const double k0[2] = {air.conductivity, pla.conductivity};
    const double rho_cp[2] = {air.density * air.specific_heat,
                              pla.density * pla.specific_heat};

    ThermalSystem sys;
    sys.grid = grid;
    const std::size_t n_nodes = g.node_count();
    sys.capacity.assign(n_nodes, 0.0);
    sys.load.assign(n_nodes, 0.0);
    sys.fixed.assign(n_nodes, 0);
    sys.fixed_value.assign(n_nodes, 0.0);

    CsrMatrix& K = sys.conductivity;
    K.n = n_nodes;
    K.row_ptr.assign(n_nodes + 1, 0);

    const auto span = [](int idx, int count) { return (idx > 0) + 1 + (idx < count); };
    std::size_t nnz = 0;
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                nnz += static_cast<std::size_t>(span(i, nx)) * span(j, ny) * span(k, nz);
                K.row_ptr[g.node_index(i, j, k) + 1] = nnz;
            }
    K.cols.resize(nnz);
    K.vals.assign(nnz, 0.0);

    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                double slots[27] = {};
                for (int cz = k - 1; cz <= k; ++cz) {
                    if (cz < 0 || cz >= nz) continue;
                    for (int cy = j - 1; cy <= j; ++cy) {
                        if (cy < 0 || cy >= ny) continue;
                        for (int cx = i - 1; cx <= i; ++cx) {
                            if (cx < 0 || cx >= nx) continue;
                            const int mat = static_cast<int>(g.at(cx, cy, cz));
                            const double scale = k0[mat];
                            const int ln = (i - cx) + 2 * (j - cy) + 4 * (k - cz);
                            for (int lm = 0; lm < 8; ++lm) {
                                const int di = cx + (lm & 1) - i;
                                const int dj = cy + ((lm >> 1) & 1) - j;
                                const int dk = cz + (lm >> 2) - k;
                                slots[(dk + 1) * 9 + (dj + 1) * 3 + (di + 1)] +=
                                    scale * em.k_unit[ln][lm];
                            }
                        }
                    }
                }
                std::size_t e = K.row_ptr[g.node_index(i, j, k)];
                for (int dk = -1; dk <= 1; ++dk) {
                    if (k + dk < 0 || k + dk > nz) continue;
                    for (int dj = -1; dj <= 1; ++dj) {
                        if (j + dj < 0 || j + dj > ny) continue;
                        for (int di = -1; di <= 1; ++di) {
                            if (i + di < 0 || i + di > nx) continue;
                            K.cols[e] = static_cast<std::int32_t>(
                                g.node_index(i + di, j + dj, k + dk));
                            K.vals[e] = slots[(dk + 1) * 9 + (dj + 1) * 3 + (di + 1)];
                            ++e;
                        }
                    }
                }
            }

    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double rc = rho_cp[static_cast<int>(g.at(i, j, k))];
                for (int lm = 0; lm < 8; ++lm)
                    sys.capacity[g.node_index(i + (lm & 1), j + ((lm >> 1) & 1),
                                              k + (lm >> 2))] += rc * em.lumped[lm];
            }
    return sys;
}

namespace {

// Consistent convection matrix of a bilinear face, times area/36. Node order
// (0,0), (1,0), (0,1), (1,1).
constexpr double kFaceMatrix[4][4] = {
    {4, 2, 2, 1}, {2, 4, 1, 2}, {2, 1, 4, 2}, {1, 2, 2, 4}};

void add_face(ThermalSystem& sys, const std::array<std::size_t, 4>& nodes, double area_m2,
              double h, double ambient) {
    CsrMatrix& K = sys.conductivity;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b)
            K.vals[K.entry_index(nodes[a], static_cast<std::int32_t>(nodes[b]))] +=
                h * kFaceMatrix[a][b] * area_m2 / 36.0;
        sys.load[nodes[a]] += h * ambient * area_m2 / 4.0;
    }
    sys.robin_faces.push_back({nodes, area_m2, h, ambient});
}

}  // namespace

void add_robin_faces(ThermalSystem& sys, FaceZone zone, double h, double ambient) {
    if (h < 0.0) throw std::invalid_argument("add_robin_faces: h must be >= 0");
    if (h == 0.0) return;
    const VoxelGrid& g = *sys.grid;
    const double dx = g.dx * kMmToM, dy = g.dy * kMmToM, dz = g.dz * kMmToM;

    if (zone == FaceZone::Top) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                add_face(sys,
                         {g.node_index(i, j, g.nz), g.node_index(i + 1, j, g.nz),
                          g.node_index(i, j + 1, g.nz), g.node_index(i + 1, j + 1, g.nz)},
                         dx * dy, h, ambient);
        return;
    }
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            add_face(sys,
                     {g.node_index(0, j, k), g.node_index(0, j + 1, k),
                      g.node_index(0, j, k + 1), g.node_index(0, j + 1, k + 1)},
                     dy * dz, h, ambient);
            add_face(sys,
                     {g.node_index(g.nx, j, k), g.node_index(g.nx, j + 1, k),
                      g.node_index(g.nx, j, k + 1), g.node_index(g.nx, j + 1, k + 1)},
                     dy * dz, h, ambient);
        }
        for (int i = 0; i < g.nx; ++i) {
            add_face(sys,
                     {g.node_index(i, 0, k), g.node_index(i + 1, 0, k),
                      g.node_index(i, 0, k + 1), g.node_index(i + 1, 0, k + 1)},
                     dx * dz, h, ambient);
            add_face(sys,
                     {g.node_index(i, g.ny, k), g.node_index(i + 1, g.ny, k),
                      g.node_index(i, g.ny, k + 1), g.node_index(i + 1, g.ny, k + 1)},
                     dx * dz, h, ambient);
        }
    }
}

void apply_robin(ThermalSystem& sys, const ThermalScenario& scenario) {
    add_robin_faces(sys, FaceZone::Sides, scenario.heat_transfer_coefficient,
                    scenario.ambient_side);
    add_robin_faces(sys, FaceZone::Top, scenario.heat_transfer_coefficient,
                    scenario.ambient_top);
}

void apply_dirichlet(ThermalSystem& sys, double bed_temperature) {
    const VoxelGrid& g = *sys.grid;
    std::vector<std::size_t> nodes;
    nodes.reserve(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) nodes.push_back(g.node_index(i, j, 0));
    detail::constrain_nodes(sys, nodes, bed_temperature);
}

void add_volumetric_source(ThermalSystem& sys, double q_vol) {
    if (q_vol == 0.0) return;
    const VoxelGrid& g = *sys.grid;
    const double per_node = q_vol * g.cell_volume_mm3() * kMmToM * kMmToM * kMmToM / 8.0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                for (int lm = 0; lm < 8; ++lm)
                    sys.load[g.node_index(i + (lm & 1), j + ((lm >> 1) & 1),
                                          k + (lm >> 2))] += per_node;
}

namespace detail {

void constrain_nodes(ThermalSystem& sys, const std::vector<std::size_t>& nodes,
                     double value) {
    for (std::size_t n : nodes) {
        sys.fixed[n] = 1;
        sys.fixed_value[n] = value;
    }
}

}  // namespace detail

namespace {

// Solve-ready operator: Dirichlet rows/columns eliminated, with the moved
// column contributions kept for the right-hand side.
struct ConstrainedOperator {
    CsrMatrix A;
    std::vector<double> correction;  // subtract at free rows
};

ConstrainedOperator build_operator(const ThermalSystem& sys, double dt) {
    ConstrainedOperator op;
    op.A = sys.conductivity;
    op.correction.assign(op.A.n, 0.0);
    CsrMatrix& A = op.A;
    if (dt > 0.0)
        for (std::size_t r = 0; r < A.n; ++r)
            A.at(r, static_cast<std::int32_t>(r)) += sys.capacity[r] / dt;

    for (std::size_t r = 0; r < A.n; ++r) {
        const bool row_fixed = sys.fixed[r];
        for (std::size_t e = A.row_ptr[r]; e < A.row_ptr[r + 1]; ++e) {
            const std::size_t c = static_cast<std::size_t>(A.cols[e]);
            if (row_fixed) {
                A.vals[e] = (c == r) ? 1.0 : 0.0;
            } else if (sys.fixed[c]) {
                op.correction[r] += A.vals[e] * sys.fixed_value[c];
                A.vals[e] = 0.0;
            }
        }
    }
    return op;
}

void fill_rhs_transient(const ThermalSystem& sys, const ConstrainedOperator& op, double dt,
                        const std::vector<double>& t_now, std::vector<double>& b) {
    const std::size_t n = op.A.n;
    b.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        b[i] = sys.fixed[i] ? sys.fixed_value[i]
                            : sys.capacity[i] / dt * t_now[i] + sys.load[i] -
                                  op.correction[i];
}

void fill_rhs_steady(const ThermalSystem& sys, const ConstrainedOperator& op,
                     std::vector<double>& b) {
    const std::size_t n = op.A.n;
    b.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        b[i] = sys.fixed[i] ? sys.fixed_value[i] : sys.load[i] - op.correction[i];
}

}  // namespace

TemperatureField step(const TemperatureField& state, const ThermalSystem& sys, double dt,
                      const SolveOptions& solve) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const ConstrainedOperator op = build_operator(sys, dt);
    std::vector<double> b;
    fill_rhs_transient(sys, op, dt, state.values, b);
    TemperatureField next = state;
    pcg_jacobi(op.A, b, next.values, {solve.rel_tol, solve.max_iter});
    next.time = state.time + dt;
    return next;
}

std::vector<std::array<double, 2>> default_probe_positions(const VoxelGrid& grid) {
    const double l = grid.length_mm(), w = grid.width_mm();
    return {{0.50 * l, 0.50 * w},
            {0.25 * l, 0.25 * w},
            {0.25 * l, 0.75 * w},
            {0.75 * l, 0.25 * w},
            {0.75 * l, 0.75 * w}};
}

std::vector<double> sample_top_surface(const TemperatureField& field,
                                       const std::vector<std::array<double, 2>>& positions) {
    const VoxelGrid& g = *field.grid;
    std::vector<double> out;
    out.reserve(positions.size());
    for (const auto& p : positions) {
        const double u = p[0] / g.dx, v = p[1] / g.dy;
        const int ci = std::clamp(static_cast<int>(std::floor(u)), 0, g.nx - 1);
        const int cj = std::clamp(static_cast<int>(std::floor(v)), 0, g.ny - 1);
        const double fx = std::clamp(u - ci, 0.0, 1.0);
        const double fy = std::clamp(v - cj, 0.0, 1.0);
        const double t00 = field.values[g.node_index(ci, cj, g.nz)];
        const double t10 = field.values[g.node_index(ci + 1, cj, g.nz)];
        const double t01 = field.values[g.node_index(ci, cj + 1, g.nz)];
        const double t11 = field.values[g.node_index(ci + 1, cj + 1, g.nz)];
        out.push_back((1 - fx) * (1 - fy) * t00 + fx * (1 - fy) * t10 +
                      (1 - fx) * fy * t01 + fx * fy * t11);
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

TransientResult run_transient(std::shared_ptr<const VoxelGrid> grid,
                              const MaterialProperties& pla, const MaterialProperties& air,
                              const ThermalScenario& scenario,
                              const TransientOptions& options) {
    scenario.validate();
    ThermalSystem sys = assemble(grid, pla, air);
    apply_robin(sys, scenario);
    apply_dirichlet(sys, scenario.bed_temperature);
    add_volumetric_source(sys, scenario.volumetric_source);

    TransientResult result;
    ProbeSeries& series = result.probes;
    series.positions =
        options.probes.empty() ? default_probe_positions(*grid) : options.probes;
    series.temperatures.resize(series.positions.size());

    TemperatureField field;
    field.grid = grid;
    field.values.assign(grid->node_count(), scenario.initial_temperature);
    field.time = 0.0;

    std::vector<double> probe_now = sample_top_surface(field, series.positions);
    const auto record = [&](double t, const std::vector<double>& vals) {
        series.times.push_back(t);
        for (std::size_t p = 0; p < vals.size(); ++p)
            series.temperatures[p].push_back(vals[p]);
        series.mean.push_back(mean_of(vals));
    };
    record(0.0, probe_now);
    if (options.snapshot && options.snapshot_every > 0.0) options.snapshot(field);

    const double dt = scenario.dt;
    const ConstrainedOperator op = build_operator(sys, dt);
    std::vector<double> b;
    long next_sample = 1;
    double last_snapshot = 0.0;

    const long n_full = static_cast<long>(std::floor(scenario.duration / dt + 1e-9));
    const double remainder = scenario.duration - n_full * dt;
    const bool has_tail = remainder > 1e-9 * dt;

    for (long s = 1; s <= n_full + (has_tail ? 1 : 0); ++s) {
        const bool tail = s > n_full;
        const double step_dt = tail ? remainder : dt;
        const double t_prev = field.time;
        std::vector<double> probe_prev = probe_now;

        if (!tail) {
            fill_rhs_transient(sys, op, dt, field.values, b);
            pcg_jacobi(op.A, b, field.values, {options.solve.rel_tol, options.solve.max_iter});
        } else {
            const ConstrainedOperator tail_op = build_operator(sys, step_dt);
            fill_rhs_transient(sys, tail_op, step_dt, field.values, b);
            pcg_jacobi(tail_op.A, b, field.values,
                       {options.solve.rel_tol, options.solve.max_iter});
        }
        field.time = tail ? scenario.duration : s * dt;
        probe_now = sample_top_surface(field, series.positions);

        while (next_sample <= field.time + 1e-9 &&
               next_sample <= scenario.duration + 1e-9) {
            const double w = (next_sample - t_prev) / (field.time - t_prev);
            std::vector<double> vals(series.positions.size());
            for (std::size_t p = 0; p < vals.size(); ++p)
                vals[p] = (1 - w) * probe_prev[p] + w * probe_now[p];
            record(static_cast<double>(next_sample), vals);
            ++next_sample;
        }
        if (options.snapshot && options.snapshot_every > 0.0 &&
            field.time - last_snapshot >= options.snapshot_every - 1e-9) {
            options.snapshot(field);
            last_snapshot = field.time;
        }
    }
    result.final_field = std::move(field);
    return result;
}

TemperatureField steady_state(const ThermalSystem& sys, const SolveOptions& solve) {
    const bool any_fixed =
        std::find(sys.fixed.begin(), sys.fixed.end(), 1) != sys.fixed.end();
    if (!any_fixed && sys.robin_faces.empty())
        throw std::invalid_argument(
            "steady_state: no Dirichlet face and no convective surface; the temperature "
            "level is unconstrained (singular system)");

    const ConstrainedOperator op = build_operator(sys, 0.0);
    std::vector<double> b;
    fill_rhs_steady(sys, op, b);

    double guess = 0.0;
    if (any_fixed) {
        for (std::size_t i = 0; i < sys.fixed.size(); ++i)
            if (sys.fixed[i]) {
                guess = sys.fixed_value[i];
                break;
            }
    } else {
        guess = sys.robin_faces.front().ambient;
    }

    TemperatureField field;
    field.grid = sys.grid;
    field.values.assign(sys.conductivity.n, guess);
    field.time = 0.0;
    pcg_jacobi(op.A, b, field.values, {solve.rel_tol, solve.max_iter});
    return field;
}

TemperatureField steady_state(std::shared_ptr<const VoxelGrid> grid,
                              const MaterialProperties& pla, const MaterialProperties& air,
                              const ThermalScenario& scenario, const SolveOptions& solve) {
    ThermalSystem sys = assemble(grid, pla, air);
    apply_robin(sys, scenario);
    apply_dirichlet(sys, scenario.bed_temperature);
    add_volumetric_source(sys, scenario.volumetric_source);
    return steady_state(sys, solve);
}

EnergyBalance steady_energy_balance(const ThermalSystem& sys,
                                    const TemperatureField& field) {
    EnergyBalance eb;
    std::vector<double> kt;
    sys.conductivity.multiply(field.values, kt);
    for (std::size_t i = 0; i < kt.size(); ++i)
        if (sys.fixed[i]) eb.bed_influx_w += kt[i] - sys.load[i];
    for (const RobinFace& f : sys.robin_faces) {
        double sum = 0.0;
        for (std::size_t n : f.nodes) sum += field.values[n];
        eb.convective_outflux_w += f.h * (f.area_m2 / 4.0 * sum - f.area_m2 * f.ambient);
    }
    return eb;
}

}  // namespace fffheat
