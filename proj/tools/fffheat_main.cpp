#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fffheat/compare.hpp"
#include "fffheat/config.hpp"
#include "fffheat/grid_io.hpp"
#include "fffheat/thread_pool.hpp"
#include "fffheat/trace_io.hpp"

namespace fs = std::filesystem;
using namespace fffheat;

namespace {

struct GlobalOverrides {
    int threads = 0;
    double dt = 0.0;           // 0: keep config value
    int coarsen = 0;           // 0: keep config value
    double snapshot_every = -1.0;  // <0: keep config value
};

RunConfig load_config(const std::string& path, const GlobalOverrides& g) {
    RunConfig cfg = parse_config(path);
    if (cfg.name.empty()) cfg.name = fs::path(path).stem().string();
    if (g.dt > 0.0) cfg.scenario.dt = g.dt;
    if (g.coarsen > 0) cfg.geometry.coarsen_factor = g.coarsen;
    if (g.snapshot_every >= 0.0) cfg.output.snapshot_every_s = g.snapshot_every;
    return cfg;
}

int cmd_gen_mesh(const std::string& config_path, const std::string& out_path,
                 const GlobalOverrides& g) {
    const RunConfig cfg = load_config(config_path, g);
    const VoxelGrid grid = build_grid(cfg.geometry);
    const fs::path out(out_path);
    if (out.extension() == ".vtk")
        write_vtk_materials(out, grid, cfg.name);
    else
        write_grid_binary(out, grid);
    std::cout << "wrote " << out.string() << ": " << grid.nx << "x" << grid.ny << "x"
              << grid.nz << " cells (" << grid.cell_count() << " total, PLA fraction "
              << grid.pla_fraction() << ")\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const GlobalOverrides& g) {
    const RunConfig cfg = load_config(config_path, g);
    const auto grid = std::make_shared<VoxelGrid>(build_grid(cfg.geometry));
    fs::create_directories(out_dir);

    TransientOptions options;
    int snapshot_no = 0;
    if (cfg.output.snapshot_every_s > 0.0) {
        options.snapshot_every = cfg.output.snapshot_every_s;
        options.snapshot = [&](const TemperatureField& field) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%04d.vtk", snapshot_no++);
            write_vtk_temperature(fs::path(out_dir) / name, field, cfg.name);
        };
    }

    const TransientResult result =
        run_transient(grid, cfg.pla, cfg.air, cfg.scenario, options);
    write_probe_csv(fs::path(out_dir) / "probes.csv", result.probes);
    write_vtk_temperature(fs::path(out_dir) / "final.vtk", result.final_field, cfg.name);
    std::cout << "simulated " << cfg.name << ": " << grid->cell_count() << " cells, "
              << cfg.scenario.duration << " s, final probe mean "
              << result.probes.mean.back() << " C\n";
    return 0;
}

int cmd_calibrate(const std::string& config_path, int case_override,
                  const std::string& out_prefix, const GlobalOverrides& g) {
    const RunConfig cfg = load_config(config_path, g);
    CalibrationProblem problem =
        make_calibration_problem(cfg, fs::path(config_path).parent_path());
    if (case_override > 0) problem.ambient_case = static_cast<AmbientCase>(case_override);
    problem.threads = g.threads;

    const FitResult result = fit(problem);

    const fs::path table_path = out_prefix + "_costs.csv";
    const fs::path summary_path = out_prefix + "_summary.txt";
    write_cost_table_csv(table_path, result.evaluations);
    {
        std::ofstream out(summary_path);
        out.precision(6);
        out << "specimen: " << problem.trace.specimen << "\n"
            << "case: " << static_cast<int>(problem.ambient_case) << "\n"
            << "h_W_m2K: " << result.h << "\n"
            << "ambient_side_C: " << result.ambient_side << "\n"
            << "ambient_top_C: " << result.ambient_top << "\n"
            << "rmse_C: " << result.rmse << "\n"
            << "evaluations: " << result.evaluations.size() << "\n";
    }
    std::cout << "fitted h=" << result.h << " W/m2K, T_c,side=" << result.ambient_side
              << " C, T_c,top=" << result.ambient_top << " C, rmse=" << result.rmse
              << " C\nwrote " << table_path.string() << " and " << summary_path.string()
              << "\n";
    return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& out_path,
                bool steady_only, const GlobalOverrides& g) {
    std::vector<RunConfig> configs;
    configs.reserve(config_paths.size());
    for (const std::string& p : config_paths) configs.push_back(load_config(p, g));

    CompareOptions options;
    options.steady_only = steady_only;
    options.threads = g.threads;
    const ComparisonReport report = run_comparison(configs, options);
    write_comparison_csv(out_path, report);

    for (const VariantResult& v : report.variants)
        std::cout << v.name << ": " << v.elements << " elements, steady mean "
                  << v.steady_mean << " C, " << v.wall_seconds << " s\n";
    for (const PairDeviation& p : report.pairs)
        std::cout << report.variants[p.a].name << " vs " << report.variants[p.b].name
                  << ": steady dev " << p.steady_dev << " C ("
                  << p.steady_dev_pct_rise << "% of rise)"
                  << (p.flagged ? " [exceeds threshold]" : "") << "\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

// --param h=10:30:5 or ambient_side=25:32:1 etc.
struct SweepParam {
    std::string name;
    double start = 0, stop = 0, step = 0;
};

SweepParam parse_sweep_param(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("--param expects name=start:stop:step, got '" + text +
                                    "'");
    SweepParam p;
    p.name = text.substr(0, eq);
    const std::string range = text.substr(eq + 1);
    const auto c1 = range.find(':');
    const auto c2 = range.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("--param expects name=start:stop:step, got '" + text +
                                    "'");
    p.start = std::stod(range.substr(0, c1));
    p.stop = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
    p.step = std::stod(range.substr(c2 + 1));
    if (!(p.step > 0.0)) throw std::invalid_argument("--param step must be > 0");
    return p;
}

int cmd_sweep(const std::string& config_path, const std::string& param_text,
              const std::string& out_path, const GlobalOverrides& g) {
    const RunConfig cfg = load_config(config_path, g);
    const SweepParam param = parse_sweep_param(param_text);

    const auto grid = std::make_shared<VoxelGrid>(build_grid(cfg.geometry));
    const bool has_experiment =
        cfg.calibration && !cfg.calibration->experiment_csv.empty();
    ExperimentTrace trace;
    if (has_experiment) {
        fs::path csv = cfg.calibration->experiment_csv;
        if (csv.is_relative()) csv = fs::path(config_path).parent_path() / csv;
        trace = ingest_experiment(csv);
    }

    std::vector<double> values;
    for (double v = param.start; v <= param.stop + 1e-9; v += param.step)
        values.push_back(v);

    std::vector<CostEntry> table(values.size());
    parallel_for(values.size(), g.threads, [&](std::size_t i) {
        ThermalScenario s = cfg.scenario;
        if (param.name == "h")
            s.heat_transfer_coefficient = values[i];
        else if (param.name == "ambient_side")
            s.ambient_side = values[i];
        else if (param.name == "ambient_top")
            s.ambient_top = values[i];
        else if (param.name == "ambient")
            s.ambient_side = s.ambient_top = values[i];
        else
            throw std::invalid_argument("--param: unknown parameter '" + param.name +
                                        "' (h, ambient, ambient_side, ambient_top)");
        const TransientResult r = run_transient(grid, cfg.pla, cfg.air, s);
        CostEntry e;
        e.h = s.heat_transfer_coefficient;
        e.ambient_side = s.ambient_side;
        e.ambient_top = s.ambient_top;
        e.rmse = has_experiment ? trace_cost(r.probes, trace) : r.probes.mean.back();
        e.stage = has_experiment ? "sweep" : "final_mean";
        table[i] = e;
    });
    write_cost_table_csv(out_path, table);
    std::cout << "wrote " << out_path << " (" << table.size() << " points; rmse column is "
              << (has_experiment ? "RMSE vs experiment" : "final probe mean") << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transient heat-transfer simulation and calibration for FFF prints"};
    app.require_subcommand(1);

    GlobalOverrides g;
    app.add_option("--threads", g.threads, "worker threads (default: all cores)");
    app.add_option("--dt", g.dt, "override scenario time step, s");
    app.add_option("--coarsen", g.coarsen, "override mesh coarsening factor");
    app.add_option("--snapshot-every", g.snapshot_every, "override VTK snapshot interval, s");

    std::string config_path, out_path = "out", param_text;
    std::vector<std::string> config_paths;
    int case_override = 0;
    bool steady_only = false;

    CLI::App* gen = app.add_subcommand("gen-mesh", "generate a voxel grid");
    gen->add_option("config", config_path, "run configuration")->required();
    gen->add_option("-o,--output", out_path, "output grid (.vtk for VTK, else binary)")
        ->required();

    CLI::App* sim = app.add_subcommand("simulate", "run one transient simulation");
    sim->add_option("config", config_path, "run configuration")->required();
    sim->add_option("-o,--output", out_path, "output directory")->required();

    CLI::App* cal = app.add_subcommand("calibrate", "fit convective parameters");
    cal->add_option("config", config_path, "run configuration")->required();
    cal->add_option("--case", case_override, "ambient-temperature case 1, 2 or 3")
        ->check(CLI::Range(1, 3));
    cal->add_option("-o,--output", out_path, "output file prefix")->required();

    CLI::App* cmp = app.add_subcommand("compare", "compare mesh/geometry variants");
    cmp->add_option("configs", config_paths, "run configurations (>= 2)")->required();
    cmp->add_option("-o,--output", out_path, "output report CSV")->required();
    cmp->add_flag("--steady-only", steady_only, "compare steady states only");

    CLI::App* swp = app.add_subcommand("sweep", "sweep one convective parameter");
    swp->add_option("config", config_path, "run configuration")->required();
    swp->add_option("--param", param_text, "name=start:stop:step")->required();
    swp->add_option("-o,--output", out_path, "output cost table CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_mesh(config_path, out_path, g);
        if (sim->parsed()) return cmd_simulate(config_path, out_path, g);
        if (cal->parsed()) return cmd_calibrate(config_path, case_override, out_path, g);
        if (cmp->parsed()) return cmd_compare(config_paths, out_path, steady_only, g);
        if (swp->parsed()) return cmd_sweep(config_path, param_text, out_path, g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
