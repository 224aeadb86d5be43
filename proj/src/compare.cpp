#include "fffheat/compare.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fffheat/thread_pool.hpp"

namespace fffheat {

namespace {

bool same_scenario(const ThermalScenario& a, const ThermalScenario& b) {
    return a.bed_temperature == b.bed_temperature &&
           a.initial_temperature == b.initial_temperature &&
           a.ambient_side == b.ambient_side && a.ambient_top == b.ambient_top &&
           a.heat_transfer_coefficient == b.heat_transfer_coefficient &&
           a.volumetric_source == b.volumetric_source && a.duration == b.duration &&
           a.dt == b.dt;
}

}  // namespace

ComparisonReport run_comparison(const std::vector<RunConfig>& configs,
                                const CompareOptions& options) {
    if (configs.size() < 2)
        throw std::invalid_argument("run_comparison: needs at least two variants");
    for (std::size_t i = 1; i < configs.size(); ++i)
        if (!same_scenario(configs[0].scenario, configs[i].scenario))
            throw std::invalid_argument(
                "run_comparison: variant '" + configs[i].name +
                "' has a different scenario than '" + configs[0].name + "'");

    ComparisonReport report;
    report.variants.resize(configs.size());

    // Variants run sequentially so the wall-clock column stays comparable;
    // each simulation is already the unit of work.
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const RunConfig& cfg = configs[i];
        VariantResult& v = report.variants[i];
        v.name = cfg.name.empty() ? "variant" + std::to_string(i + 1) : cfg.name;

        const auto t0 = std::chrono::steady_clock::now();
        const auto grid = std::make_shared<VoxelGrid>(build_grid(cfg.geometry));
        v.elements = grid->cell_count();

        const TemperatureField steady =
            steady_state(grid, cfg.pla, cfg.air, cfg.scenario);
        v.steady_mean = mean_of(sample_top_surface(steady, default_probe_positions(*grid)));

        if (!options.steady_only) {
            TransientResult r = run_transient(grid, cfg.pla, cfg.air, cfg.scenario);
            v.trace = std::move(r.probes);
        }
        v.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    report.rise_reference =
        report.variants[0].steady_mean - configs[0].scenario.initial_temperature;

    for (std::size_t a = 0; a < report.variants.size(); ++a)
        for (std::size_t b = a + 1; b < report.variants.size(); ++b) {
            PairDeviation d;
            d.a = a;
            d.b = b;
            d.steady_dev =
                std::abs(report.variants[a].steady_mean - report.variants[b].steady_mean);
            d.steady_dev_pct_rise = report.rise_reference != 0.0
                                        ? 100.0 * d.steady_dev / report.rise_reference
                                        : 0.0;
            if (!options.steady_only) {
                const auto& ta = report.variants[a].trace;
                const auto& tb = report.variants[b].trace;
                const std::size_t n = std::min(ta.mean.size(), tb.mean.size());
                for (std::size_t s = 0; s < n; ++s)
                    d.max_trace_dev = std::max(d.max_trace_dev,
                                               std::abs(ta.mean[s] - tb.mean[s]));
            }
            d.flagged = d.steady_dev_pct_rise > options.threshold_pct_rise;
            report.pairs.push_back(d);
        }
    return report;
}

void write_comparison_csv(const std::filesystem::path& path,
                          const ComparisonReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.precision(10);
    out << "variant,elements,wall_seconds,steady_mean_C\n";
    for (const VariantResult& v : report.variants)
        out << v.name << ',' << v.elements << ',' << v.wall_seconds << ',' << v.steady_mean
            << '\n';
    out << "\npair_a,pair_b,max_trace_dev_C,steady_dev_C,steady_dev_pct_rise,flagged\n";
    for (const PairDeviation& p : report.pairs)
        out << report.variants[p.a].name << ',' << report.variants[p.b].name << ','
            << p.max_trace_dev << ',' << p.steady_dev << ',' << p.steady_dev_pct_rise << ','
            << (p.flagged ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace fffheat
