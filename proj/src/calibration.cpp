#include "fffheat/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "fffheat/mesostructure.hpp"
#include "fffheat/nelder_mead.hpp"
#include "fffheat/thread_pool.hpp"

namespace fffheat {

void ExperimentTrace::validate() const {
    if (times.size() != mean.size())
        throw std::invalid_argument("ExperimentTrace: times/mean size mismatch");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("ExperimentTrace: times must be strictly increasing");
    for (const auto& p : probes)
        if (p.size() != times.size())
            throw std::invalid_argument("ExperimentTrace: probe column size mismatch");
}

void CalibrationProblem::validate() const {
    trace.validate();
    scenario.validate();
    if (!grid) throw std::invalid_argument("CalibrationProblem: grid is required");
    if (!(h_range.lo <= h_range.hi) || !(side_range.lo <= side_range.hi) ||
        !(top_range.lo <= top_range.hi))
        throw std::invalid_argument("CalibrationProblem: parameter bounds must be ordered");
    if (lattice_points < 1)
        throw std::invalid_argument("CalibrationProblem: lattice_points must be >= 1");
}

int free_parameter_count(AmbientCase c) {
    switch (c) {
        case AmbientCase::RoomTemperature: return 1;
        case AmbientCase::UniformElevated: return 2;
        case AmbientCase::SideTopSplit: return 3;
    }
    return 3;
}

ThermalScenario scenario_for(const CalibrationProblem& problem,
                             const std::vector<double>& params) {
    ThermalScenario s = problem.scenario;
    s.heat_transfer_coefficient = params.at(0);
    switch (problem.ambient_case) {
        case AmbientCase::RoomTemperature:
            s.ambient_side = s.ambient_top = s.initial_temperature;
            break;
        case AmbientCase::UniformElevated:
            s.ambient_side = s.ambient_top = params.at(1);
            break;
        case AmbientCase::SideTopSplit:
            s.ambient_side = params.at(1);
            s.ambient_top = params.at(2);
            break;
    }
    return s;
}

double trace_cost(const ProbeSeries& sim, const ExperimentTrace& exp) {
    exp.validate();
    if (sim.times.empty() || exp.times.empty())
        throw std::invalid_argument("trace_cost: empty trace");

    double sq = 0.0;
    std::size_t n = 0;
    std::size_t seg = 0;
    for (std::size_t i = 0; i < sim.times.size(); ++i) {
        const double t = sim.times[i];
        if (t < exp.times.front() - 1e-9 || t > exp.times.back() + 1e-9) continue;
        while (seg + 2 < exp.times.size() && exp.times[seg + 1] < t) ++seg;
        const double t0 = exp.times[seg], t1 = exp.times[seg + 1 < exp.times.size() ? seg + 1 : seg];
        double v;
        if (t1 == t0) {
            v = exp.mean[seg];
        } else {
            const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
            v = (1 - w) * exp.mean[seg] + w * exp.mean[seg + 1];
        }
        const double r = sim.mean[i] - v;
        sq += r * r;
        ++n;
    }
    if (n == 0)
        throw std::invalid_argument(
            "trace_cost: simulation and experiment time ranges do not overlap");
    return std::sqrt(sq / n);
}

namespace {

std::vector<double> linspace(const ParameterRange& r, int n) {
    if (n <= 1) return {0.5 * (r.lo + r.hi)};
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = r.lo + (r.hi - r.lo) * i / (n - 1);
    return v;
}

std::vector<std::vector<double>> lattice_points_for(const CalibrationProblem& p) {
    const std::vector<double> hs = linspace(p.h_range, p.lattice_points);
    std::vector<std::vector<double>> pts;
    switch (p.ambient_case) {
        case AmbientCase::RoomTemperature:
            for (double h : hs) pts.push_back({h});
            break;
        case AmbientCase::UniformElevated: {
            // A single tied ambient: use the side range for both surfaces.
            const std::vector<double> ts = linspace(p.side_range, p.lattice_points);
            for (double h : hs)
                for (double t : ts) pts.push_back({h, t});
            break;
        }
        case AmbientCase::SideTopSplit: {
            const std::vector<double> ss = linspace(p.side_range, p.lattice_points);
            const std::vector<double> tt = linspace(p.top_range, p.lattice_points);
            for (double h : hs)
                for (double s : ss)
                    for (double t : tt) pts.push_back({h, s, t});
            break;
        }
    }
    return pts;
}

CostEntry make_entry(const CalibrationProblem& problem, const std::vector<double>& params,
                     double rmse, const char* stage) {
    const ThermalScenario s = scenario_for(problem, params);
    return {s.heat_transfer_coefficient, s.ambient_side, s.ambient_top, rmse, stage};
}

double evaluate(const CalibrationProblem& problem,
                const std::shared_ptr<const VoxelGrid>& grid,
                const std::vector<double>& params) {
    const ThermalScenario s = scenario_for(problem, params);
    const TransientResult r = run_transient(grid, problem.pla, problem.air, s);
    return trace_cost(r.probes, problem.trace);
}

}  // namespace

std::vector<CostEntry> sweep(const CalibrationProblem& problem) {
    problem.validate();
    const std::vector<std::vector<double>> pts = lattice_points_for(problem);
    std::vector<CostEntry> table(pts.size());
    parallel_for(pts.size(), problem.threads, [&](std::size_t i) {
        try {
            const double rmse = evaluate(problem, problem.grid, pts[i]);
            table[i] = make_entry(problem, pts[i], rmse, "sweep");
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "sweep: lattice point (h=" << pts[i][0];
            if (pts[i].size() > 1) msg << ", T_c=" << pts[i][1];
            if (pts[i].size() > 2) msg << ", T_c_top=" << pts[i][2];
            msg << ") failed: " << e.what();
            throw std::runtime_error(msg.str());
        }
    });
    return table;
}

FitResult fit(const CalibrationProblem& problem) {
    problem.validate();

    CalibrationProblem search = problem;
    if (problem.coarse_search_factor >= 2)
        search.grid = std::make_shared<VoxelGrid>(
            coarsen(*problem.grid, problem.coarse_search_factor));

    const std::vector<std::vector<double>> pts = lattice_points_for(search);
    FitResult result;
    result.evaluations.resize(pts.size());
    std::vector<double> costs(pts.size());
    parallel_for(pts.size(), search.threads, [&](std::size_t i) {
        try {
            costs[i] = evaluate(search, search.grid, pts[i]);
            result.evaluations[i] = make_entry(search, pts[i], costs[i], "sweep");
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "fit: lattice point (h=" << pts[i][0] << ") failed: " << e.what();
            throw std::runtime_error(msg.str());
        }
    });

    const std::size_t best =
        std::min_element(costs.begin(), costs.end()) - costs.begin();
    double best_cost = costs[best];
    std::vector<double> best_params = pts[best];

    const int d = free_parameter_count(search.ambient_case);
    std::vector<double> lo = {search.h_range.lo}, hi = {search.h_range.hi};
    if (d >= 2) {
        lo.push_back(search.side_range.lo);
        hi.push_back(search.side_range.hi);
    }
    if (d >= 3) {
        lo.push_back(search.top_range.lo);
        hi.push_back(search.top_range.hi);
    }
    std::vector<double> step(d);
    for (int i = 0; i < d; ++i) {
        const double span = hi[i] - lo[i];
        step[i] = search.lattice_points > 1
                      ? 0.5 * span / (search.lattice_points - 1)
                      : 0.25 * span;
        if (step[i] <= 0.0) step[i] = 1.0;
    }

    std::mutex log_mutex;
    const auto objective = [&](const std::vector<double>& x) {
        const double rmse = evaluate(search, search.grid, x);
        std::lock_guard<std::mutex> lock(log_mutex);
        result.evaluations.push_back(make_entry(search, x, rmse, "refine"));
        return rmse;
    };
    const NelderMeadResult nm = nelder_mead(objective, best_params, step, lo, hi);
    if (nm.value <= best_cost) {
        best_cost = nm.value;
        best_params = nm.x;
    }

    // Search on the coarse grid reports its final cost on the full one.
    if (problem.coarse_search_factor >= 2)
        best_cost = evaluate(problem, problem.grid, best_params);

    const ThermalScenario s = scenario_for(problem, best_params);
    result.h = s.heat_transfer_coefficient;
    result.ambient_side = s.ambient_side;
    result.ambient_top = s.ambient_top;
    result.rmse = best_cost;
    return result;
}

std::vector<ValidationEntry> validate(const FitResult& fitted,
                                      const std::vector<CalibrationProblem>& problems) {
    std::vector<ValidationEntry> report;
    report.reserve(problems.size());
    for (const CalibrationProblem& p : problems) {
        p.validate();
        ThermalScenario s = p.scenario;
        s.heat_transfer_coefficient = fitted.h;
        s.ambient_side = fitted.ambient_side;
        s.ambient_top = fitted.ambient_top;
        const TransientResult r = run_transient(p.grid, p.pla, p.air, s);

        ValidationEntry e;
        e.specimen = p.trace.specimen;
        e.rmse = trace_cost(r.probes, p.trace);

        // Steady-state discrepancy at the last shared sample.
        const double t_end = std::min(r.probes.times.back(), p.trace.times.back());
        const auto at_time = [](const std::vector<double>& times,
                                const std::vector<double>& vals, double t) {
            const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-9);
            const std::size_t i = std::min<std::size_t>(it - times.begin(), vals.size() - 1);
            return vals[i];
        };
        const double sim_end = at_time(r.probes.times, r.probes.mean, t_end);
        const double exp_end = at_time(p.trace.times, p.trace.mean, t_end);
        e.steady_gap = std::abs(sim_end - exp_end);
        const double rise = exp_end - s.initial_temperature;
        e.steady_gap_pct_rise = rise != 0.0 ? 100.0 * e.steady_gap / rise : 0.0;
        report.push_back(std::move(e));
    }
    return report;
}

}  // namespace fffheat
