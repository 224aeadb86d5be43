#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fffheat/config.hpp"
#include "fffheat/thermal.hpp"

namespace fffheat {

struct CompareOptions {
    bool steady_only = false;          // skip the transient, compare steady states
    double threshold_pct_rise = 2.0;   // flag pairs deviating beyond this
    int threads = 0;
};

struct VariantResult {
    std::string name;
    std::size_t elements = 0;
    double wall_seconds = 0.0;   // assembly + solve
    double steady_mean = 0.0;    // probe mean of the steady field, degC
    ProbeSeries trace;           // empty in steady-only mode
};

struct PairDeviation {
    std::size_t a = 0, b = 0;
    double max_trace_dev = 0.0;        // max |mean_a - mean_b| over time, degC
    double steady_dev = 0.0;           // |steady_a - steady_b|, degC
    double steady_dev_pct_rise = 0.0;  // relative to the first variant's rise
    bool flagged = false;
};

struct ComparisonReport {
    std::vector<VariantResult> variants;
    std::vector<PairDeviation> pairs;
    double rise_reference = 0.0;  // first variant's steady rise above T_a, degC
};

// Run every variant under its (identical) scenario and tabulate steady probe
// means, pairwise deviations, element counts and wall-clock. Throws when the
// scenarios differ.
ComparisonReport run_comparison(const std::vector<RunConfig>& configs,
                                const CompareOptions& options = {});

void write_comparison_csv(const std::filesystem::path& path, const ComparisonReport& report);

}  // namespace fffheat
