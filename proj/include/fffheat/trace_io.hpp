#pragma once

#include <filesystem>
#include <vector>

#include "fffheat/calibration.hpp"
#include "fffheat/thermal.hpp"

namespace fffheat {

// Read an experiment CSV. Accepted layouts: `time_s,mean_C` or
// `time_s,<probe columns...>[,mean_C]`; a missing mean column is computed as
// the per-row probe average. Malformed or non-monotone rows report their line
// number. The specimen name defaults to the file stem.
ExperimentTrace ingest_experiment(const std::filesystem::path& path);

// `time_s,probe1_C,...,probeN_C,mean_C`, >= 9 significant digits.
void write_probe_csv(const std::filesystem::path& path, const ProbeSeries& series);

// `h_W_m2K,ambient_side_C,ambient_top_C,rmse_C,stage`
void write_cost_table_csv(const std::filesystem::path& path,
                          const std::vector<CostEntry>& table);
std::vector<CostEntry> read_cost_table_csv(const std::filesystem::path& path);

}  // namespace fffheat
