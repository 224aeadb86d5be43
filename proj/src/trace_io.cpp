#include "fffheat/trace_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fffheat {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_number(const std::string& s, const std::filesystem::path& path, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": malformed numeric field '" + s + "'");
    }
}

}  // namespace

ExperimentTrace ingest_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");

    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        header = split_csv_line(line);
        break;
    }
    if (header.size() < 2 || header[0] != "time_s")
        throw std::runtime_error(path.string() +
                                 ": expected a header starting with 'time_s'");

    int mean_col = -1;
    std::vector<int> probe_cols;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c] == "mean_C")
            mean_col = static_cast<int>(c);
        else
            probe_cols.push_back(static_cast<int>(c));
    }

    ExperimentTrace trace;
    trace.specimen = path.stem().string();
    trace.probes.resize(probe_cols.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(header.size()) +
                                     " fields, got " + std::to_string(fields.size()));
        const double t = parse_number(fields[0], path, line_no);
        if (!trace.times.empty() && !(t > trace.times.back()))
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": non-monotone time " + fields[0]);
        trace.times.push_back(t);
        double probe_sum = 0.0;
        for (std::size_t p = 0; p < probe_cols.size(); ++p) {
            const double v = parse_number(fields[probe_cols[p]], path, line_no);
            trace.probes[p].push_back(v);
            probe_sum += v;
        }
        if (mean_col >= 0)
            trace.mean.push_back(parse_number(fields[mean_col], path, line_no));
        else if (!probe_cols.empty())
            trace.mean.push_back(probe_sum / probe_cols.size());
        else
            throw std::runtime_error(path.string() +
                                     ": header has neither probe columns nor mean_C");
    }
    if (trace.times.empty())
        throw std::runtime_error(path.string() + ": no data rows");
    trace.validate();
    return trace;
}

void write_probe_csv(const std::filesystem::path& path, const ProbeSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.precision(10);
    out << "time_s";
    for (std::size_t p = 0; p < series.temperatures.size(); ++p)
        out << ",probe" << p + 1 << "_C";
    out << ",mean_C\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        out << series.times[i];
        for (const auto& probe : series.temperatures) out << ',' << probe[i];
        out << ',' << series.mean[i] << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_cost_table_csv(const std::filesystem::path& path,
                          const std::vector<CostEntry>& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.precision(10);
    out << "h_W_m2K,ambient_side_C,ambient_top_C,rmse_C,stage\n";
    for (const CostEntry& e : table)
        out << e.h << ',' << e.ambient_side << ',' << e.ambient_top << ',' << e.rmse << ','
            << e.stage << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<CostEntry> read_cost_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::string line;
    int line_no = 0;
    std::vector<CostEntry> table;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (!header_seen) {
            if (fields.empty() || fields[0] != "h_W_m2K")
                throw std::runtime_error(path.string() + ": not a cost table");
            header_seen = true;
            continue;
        }
        if (fields.size() != 5)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 5 fields");
        CostEntry e;
        e.h = parse_number(fields[0], path, line_no);
        e.ambient_side = parse_number(fields[1], path, line_no);
        e.ambient_top = parse_number(fields[2], path, line_no);
        e.rmse = parse_number(fields[3], path, line_no);
        e.stage = fields[4];
        table.push_back(std::move(e));
    }
    return table;
}

}  // namespace fffheat
