#include "fffheat/config.hpp"

#include <fstream>

#include <json.hpp>

#include "fffheat/trace_io.hpp"

namespace fffheat {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& constraint) {
    throw std::invalid_argument("config: " + field + ": " + constraint);
}

double get_number(const json& j, const std::string& scope, const std::string& key,
                  double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(scope + "." + key, "must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& scope, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) fail(scope + "." + key, "must be an integer");
    return j[key].get<int>();
}

std::string get_string(const json& j, const std::string& scope, const std::string& key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) fail(scope + "." + key, "must be a string");
    return j[key].get<std::string>();
}

bool get_bool(const json& j, const std::string& scope, const std::string& key,
              bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) fail(scope + "." + key, "must be a boolean");
    return j[key].get<bool>();
}

ParameterRange get_range(const json& j, const std::string& scope, const std::string& key,
                         ParameterRange fallback) {
    if (!j.contains(key)) return fallback;
    const json& r = j[key];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        fail(scope + "." + key, "must be a [lo, hi] number pair");
    ParameterRange out{r[0].get<double>(), r[1].get<double>()};
    if (!(out.lo <= out.hi)) fail(scope + "." + key, "bounds must be ordered");
    return out;
}

MaterialProperties parse_material(const json& j, const std::string& scope,
                                  const MaterialProperties& defaults) {
    MaterialProperties m = defaults;
    m.density = get_number(j, scope, "density_kg_m3", m.density);
    m.specific_heat = get_number(j, scope, "specific_heat_J_kgK", m.specific_heat);
    m.conductivity = get_number(j, scope, "conductivity_W_mK", m.conductivity);
    try {
        m.validate();
    } catch (const std::exception& e) {
        fail(scope, e.what());
    }
    return m;
}

RunConfig parse_json(const json& root) {
    RunConfig c;
    c.name = get_string(root, "", "name", "");

    if (root.contains("geometry")) {
        const json& g = root["geometry"];
        GeometryConfig& geo = c.geometry;
        geo.length_mm = get_number(g, "geometry", "length_mm", geo.length_mm);
        geo.width_mm = get_number(g, "geometry", "width_mm", geo.width_mm);
        geo.height_mm = get_number(g, "geometry", "height_mm", geo.height_mm);
        if (!(geo.length_mm > 0) || !(geo.width_mm > 0) || !(geo.height_mm > 0))
            fail("geometry", "dimensions must be > 0");
        if (g.contains("filament")) {
            const json& f = g["filament"];
            geo.section.width_mm =
                get_number(f, "geometry.filament", "width_mm", geo.section.width_mm);
            geo.section.layer_height_mm = get_number(f, "geometry.filament",
                                                     "layer_height_mm",
                                                     geo.section.layer_height_mm);
        }
        try {
            geo.section.validate();
        } catch (const std::exception& e) {
            fail("geometry.filament", e.what());
        }
        if (g.contains("infill")) {
            const json& inf = g["infill"];
            geo.infill.pattern = infill_pattern_from_string(
                get_string(inf, "geometry.infill", "pattern", to_string(geo.infill.pattern)));
            geo.infill.density =
                get_number(inf, "geometry.infill", "density", geo.infill.density);
            geo.infill.perimeter_walls = get_int(inf, "geometry.infill", "perimeter_walls",
                                                 geo.infill.perimeter_walls);
            geo.infill.solid_top_bottom_layers =
                get_int(inf, "geometry.infill", "solid_top_bottom_layers",
                        geo.infill.solid_top_bottom_layers);
            geo.infill.gyroid_period_mm = get_number(inf, "geometry.infill",
                                                     "gyroid_period_mm",
                                                     geo.infill.gyroid_period_mm);
            try {
                geo.infill.validate();
            } catch (const std::exception& e) {
                fail("geometry.infill", e.what());
            }
        }
        if (g.contains("void")) {
            const json& v = g["void"];
            VoidGeometry vg;
            vg.a = get_number(v, "geometry.void", "a", 0.0);
            vg.section = geo.section;
            geo.void_subdivision =
                get_int(v, "geometry.void", "subdivision", geo.void_subdivision);
            try {
                vg.validate();
            } catch (const std::exception& e) {
                fail("geometry.void", e.what());
            }
            geo.void_geometry = vg;
        }
        geo.coarsen_factor = get_int(g, "geometry", "coarsen_factor", geo.coarsen_factor);
        if (geo.coarsen_factor < 1) fail("geometry.coarsen_factor", "must be >= 1");
    }

    if (root.contains("materials")) {
        const json& m = root["materials"];
        if (m.contains("pla")) c.pla = parse_material(m["pla"], "materials.pla", c.pla);
        if (m.contains("air")) c.air = parse_material(m["air"], "materials.air", c.air);
    }

    if (root.contains("scenario")) {
        const json& s = root["scenario"];
        ThermalScenario& sc = c.scenario;
        sc.bed_temperature = get_number(s, "scenario", "bed_temperature_C", sc.bed_temperature);
        sc.initial_temperature =
            get_number(s, "scenario", "initial_temperature_C", sc.initial_temperature);
        sc.ambient_side = get_number(s, "scenario", "ambient_side_C", sc.ambient_side);
        sc.ambient_top = get_number(s, "scenario", "ambient_top_C", sc.ambient_top);
        sc.heat_transfer_coefficient =
            get_number(s, "scenario", "h_W_m2K", sc.heat_transfer_coefficient);
        sc.volumetric_source =
            get_number(s, "scenario", "volumetric_source_W_m3", sc.volumetric_source);
        sc.duration = get_number(s, "scenario", "duration_s", sc.duration);
        sc.dt = get_number(s, "scenario", "dt_s", sc.dt);
        try {
            sc.validate();
        } catch (const std::exception& e) {
            fail("scenario", e.what());
        }
    }

    if (root.contains("output")) {
        const json& o = root["output"];
        c.output.directory = get_string(o, "output", "directory", c.output.directory);
        c.output.snapshot_every_s =
            get_number(o, "output", "snapshot_every_s", c.output.snapshot_every_s);
        if (c.output.snapshot_every_s < 0) fail("output.snapshot_every_s", "must be >= 0");
    }

    if (root.contains("calibration")) {
        const json& k = root["calibration"];
        CalibrationConfig cal;
        const int case_id = get_int(k, "calibration", "case", 3);
        if (case_id < 1 || case_id > 3) fail("calibration.case", "must be 1, 2 or 3");
        cal.ambient_case = static_cast<AmbientCase>(case_id);
        cal.experiment_csv = get_string(k, "calibration", "experiment_csv", "");
        cal.h_range = get_range(k, "calibration", "h_bounds", cal.h_range);
        cal.side_range = get_range(k, "calibration", "ambient_side_bounds_C", cal.side_range);
        cal.top_range = get_range(k, "calibration", "ambient_top_bounds_C", cal.top_range);
        cal.lattice_points = get_int(k, "calibration", "lattice_points", cal.lattice_points);
        if (cal.lattice_points < 1) fail("calibration.lattice_points", "must be >= 1");
        cal.coarse_sweep = get_bool(k, "calibration", "coarse_sweep", cal.coarse_sweep);
        cal.sweep_coarsen_factor =
            get_int(k, "calibration", "sweep_coarsen_factor", cal.sweep_coarsen_factor);
        if (cal.sweep_coarsen_factor < 2)
            fail("calibration.sweep_coarsen_factor", "must be >= 2");
        c.calibration = cal;
    }
    return c;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + origin + ": " + e.what());
    }
    return parse_json(root);
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config_text(text, path.string());
}

std::string emit_config(const RunConfig& c) {
    json root;
    if (!c.name.empty()) root["name"] = c.name;

    json g;
    g["length_mm"] = c.geometry.length_mm;
    g["width_mm"] = c.geometry.width_mm;
    g["height_mm"] = c.geometry.height_mm;
    g["filament"] = {{"width_mm", c.geometry.section.width_mm},
                     {"layer_height_mm", c.geometry.section.layer_height_mm}};
    if (c.geometry.void_geometry) {
        g["void"] = {{"a", c.geometry.void_geometry->a},
                     {"subdivision", c.geometry.void_subdivision}};
    } else {
        g["infill"] = {{"pattern", to_string(c.geometry.infill.pattern)},
                       {"density", c.geometry.infill.density},
                       {"perimeter_walls", c.geometry.infill.perimeter_walls},
                       {"solid_top_bottom_layers", c.geometry.infill.solid_top_bottom_layers},
                       {"gyroid_period_mm", c.geometry.infill.gyroid_period_mm}};
    }
    g["coarsen_factor"] = c.geometry.coarsen_factor;
    root["geometry"] = g;

    root["materials"] = {
        {"pla",
         {{"density_kg_m3", c.pla.density},
          {"specific_heat_J_kgK", c.pla.specific_heat},
          {"conductivity_W_mK", c.pla.conductivity}}},
        {"air",
         {{"density_kg_m3", c.air.density},
          {"specific_heat_J_kgK", c.air.specific_heat},
          {"conductivity_W_mK", c.air.conductivity}}}};

    root["scenario"] = {{"bed_temperature_C", c.scenario.bed_temperature},
                        {"initial_temperature_C", c.scenario.initial_temperature},
                        {"ambient_side_C", c.scenario.ambient_side},
                        {"ambient_top_C", c.scenario.ambient_top},
                        {"h_W_m2K", c.scenario.heat_transfer_coefficient},
                        {"volumetric_source_W_m3", c.scenario.volumetric_source},
                        {"duration_s", c.scenario.duration},
                        {"dt_s", c.scenario.dt}};

    root["output"] = {{"directory", c.output.directory},
                      {"snapshot_every_s", c.output.snapshot_every_s}};

    if (c.calibration) {
        const CalibrationConfig& k = *c.calibration;
        root["calibration"] = {
            {"case", static_cast<int>(k.ambient_case)},
            {"experiment_csv", k.experiment_csv},
            {"h_bounds", {k.h_range.lo, k.h_range.hi}},
            {"ambient_side_bounds_C", {k.side_range.lo, k.side_range.hi}},
            {"ambient_top_bounds_C", {k.top_range.lo, k.top_range.hi}},
            {"lattice_points", k.lattice_points},
            {"coarse_sweep", k.coarse_sweep},
            {"sweep_coarsen_factor", k.sweep_coarsen_factor}};
    }
    return root.dump(2) + "\n";
}

VoxelGrid build_grid(const GeometryConfig& geometry) {
    VoxelGrid grid;
    if (geometry.void_geometry) {
        grid = build_void_grid(*geometry.void_geometry, geometry.length_mm,
                               geometry.width_mm, geometry.height_mm,
                               geometry.void_subdivision);
    } else {
        grid = build_infill_grid(geometry.infill, geometry.length_mm, geometry.width_mm,
                                 geometry.height_mm, geometry.section);
    }
    if (geometry.coarsen_factor >= 2) grid = coarsen(grid, geometry.coarsen_factor);
    return grid;
}

CalibrationProblem make_calibration_problem(const RunConfig& config,
                                            const std::filesystem::path& base_dir) {
    if (!config.calibration)
        throw std::invalid_argument("config has no calibration block");
    const CalibrationConfig& cal = *config.calibration;
    if (cal.experiment_csv.empty())
        throw std::invalid_argument("config: calibration.experiment_csv: is required");

    std::filesystem::path csv = cal.experiment_csv;
    if (csv.is_relative() && !base_dir.empty()) csv = base_dir / csv;

    CalibrationProblem p;
    p.ambient_case = cal.ambient_case;
    p.trace = ingest_experiment(csv);
    p.grid = std::make_shared<VoxelGrid>(build_grid(config.geometry));
    p.pla = config.pla;
    p.air = config.air;
    p.scenario = config.scenario;
    p.h_range = cal.h_range;
    p.side_range = cal.side_range;
    p.top_range = cal.top_range;
    p.lattice_points = cal.lattice_points;
    p.coarse_search_factor = cal.coarse_sweep ? cal.sweep_coarsen_factor : 1;
    return p;
}

}  // namespace fffheat
