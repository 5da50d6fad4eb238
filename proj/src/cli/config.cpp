#include "embcomm/cli/config.hpp"

#include "embcomm/errors.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace embcomm::cli {

namespace {

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = boost::algorithm::trim_copy(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError(key, "expected a finite number, got '" + text + "'");
    }
    return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
    const std::string t = boost::algorithm::trim_copy(text);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = boost::algorithm::trim_copy(text);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    throw ConfigError(key, "expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        boost::algorithm::trim(item);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

template <typename T, typename Fmt>
std::string join(const std::vector<T>& values, Fmt f) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += f(values[i]);
    }
    return out;
}

struct KeySpec {
    const char* name;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    // Empty for input-only aliases that are reported through another key.
    std::function<std::string(const RunConfig&)> get;
};

#define DOUBLE_KEY(NAME, FIELD)                                                                               \
    KeySpec {                                                                                                 \
        NAME, [](RunConfig& c, const std::string& k, const std::string& v) { c.FIELD = parse_double(k, v); }, \
            [](const RunConfig& c) { return fmt_double(c.FIELD); }                                           \
    }
#define INT_KEY(NAME, FIELD, TYPE)                                                                                  \
    KeySpec {                                                                                                       \
        NAME, [](RunConfig& c, const std::string& k, const std::string& v) { c.FIELD = parse_int<TYPE>(k, v); },    \
            [](const RunConfig& c) { return std::to_string(c.FIELD); }                                             \
    }
#define BOOL_KEY(NAME, FIELD)                                                                               \
    KeySpec {                                                                                               \
        NAME, [](RunConfig& c, const std::string& k, const std::string& v) { c.FIELD = parse_bool(k, v); }, \
            [](const RunConfig& c) { return std::string(c.FIELD ? "true" : "false"); }                      \
    }

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = {
        INT_KEY("array.m_y", array.m_y, int),
        INT_KEY("array.m_z", array.m_z, int),
        DOUBLE_KEY("array.wavelength", array.wavelength),
        KeySpec{"array.carrier_hz",
                [](RunConfig& c, const std::string& k, const std::string& v) {
                    const double f = parse_double(k, v);
                    if (!(f > 0.0)) {
                        throw ConfigError(k, "must be positive");
                    }
                    c.array.wavelength = kSpeedOfLight / f;
                },
                {}},
        DOUBLE_KEY("scene.distance_d", scene.distance_d),
        DOUBLE_KEY("scene.extent_y", scene.extent_y),
        DOUBLE_KEY("scene.extent_z", scene.extent_z),
        DOUBLE_KEY("scene.snr_gamma0", scene.snr_gamma0),
        KeySpec{"scene.snr_db",
                [](RunConfig& c, const std::string& k, const std::string& v) {
                    c.scene.snr_gamma0 = db_to_linear(parse_double(k, v));
                },
                {}},
        DOUBLE_KEY("scene.noise_var_sigma2", scene.noise_var_sigma2),
        INT_KEY("scene.snapshots_l", scene.snapshots_l, int),
        DOUBLE_KEY("scene.pulse_duration_tp", scene.pulse_duration_tp),
        DOUBLE_KEY("scene.far_field_ratio", scene.far_field_ratio),
        DOUBLE_KEY("design.eps", design.eps),
        DOUBLE_KEY("design.lattice_rotation", design.lattice_rotation),
        DOUBLE_KEY("design.offset_y", design.offset_y),
        DOUBLE_KEY("design.offset_z", design.offset_z),
        DOUBLE_KEY("design.greedy_step", design.greedy_step),
        KeySpec{"design.import_csv",
                [](RunConfig& c, const std::string&, const std::string& v) {
                    c.design.import_csv = boost::algorithm::trim_copy(v);
                },
                [](const RunConfig& c) { return c.design.import_csv; }},
        KeySpec{"sweep.snr_db",
                [](RunConfig& c, const std::string& k, const std::string& v) {
                    c.sweep.snr_db.clear();
                    for (const auto& item : split_list(v)) {
                        c.sweep.snr_db.push_back(parse_double(k, item));
                    }
                },
                [](const RunConfig& c) { return join(c.sweep.snr_db, fmt_double); }},
        KeySpec{"sweep.l_list",
                [](RunConfig& c, const std::string& k, const std::string& v) {
                    c.sweep.l_list.clear();
                    for (const auto& item : split_list(v)) {
                        c.sweep.l_list.push_back(parse_int<int>(k, item));
                    }
                },
                [](const RunConfig& c) { return join(c.sweep.l_list, [](int l) { return std::to_string(l); }); }},
        INT_KEY("sweep.l_max", sweep.l_max, int),
        INT_KEY("solver.rays", solver.rays, int),
        DOUBLE_KEY("solver.ray_tol", solver.ray_tol),
        INT_KEY("solver.grid_n", solver.grid_n, int),
        INT_KEY("solver.fw_iters", solver.fw_iters, int),
        DOUBLE_KEY("solver.fw_gap_tol", solver.fw_gap_tol),
        BOOL_KEY("solver.support_bound", solver.support_bound),
        DOUBLE_KEY("field.dy_min", field.dy_min),
        DOUBLE_KEY("field.dy_max", field.dy_max),
        INT_KEY("field.n_dy", field.n_dy, int),
        DOUBLE_KEY("field.dz_min", field.dz_min),
        DOUBLE_KEY("field.dz_max", field.dz_max),
        INT_KEY("field.n_dz", field.n_dz, int),
        DOUBLE_KEY("field.polar_radius", field.polar_radius),
        INT_KEY("field.polar_n", field.polar_n, int),
        INT_KEY("sim.trials", sim.trials, std::uint64_t),
        INT_KEY("sim.seed", sim.seed, std::uint64_t),
        INT_KEY("sim.max_codewords", sim.max_codewords, int),
        BOOL_KEY("sim.self_test", sim.self_test),
    };
    return table;
}

#undef DOUBLE_KEY
#undef INT_KEY
#undef BOOL_KEY

void require(bool ok, const char* key, const char* message) {
    if (!ok) {
        throw ConfigError(key, message);
    }
}

} // namespace

HexDesignOptions RunConfig::hex_options() const {
    HexDesignOptions o;
    o.rotation = design.lattice_rotation;
    o.offset = Position{design.offset_y, design.offset_z};
    return o;
}

RaySearchOptions RunConfig::ray_options() const {
    RaySearchOptions o;
    o.rays = solver.rays;
    o.tol = solver.ray_tol;
    return o;
}

SupportBoundOptions RunConfig::support_options() const {
    SupportBoundOptions o;
    o.grid_n = solver.grid_n;
    o.fw_iters = solver.fw_iters;
    o.gap_tol = solver.fw_gap_tol;
    return o;
}

BoundOptions RunConfig::bound_options() const {
    BoundOptions o;
    o.support = support_options();
    o.rays = ray_options();
    o.design = hex_options();
    o.with_support = solver.support_bound;
    return o;
}

void RunConfig::validate() const {
    array.validate();
    scene.validate();
    require(design.eps > 0.0 && design.eps < 0.5, "design.eps", "must lie in (0, 1/2)");
    require(std::isfinite(design.lattice_rotation), "design.lattice_rotation", "must be finite");
    require(scene.contains(Position{design.offset_y, design.offset_z}), "design.offset_y",
            "lattice offset must lie inside the plane");
    require(design.greedy_step > 0.0, "design.greedy_step", "must be positive");
    require(!sweep.snr_db.empty(), "sweep.snr_db", "must list at least one value");
    require(!sweep.l_list.empty(), "sweep.l_list", "must list at least one value");
    for (int l : sweep.l_list) {
        require(l >= 1, "sweep.l_list", "entries must be >= 1");
    }
    require(sweep.l_max >= 1, "sweep.l_max", "must be >= 1");
    require(solver.rays >= 1, "solver.rays", "must be >= 1");
    require(solver.ray_tol > 0.0, "solver.ray_tol", "must be positive");
    require(solver.grid_n >= 2, "solver.grid_n", "must be >= 2");
    require(solver.fw_iters >= 1, "solver.fw_iters", "must be >= 1");
    require(solver.fw_gap_tol > 0.0, "solver.fw_gap_tol", "must be positive");
    require(field.n_dy >= 1, "field.n_dy", "must be >= 1");
    require(field.n_dz >= 1, "field.n_dz", "must be >= 1");
    require(field.dy_max >= field.dy_min, "field.dy_max", "must be >= field.dy_min");
    require(field.dz_max >= field.dz_min, "field.dz_max", "must be >= field.dz_min");
    require(field.polar_radius >= 0.0, "field.polar_radius", "must be non-negative");
    require(field.polar_n >= 1, "field.polar_n", "must be >= 1");
    require(sim.trials >= 100, "sim.trials", "must be >= 100");
    require(sim.max_codewords >= 1, "sim.max_codewords", "must be >= 1");
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : key_table()) {
        if (k.get) {
            out.emplace_back(k.name, k.get(*this));
        }
    }
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& k : key_table()) {
        if (key == k.name) {
            k.set(cfg, key, value);
            return;
        }
    }
    throw ConfigError(key, "unknown configuration key");
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& k : key_table()) {
        keys.emplace_back(k.name);
    }
    return keys;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::ini_parser::read_ini(path, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            if (e.line() == 0) {
                throw IoError("cannot read config file: " + path);
            }
            throw ConfigError(path, e.message() + " at line " + std::to_string(e.line()));
        }
        for (const auto& [section, body] : tree) {
            if (body.empty()) {
                throw ConfigError(section, "top-level keys are not allowed; use [section] headers");
            }
            for (const auto& [name, node] : body) {
                apply_setting(cfg, section + "." + name, node.get_value<std::string>());
            }
        }
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(o, "override must look like section.key=value");
        }
        apply_setting(cfg, boost::algorithm::trim_copy(o.substr(0, eq)), o.substr(eq + 1));
    }
    return cfg;
}

} // namespace embcomm::cli
