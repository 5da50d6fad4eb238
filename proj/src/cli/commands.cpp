#include "embcomm/cli/commands.hpp"

#include "embcomm/bounds.hpp"
#include "embcomm/channel_sim.hpp"
#include "embcomm/cli/output.hpp"
#include "embcomm/errors.hpp"
#include "embcomm/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

namespace embcomm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "true" : "false"; }

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    }
    return v;
}

std::vector<double> snr_linear(const RunConfig& cfg) {
    std::vector<double> g;
    for (double db : cfg.sweep.snr_db) {
        g.push_back(db_to_linear(db));
    }
    return g;
}

json report_json(const DesignReport& r) {
    return json{{"j", r.j},
                {"b_min", json_number(r.b_min)},
                {"b_threshold", json_number(r.b_threshold)},
                {"slack_nats", json_number(r.slack_nats)},
                {"feasible", r.feasible},
                {"eps", r.eps},
                {"snapshots", r.snapshots},
                {"rate_bits_per_pulse", r.rate_bits_per_pulse},
                {"rate_bits_per_second", r.rate_bits_per_second}};
}

json positions_json(const std::vector<Position>& pts) {
    json a = json::array();
    for (const auto& p : pts) {
        a.push_back(json::array({p.y, p.z}));
    }
    return a;
}

// Nearest-neighbour spacing along one axis among pairs aligned with it.
double axis_spacing(const std::vector<Position>& pts, bool along_y) {
    double best = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double along = along_y ? std::abs(pts[j].y - pts[i].y) : std::abs(pts[j].z - pts[i].z);
            const double across = along_y ? std::abs(pts[j].z - pts[i].z) : std::abs(pts[j].y - pts[i].y);
            if (across <= 1e-9 && along > 1e-12) {
                best = std::min(best, along);
            }
        }
    }
    return best;
}

// Exact union-bound condition recomputed pair by pair, independent of the cached minimum.
bool reverify(const Codebook& cb, double eps) {
    if (cb.size() < 2) {
        return true;
    }
    const double need = thresholds::codebook(static_cast<double>(cb.size()), eps, cb.field().scene().snapshots_l);
    for (std::size_t i = 0; i < cb.size(); ++i) {
        for (std::size_t j = i + 1; j < cb.size(); ++j) {
            if (bhattacharyya_exact(cb[j] - cb[i], cb.field().array(), cb.field().scene()) < need) {
                return false;
            }
        }
    }
    return true;
}

void write_codebook_csv(const fs::path& path, const std::vector<std::string>& comments, const Codebook& cb) {
    CsvWriter csv(path, comments, {"index", "y_m", "z_m"});
    for (std::size_t i = 0; i < cb.size(); ++i) {
        csv.row({num(i), num(cb[i].y), num(cb[i].z)});
    }
    csv.close();
}

Codebook imported_codebook(const RunConfig& cfg) {
    std::vector<Position> pts = read_codebook_csv(cfg.design.import_csv);
    if (pts.empty()) {
        throw ConfigError("design.import_csv", "codebook file has no rows");
    }
    return Codebook(std::move(pts), ReliabilityField(cfg.array, cfg.scene));
}

} // namespace

int cmd_field(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    ensure_directory(out);
    const ReliabilityField field(cfg.array, cfg.scene);
    const auto comments = provenance_lines("field", cfg);

    CsvWriter grid(out / "field_grid.csv", comments, {"dy", "dz", "b_exact", "b_quadratic"});
    const auto dys = linspace(cfg.field.dy_min, cfg.field.dy_max, cfg.field.n_dy);
    const auto dzs = linspace(cfg.field.dz_min, cfg.field.dz_max, cfg.field.n_dz);
    for (double dy : dys) {
        for (double dz : dzs) {
            const Displacement d{dy, dz};
            grid.row({num(dy), num(dz), num(field.exact(d)), num(field.quadratic(d))});
        }
    }
    grid.close();

    CsvWriter polar(out / "field_polar.csv", comments, {"psi", "radius", "b_exact", "b_quadratic"});
    const double r = cfg.field.polar_radius;
    for (int k = 0; k < cfg.field.polar_n; ++k) {
        const double psi = 2.0 * kPi * k / cfg.field.polar_n;
        const Displacement d{r * std::cos(psi), r * std::sin(psi)};
        polar.row({num(psi), num(r), num(field.exact(d)), num(field.quadratic(d))});
    }
    polar.close();
    log << fmt::format("field: {} grid points, {} polar samples\n", dys.size() * dzs.size(), cfg.field.polar_n);
    return kExitOk;
}

int cmd_codebook(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    ensure_directory(out);
    const double eps = cfg.design.eps;
    const auto comments = provenance_lines("codebook", cfg);
    json manifest{{"command", "codebook"}, {"config", config_json(cfg)}};

    if (!cfg.design.import_csv.empty()) {
        Codebook cb = imported_codebook(cfg);
        const DesignReport r = verify_codebook(cb, eps);
        const bool again = reverify(cb, eps) == r.feasible;
        manifest["source"] = "import";
        manifest["report"] = report_json(r);
        manifest["reverification_consistent"] = again;
        manifest["positions"] = positions_json(cb.positions());
        write_codebook_csv(out / "codebook.csv", comments, cb);
        write_json(out / "codebook.json", manifest);
        log << fmt::format("codebook: imported J={} feasible={} slack={}\n", r.j, r.feasible, num(r.slack_nats));
        return again ? kExitOk : kExitInvariant;
    }

    const HexagonalDesign d = hexagonal_design(eps, cfg.array, cfg.scene, cfg.hex_options());
    write_codebook_csv(out / "codebook.csv", comments, d.codebook);

    const QuadraticFieldParams& qp = d.codebook.field().params();
    const bool exact_ok = !d.report.feasible || reverify(d.codebook, eps);
    const double whitened = whitened_min_distance(d.codebook.positions(), qp);
    const bool spacing_ok = d.codebook.size() < 2 || whitened >= d.whitened_spacing - 1e-9;

    const double sy = axis_spacing(d.codebook.positions(), true);
    const double sz = axis_spacing(d.codebook.positions(), false);
    json anisotropy{{"alpha_y", qp.alpha_y},
                    {"alpha_z", qp.alpha_z},
                    {"nn_spacing_y", json_number(sy)},
                    {"nn_spacing_z", json_number(sz)},
                    {"lattice_step_y", d.whitened_spacing / qp.transform[0]},
                    {"lattice_step_z", d.whitened_spacing / qp.transform[1]}};
    bool anisotropy_ok = true;
    if (std::isfinite(sy) && std::isfinite(sz) && qp.alpha_y != qp.alpha_z) {
        anisotropy_ok = (qp.alpha_y > qp.alpha_z) == (sy < sz);
        anisotropy["denser_along_finer_axis"] = anisotropy_ok;
    } else {
        anisotropy["denser_along_finer_axis"] = nullptr;
    }

    const Codebook greedy = greedy_packing_baseline(eps, cfg.array, cfg.scene, cfg.design.greedy_step);
    const DesignReport greedy_report = verify_codebook(greedy, eps);

    json notes = json::array();
    for (const auto& n : d.notes) {
        notes.push_back(n);
    }
    manifest["source"] = "hexagonal";
    manifest["design"] = json{{"xi", d.xi},
                              {"xi_h", d.xi_h},
                              {"j_continuous", d.j_continuous},
                              {"j_lambert", d.j_lambert},
                              {"j_fixed_point", d.fixed_point.j},
                              {"fixed_point_iterations", d.fixed_point.iterations},
                              {"sizing_agree", d.sizing_agree},
                              {"sizing_consistent", d.sizing_consistent},
                              {"initial_whitened_spacing", d.initial_spacing},
                              {"whitened_spacing", d.whitened_spacing},
                              {"design_threshold", d.design_threshold},
                              {"backoff_steps", d.backoff_steps},
                              {"notes", notes}};
    manifest["report"] = report_json(d.report);
    manifest["reverification"] = json{{"exact_condition_holds", exact_ok},
                                      {"whitened_min_distance", json_number(whitened)},
                                      {"whitened_spacing_holds", spacing_ok}};
    manifest["anisotropy"] = anisotropy;
    manifest["greedy_baseline"] = report_json(greedy_report);
    manifest["greedy_baseline"]["grid_step"] = cfg.design.greedy_step;
    write_json(out / "codebook.json", manifest);

    log << fmt::format("codebook: J={} (closed form {}, fixed point {}) feasible={} greedy J={}\n", d.report.j,
                       d.j_lambert, d.fixed_point.j, d.report.feasible, greedy_report.j);
    return exact_ok && spacing_ok && d.report.feasible ? kExitOk : kExitInvariant;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    ensure_directory(out);
    const double eps = cfg.design.eps;
    const auto comments = provenance_lines("sweep", cfg);
    RateSweepOptions opts;
    opts.bounds = cfg.bound_options();
    const auto gammas = snr_linear(cfg);
    const auto rows = rate_sweep(eps, cfg.scene, cfg.array, gammas, cfg.sweep.l_list, opts);

    bool sandwich = true;
    CsvWriter csv(out / "sweep.csv", comments,
                  {"gamma0", "snr_db", "L", "j_hex", "rate_bits_per_pulse", "rate_bits_per_second", "feasible",
                   "c_info_universal", "c_info_support_grid", "support_grid_n", "c_geo", "c_geo_mainlobe", "d_nec",
                   "sandwich_ok", "support_ok", "monotone_in_snr"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        bool monotone = true;
        for (const auto& o : rows) {
            if (o.snapshots == r.snapshots && o.gamma0 < r.gamma0 && o.rate_bits_per_pulse > r.rate_bits_per_pulse) {
                monotone = false;
            }
        }
        sandwich = sandwich && r.sandwich_ok && r.support_ok;
        csv.row({num(r.gamma0), num(linear_to_db(r.gamma0)), num(r.snapshots), num(r.j_hex), num(r.rate_bits_per_pulse),
                 num(r.rate_bits_per_second), flag(r.feasible), num(r.c_info_universal), num(r.c_info_support),
                 num(r.support_grid_n), num(r.c_geo), num(r.c_geo_mainlobe), num(r.d_nec), flag(r.sandwich_ok),
                 flag(r.support_ok), flag(monotone)});
    }
    csv.close();

    CsvWriter lstar(out / "lstar.csv", comments,
                    {"gamma0", "snr_db", "l_star_cont", "l_star_nearest", "l_star_int", "rate_at_l_star", "rate_at_l1",
                     "optimized_ge_fixed"});
    for (double g : gammas) {
        const SceneConfig scene = cfg.scene.with_snr(g);
        const OptimalSnapshots o = optimal_snapshots(eps, cfg.array, scene, cfg.hex_options());
        const double best = hex_rate_at(eps, cfg.array, scene, o.l_integer, cfg.hex_options());
        const double one = hex_rate_at(eps, cfg.array, scene, 1, cfg.hex_options());
        lstar.row({num(g), num(linear_to_db(g)), num(o.l_continuous), num(o.l_nearest), num(o.l_integer), num(best),
                   num(one), flag(best >= one)});
    }
    lstar.close();
    log << fmt::format("sweep: {} rows, sandwich {}\n", rows.size(), sandwich ? "holds" : "VIOLATED");
    return sandwich ? kExitOk : kExitInvariant;
}

int cmd_bounds(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    ensure_directory(out);
    const double eps = cfg.design.eps;
    RateSweepOptions opts;
    opts.bounds = cfg.bound_options();
    const auto gammas = snr_linear(cfg);
    const auto rows = rate_sweep(eps, cfg.scene, cfg.array, gammas, cfg.sweep.l_list, opts);

    std::map<double, OptimalSnapshots> lstar;
    for (double g : gammas) {
        lstar.emplace(g, optimal_snapshots(eps, cfg.array, cfg.scene.with_snr(g), cfg.hex_options()));
    }
    bool ok = true;
    CsvWriter csv(out / "bounds.csv", provenance_lines("bounds", cfg),
                  {"gamma0", "L", "rate_lower", "c_info_universal", "c_info_support_grid", "c_geo", "c_geo_mainlobe",
                   "d_nec", "l_star_cont", "l_star_int"});
    for (const auto& r : rows) {
        const OptimalSnapshots& o = lstar.at(r.gamma0);
        ok = ok && r.sandwich_ok && r.support_ok;
        csv.row({num(r.gamma0), num(r.snapshots), num(r.rate_bits_per_second), num(r.c_info_universal),
                 num(r.c_info_support), num(r.c_geo), num(r.c_geo_mainlobe), num(r.d_nec), num(o.l_continuous),
                 num(o.l_integer)});
    }
    csv.close();
    log << fmt::format("bounds: {} rows, sandwich {}\n", rows.size(), ok ? "holds" : "VIOLATED");
    return ok ? kExitOk : kExitInvariant;
}

int cmd_lstar(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    ensure_directory(out);
    const double eps = cfg.design.eps;
    const auto comments = provenance_lines("lstar", cfg);
    CsvWriter curve(out / "rate_vs_l.csv", comments, {"gamma0", "snr_db", "L", "j_hex", "rate_bits_per_pulse"});
    CsvWriter table(out / "lstar.csv", comments,
                    {"gamma0", "snr_db", "q", "y_star", "l_star_cont", "l_star_nearest", "l_star_int", "l_exhaustive",
                     "rate_at_l_star_int", "rate_at_l_exhaustive", "within_one"});
    for (double g : snr_linear(cfg)) {
        const SceneConfig scene = cfg.scene.with_snr(g);
        const OptimalSnapshots o = optimal_snapshots(eps, cfg.array, scene, cfg.hex_options());
        int best_l = 1;
        double best_rate = -1.0;
        for (int l = 1; l <= cfg.sweep.l_max; ++l) {
            const HexagonalDesign d = hexagonal_design(eps, cfg.array, scene.with_snapshots(l), cfg.hex_options());
            const double rate = d.report.feasible ? d.report.rate_bits_per_pulse : 0.0;
            curve.row({num(g), num(linear_to_db(g)), num(l), num(d.report.j), num(rate)});
            if (rate > best_rate) {
                best_rate = rate;
                best_l = l;
            }
        }
        const double at_int = hex_rate_at(eps, cfg.array, scene, o.l_integer, cfg.hex_options());
        table.row({num(g), num(linear_to_db(g)), num(o.q), num(o.y_star), num(o.l_continuous), num(o.l_nearest),
                   num(o.l_integer), num(best_l), num(at_int), num(best_rate), flag(std::abs(o.l_integer - best_l) <= 1)});
    }
    curve.close();
    table.close();
    log << fmt::format("lstar: {} SNR points\n", cfg.sweep.snr_db.size());
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    ensure_directory(out);
    const double eps = cfg.design.eps;
    const auto comments = provenance_lines("simulate", cfg);

    std::string source = "import";
    std::optional<Codebook> full;
    if (!cfg.design.import_csv.empty()) {
        full.emplace(imported_codebook(cfg));
    } else {
        source = "hexagonal";
        full.emplace(hexagonal_design(eps, cfg.array, cfg.scene, cfg.hex_options()).codebook);
    }
    const auto indices = select_sub_codebook(*full, static_cast<std::size_t>(cfg.sim.max_codewords), cfg.sim.seed);
    const Codebook cb = full->subset(indices);
    SimReport r = estimate_errors(cb, cfg.sim.trials, SimSeed{0, cfg.sim.seed});

    if (cfg.sim.self_test) {
        // Negative control: an impossible bound must trip the gate.
        r.union_bound_prediction = -1.0;
        for (auto& e : r.pairwise_table) {
            e.bhatt_bound = -1.0;
        }
    }
    const bool union_ok = cb.size() < 2 || r.max_error <= r.union_bound_prediction + r.wilson_halfwidth_95;
    bool pair_ok = true;
    for (const auto& e : r.pairwise_table) {
        pair_ok = pair_ok && e.empirical_rate <= e.bhatt_bound + e.halfwidth;
    }

    CsvWriter csv(out / "sim_pairwise.csv", comments,
                  {"i", "j", "empirical_rate", "bhatt_bound", "halfwidth", "confusion_rate"});
    for (const auto& e : r.pairwise_table) {
        csv.row({num(e.i), num(e.j), num(e.empirical_rate), num(e.bhatt_bound), num(e.halfwidth), num(e.confusion_rate)});
    }
    csv.close();

    json idx = json::array();
    for (auto i : indices) {
        idx.push_back(i);
    }
    json doc{{"command", "simulate"},
             {"config", config_json(cfg)},
             {"seed", cfg.sim.seed},
             {"source", source},
             {"full_codebook_size", full->size()},
             {"sub_codebook_indices", idx},
             {"positions", positions_json(cb.positions())},
             {"kernel", r.kernel},
             {"trials", r.trials},
             {"per_codeword_error", r.per_codeword_error},
             {"per_codeword_halfwidth", r.per_codeword_halfwidth},
             {"max_error", r.max_error},
             {"max_error_index", r.max_error_index},
             {"wilson_halfwidth_95", r.wilson_halfwidth_95},
             {"union_bound_prediction", r.union_bound_prediction},
             {"b_min", json_number(r.b_min)},
             {"self_test", cfg.sim.self_test},
             {"union_bound_respected", union_ok},
             {"pairwise_bounds_respected", pair_ok}};
    write_json(out / "sim_report.json", doc);

    log << fmt::format("simulate: J={} trials={} max_error={} union={} gate={}\n", cb.size(), r.trials,
                       num(r.max_error), num(r.union_bound_prediction), union_ok && pair_ok ? "pass" : "FAIL");
    return union_ok && pair_ok ? kExitOk : kExitInvariant;
}

int run_command(const std::string& name, const RunConfig& cfg, const fs::path& out, std::ostream& log,
                std::ostream& err) {
    try {
        cfg.validate();
        if (name == "field") {
            return cmd_field(cfg, out, log);
        }
        if (name == "codebook") {
            return cmd_codebook(cfg, out, log);
        }
        if (name == "sweep") {
            return cmd_sweep(cfg, out, log);
        }
        if (name == "bounds") {
            return cmd_bounds(cfg, out, log);
        }
        if (name == "lstar") {
            return cmd_lstar(cfg, out, log);
        }
        if (name == "simulate") {
            return cmd_simulate(cfg, out, log);
        }
        err << "unknown command: " << name << '\n';
        return kExitValidation;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    }
}

} // namespace embcomm::cli
