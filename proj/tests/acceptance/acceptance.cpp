#include "embcomm/array_model.hpp"
#include "embcomm/bounds.hpp"
#include "embcomm/channel_sim.hpp"
#include "embcomm/cli/commands.hpp"
#include "embcomm/cli/config.hpp"
#include "embcomm/codebook.hpp"
#include "embcomm/lambert_w.hpp"
#include "embcomm/reliability_field.hpp"
#include "embcomm/sweep.hpp"

#include <Eigen/Dense>
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace embcomm;
namespace fs = std::filesystem;

namespace {

const ArrayConfig kUpa = ArrayConfig::from_carrier(64, 16, 7.0e9);
const ArrayConfig kSmall{8, 4, kUpa.wavelength};
constexpr double kEps = 1e-3;
const std::vector<double> kSweepDb{0.0, 5.0, 10.0, 15.0, 20.0};

struct Outcome {
    bool pass = false;
    std::string detail;
};

SceneConfig scene_at_db(double snr_db, int snapshots = 5) {
    SceneConfig s;
    s.snr_gamma0 = db_to_linear(snr_db);
    s.snapshots_l = snapshots;
    return s;
}

Eigen::VectorXcd as_vector(const SteeringVector& a) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) {
        v[static_cast<Eigen::Index>(k)] = a[k];
    }
    return v;
}

double log_det(const Eigen::MatrixXcd& m) {
    const Eigen::LLT<Eigen::MatrixXcd> llt(m);
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        s += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
    }
    return s;
}

Eigen::MatrixXcd model_covariance(const Position& r, const ArrayConfig& array, const SceneConfig& scene) {
    const Eigen::VectorXcd a = as_vector(steering_vector(r, array, scene));
    const auto m = a.size();
    return scene.noise_var_sigma2 * (Eigen::MatrixXcd::Identity(m, m) + scene.snr_gamma0 * a * a.adjoint());
}

Outcome steering_kernel() {
    SceneConfig scene;
    scene.extent_y = 10.0;
    scene.extent_z = 10.0;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Position r{u(rng), u(rng)};
        const Displacement d{u(rng), u(rng)};
        const SteeringVector a = steering_vector(r, kUpa, scene);
        const SteeringVector b = steering_vector(r + d, kUpa, scene);
        std::complex<double> s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            s += std::conj(a[k]) * b[k];
        }
        worst = std::max(worst, std::abs(steering_correlation_exact(d, kUpa, scene) - std::norm(s)));
    }
    return {worst <= 1e-10, fmt::format("max |eta - brute| = {:.3e} (tol 1e-10)", worst)};
}

Outcome covariance_form() {
    SceneConfig scene;
    scene.snr_gamma0 = 10.0;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Position a{u(rng), u(rng)};
        const Position b{u(rng), u(rng)};
        const Eigen::MatrixXcd ra = model_covariance(a, kSmall, scene);
        const Eigen::MatrixXcd rb = model_covariance(b, kSmall, scene);
        const double dense = log_det(0.5 * (ra + rb)) - 0.5 * (log_det(ra) + log_det(rb));
        worst = std::max(worst, std::abs(bhattacharyya_exact(b - a, kSmall, scene) - dense));
    }
    return {worst <= 1e-8, fmt::format("max |B - dense| = {:.3e} (tol 1e-8)", worst)};
}

Outcome quadratic_surrogate() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0.0, kPi);
    std::uniform_real_distribution<double> frac(0.01, 1.0);
    double worst_rel = 0.0;
    for (double snr_db : {-10.0, 0.0, 10.0, 20.0, 30.0}) {
        const SceneConfig scene = scene_at_db(snr_db);
        const QuadraticFieldParams p = quadratic_params(kUpa, scene);
        for (int i = 0; i < 500; ++i) {
            const double psi = angle(rng);
            auto inside = [&](double r) {
                return within_quadratic_validity({r * std::cos(psi), r * std::sin(psi)}, kUpa, scene);
            };
            double lo = 0.0;
            double hi = 1e-3;
            while (inside(hi) && hi < 1e3) {
                lo = hi;
                hi *= 2.0;
            }
            for (int k = 0; k < 60; ++k) {
                const double mid = 0.5 * (lo + hi);
                (inside(mid) ? lo : hi) = mid;
            }
            const double r = lo * frac(rng);
            const Displacement d{r * std::cos(psi), r * std::sin(psi)};
            const double exact = bhattacharyya_exact(d, kUpa, scene);
            worst_rel = std::max(worst_rel, std::abs(bhattacharyya_quadratic(d, p) - exact) / exact);
        }
    }
    const SceneConfig scene;
    const QuadraticFieldParams p = quadratic_params(kUpa, scene);
    const double h = 1e-4;
    auto b = [&](double dy, double dz) { return bhattacharyya_exact({dy, dz}, kUpa, scene); };
    const double hyy = (b(h, 0.0) - 2.0 * b(0.0, 0.0) + b(-h, 0.0)) / (h * h);
    const double hzz = (b(0.0, h) - 2.0 * b(0.0, 0.0) + b(0.0, -h)) / (h * h);
    const double ey = std::abs(hyy / (2.0 * p.g_b[0]) - 1.0);
    const double ez = std::abs(hzz / (2.0 * p.g_b[1]) - 1.0);
    const bool ok = worst_rel < 0.01 && ey < 0.005 && ez < 0.005;
    return {ok, fmt::format("max rel err {:.3e} (tol 1e-2); Hessian rel err y {:.2e}, z {:.2e} (tol 5e-3)", worst_rel,
                            ey, ez)};
}

Outcome decoder_equivalence() {
    SceneConfig scene;
    scene.snr_gamma0 = 2.0;
    scene.snapshots_l = 5;
    const std::vector<Position> pos{{-0.6, 0.0}, {-0.2, 0.5}, {0.2, -0.5}, {0.6, 0.0}};
    const SteeringBank bank(pos, kSmall, scene);
    std::vector<Eigen::LLT<Eigen::MatrixXcd>> factors;
    std::vector<double> logdets;
    for (const auto& p : pos) {
        const Eigen::MatrixXcd r = model_covariance(p, kSmall, scene);
        factors.emplace_back(r);
        logdets.push_back(log_det(r));
    }
    int disagreements = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const SnapshotBatch batch = draw_channel_use(bank, t % pos.size(), SimSeed{0, 77}, t, scene);
        Eigen::MatrixXcd y(static_cast<Eigen::Index>(batch.y.rows), static_cast<Eigen::Index>(batch.y.cols));
        for (std::size_t c = 0; c < batch.y.cols; ++c) {
            for (std::size_t r = 0; r < batch.y.rows; ++r) {
                y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = batch.y.at(r, c);
            }
        }
        const Eigen::MatrixXcd s = y * y.adjoint();
        std::size_t best = 0;
        double best_nll = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < pos.size(); ++j) {
            const double nll = scene.snapshots_l * logdets[j] + std::real(factors[j].solve(s).trace());
            if (nll < best_nll) {
                best_nll = nll;
                best = j;
            }
        }
        disagreements += best != ml_decode(batch, bank) ? 1 : 0;
    }
    return {disagreements == 0, fmt::format("{} disagreements in 1000 batches", disagreements)};
}

Outcome bound_soundness() {
    const SceneConfig scene; // gamma0 = 10, L = 5
    Codebook cb({{-1.0, 0.0}, {-1.0 / 3.0, 0.0}, {1.0 / 3.0, 0.0}, {1.0, 0.0}}, ReliabilityField(kUpa, scene));
    const SimReport r = estimate_errors(cb, 20000, SimSeed{0, 1});
    const double union_bound = 3.0 * std::exp(-scene.snapshots_l * cb.min_pairwise_b());
    const bool union_ok = r.max_error <= union_bound + r.wilson_halfwidth_95;
    int violations = 0;
    for (const auto& e : r.pairwise_table) {
        const double bound = std::exp(-scene.snapshots_l * bhattacharyya_exact(cb[e.i] - cb[e.j], kUpa, scene));
        violations += e.confusion_rate > bound + e.halfwidth ? 1 : 0;
    }
    return {union_ok && violations == 0,
            fmt::format("max error {:.4f} <= union {:.4f} + hw {:.4f}; pairwise violations {} of {} ({})", r.max_error,
                        union_bound, r.wilson_halfwidth_95, violations, r.pairwise_table.size(), r.kernel)};
}

Outcome converse_floor() {
    const SceneConfig scene; // gamma0 = 10, L = 5
    const double target = std::log(10.0) / (2.0 * scene.snapshots_l);
    double lo = 0.0;
    double hi = 2.0 * scene.distance_d / kUpa.m_y; // first null: B at its ceiling
    for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (lo + hi);
        (bhattacharyya_exact({mid, 0.0}, kUpa, scene) < target ? lo : hi) = mid;
    }
    const double d = 0.5 * (lo + hi);
    Codebook pair({{-0.5 * d, 0.0}, {0.5 * d, 0.0}}, ReliabilityField(kUpa, scene));
    const BinaryPairResult r = binary_pair_experiment(pair, 20000, SimSeed{0, 2});
    const double floor = 0.5 * (1.0 - std::sqrt(0.9));
    return {r.error_rate >= floor - 3.0 * r.halfwidth,
            fmt::format("d = {:.6f} m, error {:.4f} >= floor {:.6f} - 3 x hw {:.4f}", d, r.error_rate, floor,
                        r.halfwidth)};
}

Outcome design_feasibility() {
    std::size_t previous = 0;
    bool ok = true;
    std::string js;
    for (double snr_db : kSweepDb) {
        const SceneConfig scene = scene_at_db(snr_db);
        HexagonalDesign d = hexagonal_design(kEps, kUpa, scene);
        const DesignReport r = verify_codebook(d.codebook, kEps);
        ok = ok && r.feasible && r.j >= previous;
        previous = r.j;
        js += fmt::format("{}{}dB:J={}", js.empty() ? "" : " ", snr_db, r.j);
    }
    return {ok, js};
}

Outcome sandwich() {
    std::vector<double> snr;
    for (double snr_db : {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0}) {
        snr.push_back(db_to_linear(snr_db));
    }
    const std::vector<int> ls{1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20};
    RateSweepOptions opts;
    opts.bounds.with_support = false;
    opts.bounds.with_l_star = false;
    const auto rows = rate_sweep(kEps, SceneConfig{}, kUpa, snr, ls, opts);
    int violations = 0;
    double worst_slack = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        const double m = kUpa.elements();
        const double c_snap = m * std::log2(1.0 + row.gamma0 / m) - std::log2(1.0 + row.gamma0);
        const double h2 = -kEps * std::log2(kEps) - (1.0 - kEps) * std::log2(1.0 - kEps);
        const double universal = (c_snap + h2 / row.snapshots) / (1.0 - kEps);
        const double rate = row.rate_bits_per_second;
        const bool ok = rate <= universal && rate <= row.c_info_universal && rate <= row.c_geo;
        violations += ok ? 0 : 1;
        worst_slack = std::min(worst_slack, std::min(universal, row.c_geo) - rate);
    }
    return {violations == 0 && !rows.empty(),
            fmt::format("{} violations over {} points; min slack {:.4f} bits/s", violations, rows.size(), worst_slack)};
}

Outcome optimal_snapshots_check() {
    int within_one = 0;
    int within_two = 0;
    bool interior = true;
    std::string points;
    for (double snr_db : kSweepDb) {
        const SceneConfig scene = scene_at_db(snr_db);
        const OptimalSnapshots o = optimal_snapshots(kEps, kUpa, scene);
        const int l_hi = std::max(64, 2 * static_cast<int>(std::ceil(o.l_continuous)) + 4);
        std::vector<double> rates(static_cast<std::size_t>(l_hi) + 1, 0.0);
        double best = 0.0;
        for (int l = 1; l <= l_hi; ++l) {
            rates[static_cast<std::size_t>(l)] = hex_rate_at(kEps, kUpa, scene, l);
            best = std::max(best, rates[static_cast<std::size_t>(l)]);
        }
        // Distinct (J, L) pairs can share a rate; every maximizer counts.
        int distance = l_hi;
        int argmax = 0;
        for (int l = 1; l <= l_hi; ++l) {
            if (best > 0.0 && rates[static_cast<std::size_t>(l)] >= best * (1.0 - 1e-12)) {
                distance = std::min(distance, std::abs(l - o.l_integer));
                argmax = argmax == 0 ? l : argmax;
            }
        }
        within_one += distance <= 1 ? 1 : 0;
        within_two += distance <= 2 ? 1 : 0;
        const bool has_interior = best > 0.0 && argmax > 1 && rates[static_cast<std::size_t>(l_hi)] < best;
        interior = interior && has_interior;
        points += fmt::format("{}{}dB:L*={} exh={} (cont {:.1f})", points.empty() ? "" : " ", snr_db, o.l_integer,
                              argmax, o.l_continuous);
    }
    const int n = static_cast<int>(kSweepDb.size());
    const bool ok = interior && within_one >= static_cast<int>(std::ceil(0.9 * n)) && within_two == n;
    return {ok, fmt::format("interior max {}; within 1: {}/{}, within 2: {}/{}; {}", interior ? "yes" : "no",
                            within_one, n, within_two, n, points)};
}

Outcome lambert_identity() {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = std::pow(10.0, -6.0 + 12.0 * i / 999.0);
        const double w = lambert_w0(x);
        worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, x));
    }
    const double e0 = std::abs(lambert_w0(0.0));
    const double e1 = std::abs(lambert_w0(std::exp(1.0)) - 1.0);
    return {worst <= 1e-10 && e0 <= 1e-12 && e1 <= 1e-12,
            fmt::format("identity err {:.2e}; |W(0)| {:.1e}; |W(e) - 1| {:.1e}", worst, e0, e1)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const cli::RunConfig cfg = cli::load_config(
        "", {"sweep.snr_db=10,20,30", "sweep.l_list=2,5,8", "solver.grid_n=9", "scene.snr_db=30", "sim.trials=2000",
             "sim.max_codewords=6", "sim.seed=12345"});
    const fs::path root = fs::temp_directory_path() / "embcomm_acceptance_determinism";
    fs::remove_all(root);
    int compared = 0;
    int differing = 0;
    for (const std::string cmd : {"sweep", "simulate"}) {
        std::ostringstream log;
        std::ostringstream err;
        const fs::path a = root / (cmd + "_a");
        const fs::path b = root / (cmd + "_b");
        if (cli::run_command(cmd, cfg, a, log, err) != cli::kExitOk ||
            cli::run_command(cmd, cfg, b, log, err) != cli::kExitOk) {
            return {false, cmd + " did not exit cleanly: " + err.str()};
        }
        for (const auto& entry : fs::directory_iterator(a)) {
            ++compared;
            differing += slurp(entry.path()) == slurp(b / entry.path().filename()) ? 0 : 1;
        }
    }
    fs::remove_all(root);
    return {differing == 0 && compared >= 4, fmt::format("{} of {} files differ", differing, compared)};
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_s; // 0 for none
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "steering correlation closed form", 5.0, steering_kernel},
        {2, "covariance-form Bhattacharyya", 10.0, covariance_form},
        {3, "quadratic surrogate and curvature", 0.0, quadratic_surrogate},
        {4, "decoder equivalence", 0.0, decoder_equivalence},
        {5, "bound soundness by simulation", 120.0, bound_soundness},
        {6, "converse floor by simulation", 0.0, converse_floor},
        {7, "design feasibility", 0.0, design_feasibility},
        {8, "rate sandwich", 0.0, sandwich},
        {9, "optimal snapshot count", 0.0, optimal_snapshots_check},
        {10, "Lambert W", 0.0, lambert_identity},
        {11, "determinism", 0.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0 && secs >= c.time_limit_s) {
            o.pass = false;
            o.detail += fmt::format("; over time limit {:.0f} s", c.time_limit_s);
        }
        failures += o.pass ? 0 : 1;
        fmt::print("{} {:2d} {} [{:.2f} s]: {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
