#include "doctest.h"

#include "embcomm/bounds.hpp"
#include "embcomm/lambert_w.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

using namespace embcomm;

namespace {

const ArrayConfig kUpa = ArrayConfig::from_carrier(64, 16, 7.0e9);
const ArrayConfig kSmall{8, 4, kUpa.wavelength};

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

struct DenseCheck {
    double c_snap_bits = 0.0;
    double max_gradient = 0.0;
    double mean_gradient = 0.0;
};

// Rebuilds Q from the weights at full dimension and evaluates the objective
// and its gradient d/dw_k log det(I + gamma Q) = gamma a_k^H (I + gamma Q)^{-1} a_k.
DenseCheck dense_check(const SupportSnapshotResult& r, double gamma, const ArrayConfig& array,
                       const SceneConfig& scene, const std::vector<double>& ys, const std::vector<double>& zs) {
    const auto m = static_cast<Eigen::Index>(array.elements());
    std::vector<Eigen::VectorXcd> atoms;
    for (double z : zs) {
        for (double y : ys) {
            atoms.push_back(as_vector(steering_vector({y, z}, array, scene)));
        }
    }
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(m, m);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        q += r.weights[k] * atoms[k] * atoms[k].adjoint();
    }
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m, m) + gamma * q;
    const Eigen::LLT<Eigen::MatrixXcd> llt(a);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        logdet += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
    }
    DenseCheck out;
    out.c_snap_bits = (logdet - std::log1p(gamma)) / std::log(2.0);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const double g = gamma * std::real(atoms[k].dot(llt.solve(atoms[k])));
        out.max_gradient = std::max(out.max_gradient, g);
        out.mean_gradient += r.weights[k] * g;
    }
    return out;
}

// Continuous rate log2(J(L))/L with J log(J/eps) = xi_h L.
double continuous_rate(double l, double xi_h, double eps) {
    const double c = xi_h * l;
    const double j = c / lambert_w0(c / eps);
    return std::log2(j) / l;
}

} // namespace

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(1e-3) == doctest::Approx(0.011408).epsilon(1e-4));
    CHECK(binary_entropy(0.11) == doctest::Approx(binary_entropy(0.89)).epsilon(1e-14));
}

TEST_CASE("universal snapshot capacity") {
    CHECK(snapshot_capacity_universal(10.0, 1024) == doctest::Approx(10.90).epsilon(1e-3));
    CHECK(snapshot_capacity_universal(10.0, 1) == doctest::Approx(0.0).scale(1.0));
    CHECK(snapshot_capacity_universal(1e-9, 1024) < 1e-9);
    double previous = 0.0;
    for (double g : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
        const double c = snapshot_capacity_universal(g, 1024);
        CHECK(c > previous);
        previous = c;
    }
    const SceneConfig scene;
    const double c = snapshot_capacity_universal(10.0, 1024);
    CHECK(info_bound_universal(1e-3, kUpa, scene) ==
          doctest::Approx((c + binary_entropy(1e-3) / 5.0) / (1.0 - 1e-3)));
}

TEST_CASE("support bound on a single point is zero") {
    const SceneConfig scene;
    const SupportSnapshotResult r = support_snapshot_capacity(10.0, kUpa, scene, {0.0}, {0.0});
    CHECK(std::abs(r.c_snap_bits) < 1e-12);
    CHECK(plane_axis_grid(2.0, 1) == std::vector<double>{0.0});
    const auto g = plane_axis_grid(2.0, 5);
    CHECK(g.front() == -1.0);
    CHECK(g.back() == 1.0);
}

TEST_CASE("support bound matches a dense reconstruction and is optimal") {
    for (double snr_db : {0.0, 10.0, 30.0}) {
        SceneConfig scene = scene_at_db(snr_db);
        scene.extent_y = 10.0;
        scene.extent_z = 10.0;
        const auto ys = plane_axis_grid(scene.extent_y, 7);
        const auto zs = plane_axis_grid(scene.extent_z, 7);
        SupportBoundOptions opts;
        opts.fw_iters = 20000;
        const SupportSnapshotResult r =
            support_snapshot_capacity(scene.snr_gamma0, kSmall, scene, ys, zs, opts);
        REQUIRE(r.weights.size() == 49u);
        CHECK(r.converged);
        double wsum = 0.0;
        for (double w : r.weights) {
            CHECK(w >= 0.0);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
        const DenseCheck d = dense_check(r, scene.snr_gamma0, kSmall, scene, ys, zs);
        CHECK(r.c_snap_bits == doctest::Approx(d.c_snap_bits).epsilon(1e-9));
        // Optimality: no atom improves the objective to first order beyond the gap.
        CHECK(d.max_gradient - d.mean_gradient <= 2.0 * opts.gap_tol + 1e-9);
        CHECK(r.c_snap_bits <= snapshot_capacity_universal(scene.snr_gamma0, kSmall.elements()) + 1e-9);
    }
}

TEST_CASE("support bound is monotone and capped") {
    const SceneConfig scene = scene_at_db(20.0);
    double previous = -1.0;
    std::vector<double> trace;
    for (int n : {3, 5, 9, 17}) {
        const auto ys = plane_axis_grid(scene.extent_y, n);
        const auto zs = plane_axis_grid(scene.extent_z, n);
        const SupportSnapshotResult r = support_snapshot_capacity(scene.snr_gamma0, kUpa, scene, ys, zs);
        CHECK(r.c_snap_bits >= previous - 1e-6);
        CHECK(r.c_snap_bits <= snapshot_capacity_universal(scene.snr_gamma0, kUpa.elements()));
        previous = r.c_snap_bits;
        for (std::size_t k = 1; k < r.trace.size(); ++k) {
            CHECK(r.trace[k] >= r.trace[k - 1] - 1e-12);
        }
        CHECK(r.reduced_dimension <= std::min(kUpa.elements(), n * n));
    }
}

TEST_CASE("packing count bound") {
    const double area = packing_count_bound(0.5, 2.0, 2.0) * kPi * 0.25 / 4.0;
    CHECK(area == doctest::Approx(4.0 + 2.0 + kPi / 16.0).epsilon(1e-14));
    CHECK(area == doctest::Approx(6.19635).epsilon(1e-6));
    CHECK(packing_count_bound(std::numeric_limits<double>::infinity(), 2.0, 2.0) == 1.0);
    double previous = std::numeric_limits<double>::infinity();
    for (double d = 0.01; d < 10.0; d *= 1.3) {
        const double j = packing_count_bound(d, 2.0, 2.0);
        CHECK(j < previous);
        CHECK(j > 1.0);
        previous = j;
    }
    const double d = 1e-3;
    CHECK(packing_count_bound(d, 2.0, 0.5) == doctest::Approx(4.0 * 1.0 / (kPi * d * d)).epsilon(1e-2));
}

TEST_CASE("geometric bound") {
    const SceneConfig scene = scene_at_db(20.0);
    const GeoBoundResult g = geo_bound(1e-3, kUpa, scene);
    REQUIRE(g.bounded);
    CHECK(g.j_max == doctest::Approx(packing_count_bound(g.d_nec, 2.0, 2.0)));
    CHECK(g.bound == doctest::Approx(std::log2(g.j_max) / (5.0 * scene.pulse_duration_tp)));

    const GeoBoundResult low = geo_bound(1e-3, kUpa, scene_at_db(0.0, 1));
    CHECK_FALSE(low.bounded);
    CHECK(low.bound == 0.0);
    CHECK(low.j_max == 1.0);
    CHECK(std::isinf(low.d_nec));
    CHECK_FALSE(low.diagnostic.empty());
}

TEST_CASE("main-lobe geometric bound") {
    const SceneConfig scene = scene_at_db(30.0, 40);
    const double omega = mainlobe_curvature(kUpa, scene);
    const double gamma = scene.snr_gamma0;
    CHECK(omega == doctest::Approx(kPi * kPi * gamma * gamma * 4095.0 / (24.0 * 1e4 * (1.0 + gamma))));
    const GeoBoundResult g = geo_bound(1e-3, kUpa, scene);
    REQUIRE(g.bounded);
    CHECK(geo_bound_mainlobe(1e-3, kUpa, scene) == doctest::Approx(g.bound).epsilon(0.05));
}

TEST_CASE("designs sit under every converse") {
    for (double snr_db : {0.0, 10.0, 20.0, 30.0}) {
        for (int l : {1, 5, 12}) {
            const SceneConfig scene = scene_at_db(snr_db, l);
            BoundOptions opts;
            opts.support.grid_n = 9;
            opts.with_l_star = false;
            const BoundReport b = bound_report(1e-3, kUpa, scene, opts);
            const HexagonalDesign d = hexagonal_design(1e-3, kUpa, scene);
            const double rate = d.report.rate_bits_per_second;
            CHECK(rate <= b.c_info_universal + 1e-12);
            CHECK(rate <= b.c_geo + 1e-12);
            CHECK(b.c_info_support <= b.c_info_universal + 1e-9);
        }
    }
}

TEST_CASE("stationary snapshot count") {
    const double q = -std::log(1e-3);
    const double y = snapshot_stationary_point(1e-3);
    CHECK(y == doctest::Approx(7.7941).epsilon(1e-4));
    CHECK(std::abs(y * y - q * y - q) < 1e-10 * y * y);

    for (double snr_db : {5.0, 15.0, 25.0}) {
        const SceneConfig scene = scene_at_db(snr_db);
        const double xi_h = hex_packing_constant(kUpa, scene);
        const double l_cont = optimal_snapshots_continuous(1e-3, kUpa, scene);
        CHECK(l_cont == doctest::Approx(1e-3 * y * std::exp(y) / xi_h).epsilon(1e-12));
        // Golden-section maximum of the continuous rate.
        double lo = 1e-3 * l_cont;
        double hi = 1e3 * l_cont;
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int k = 0; k < 200; ++k) {
            const double a = hi - phi * (hi - lo);
            const double b = lo + phi * (hi - lo);
            if (continuous_rate(a, xi_h, 1e-3) > continuous_rate(b, xi_h, 1e-3)) {
                hi = b;
            } else {
                lo = a;
            }
        }
        CHECK(0.5 * (lo + hi) == doctest::Approx(l_cont).epsilon(1e-6));
    }
}

TEST_CASE("integer snapshot count is the best in its window") {
    const SceneConfig scene = scene_at_db(20.0);
    const OptimalSnapshots o = optimal_snapshots(1e-3, kUpa, scene);
    REQUIRE(o.candidates.size() == o.candidate_rates.size());
    REQUIRE_FALSE(o.candidates.empty());
    double best = -1.0;
    for (std::size_t k = 0; k < o.candidates.size(); ++k) {
        best = std::max(best, o.candidate_rates[k]);
        CHECK(o.candidate_rates[k] == doctest::Approx(hex_rate_at(1e-3, kUpa, scene, o.candidates[k])));
    }
    CHECK(hex_rate_at(1e-3, kUpa, scene, o.l_integer) == best);
    CHECK(o.l_integer >= 1);
    CHECK(std::abs(o.l_nearest - o.l_continuous) < 1.0);
}
