#pragma once

#include "embcomm/array_model.hpp"
#include "embcomm/codebook.hpp"
#include "embcomm/reliability_field.hpp"

#include <string>
#include <vector>

namespace embcomm {

/// h2(eps) in bits; 0 at eps in {0, 1}.
double binary_entropy(double eps);

/// M log2(1 + gamma0/M) - log2(1 + gamma0), bits per snapshot.
double snapshot_capacity_universal(double gamma0, int elements);

/// (C_snap + h2(eps)/L) / ((1 - eps) T_p).
double info_bound_from_snapshot(double c_snap_bits, double eps, const SceneConfig& scene);

double info_bound_universal(double eps, const ArrayConfig& array, const SceneConfig& scene);

struct SupportBoundOptions {
    int grid_n = 41;
    int fw_iters = 5000;
    double gap_tol = 1e-6;
};

struct SupportSnapshotResult {
    double c_snap_bits = 0.0;     // sup over the grid of log2 det(I + gamma0 Q) - log2(1 + gamma0)
    double duality_gap = 0.0;     // nats, at the returned iterate
    int iterations = 0;
    bool converged = false;
    int reduced_dimension = 0;    // dimension of the span the atoms live in
    std::vector<double> trace;    // objective (nats) after each iteration, starting with the initial point
    std::vector<double> weights;  // over atoms, z index outer
    std::vector<std::string> warnings;
};

/// Frank-Wolfe with away steps over convex mixtures of the steering outer
/// products at the product grid ys x zs. Atoms are projected onto the exact
/// span of the per-axis responses before optimizing.
SupportSnapshotResult support_snapshot_capacity(double gamma0, const ArrayConfig& array, const SceneConfig& scene,
                                                const std::vector<double>& ys, const std::vector<double>& zs,
                                                const SupportBoundOptions& options = {});

/// grid_n evenly spaced values covering [-extent/2, extent/2].
std::vector<double> plane_axis_grid(double extent, int n);

struct SupportBoundResult {
    double bound = 0.0; // bits/s, grid-restricted
    SupportSnapshotResult snapshot;
};

SupportBoundResult info_bound_support(double eps, const ArrayConfig& array, const SceneConfig& scene,
                                      const SupportBoundOptions& options = {});

/// [a_y a_z + (a_y + a_z) d + pi d^2 / 4] / (pi d^2 / 4); 1 in the limit d -> inf.
double packing_count_bound(double d, double extent_y, double extent_z);

struct GeoBoundResult {
    double bound = 0.0; // bits/s
    double d_nec = 0.0; // +inf when no displacement in range reaches B_nec
    double j_max = 0.0;
    bool bounded = true;
    std::string diagnostic;
};

GeoBoundResult geo_bound(double eps, const ArrayConfig& array, const SceneConfig& scene,
                         const RaySearchOptions& rays = {});

/// pi^2 gamma0^2 M_max / (24 D^2 (1 + gamma0)) with M_max = max(M_y^2 - 1, M_z^2 - 1).
double mainlobe_curvature(const ArrayConfig& array, const SceneConfig& scene);

double geo_bound_mainlobe(double eps, const ArrayConfig& array, const SceneConfig& scene);

struct OptimalSnapshots {
    double q = 0.0;
    double y_star = 0.0;
    double l_continuous = 0.0;
    int l_nearest = 1;  // better of floor/ceil of l_continuous under the exact design rate
    int l_integer = 1;  // best in the window [floor - 2, ceil + 2]
    std::vector<int> candidates;
    std::vector<double> candidate_rates; // bits per pulse
};

/// q = -ln eps, y* = (q + sqrt(q^2 + 4q)) / 2.
double snapshot_stationary_point(double eps);

/// L_cont = (eps / xi_h) y* e^{y*}.
double optimal_snapshots_continuous(double eps, const ArrayConfig& array, const SceneConfig& scene);

/// Exact hexagonal-design rate in bits per pulse at L snapshots.
double hex_rate_at(double eps, const ArrayConfig& array, const SceneConfig& scene, int snapshots,
                   const HexDesignOptions& options = {});

OptimalSnapshots optimal_snapshots(double eps, const ArrayConfig& array, const SceneConfig& scene,
                                   const HexDesignOptions& options = {});

struct BoundReport {
    double c_info_universal = 0.0;
    double c_info_support = 0.0; // grid-restricted
    double c_geo = 0.0;
    double c_geo_mainlobe = 0.0;
    double d_nec_m = 0.0;
    double l_star_continuous = 0.0;
    int l_star_integer = 1;
    std::vector<std::string> warnings;
};

struct BoundOptions {
    SupportBoundOptions support{};
    RaySearchOptions rays{};
    HexDesignOptions design{};
    bool with_support = true;
    bool with_l_star = true;
};

BoundReport bound_report(double eps, const ArrayConfig& array, const SceneConfig& scene,
                         const BoundOptions& options = {});

} // namespace embcomm
