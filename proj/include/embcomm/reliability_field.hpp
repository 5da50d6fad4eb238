#pragma once

#include "embcomm/array_model.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace embcomm {

/// Single-snapshot Bhattacharyya distance between two positions with squared
/// steering correlation eta, in nats. Evaluated as log1p(kappa (1 - eta)).
double bhattacharyya_from_correlation(double eta, double gamma0);

/// kappa = gamma0^2 / (4 (1 + gamma0)).
double field_gain(double gamma0);

/// The eta = 0 ceiling log(1 + kappa); no displacement exceeds it.
double bhattacharyya_ceiling(double gamma0);

double bhattacharyya_exact(const Displacement& delta, const ArrayConfig& array, const SceneConfig& scene);

/// exp(-L B(delta)).
double pairwise_error_bound(const Displacement& delta, int snapshots, const ArrayConfig& array,
                            const SceneConfig& scene);

// Main-lobe quadratic model B(delta) ~ delta^T G_B delta with diagonal G_B.
struct QuadraticFieldParams {
    double kappa = 0.0;
    double alpha_y = 0.0; // 1/m^2
    double alpha_z = 0.0; // 1/m^2
    std::array<double, 2> g_b{};       // diagonal of G_B
    std::array<double, 2> transform{}; // diagonal of T = G_B^{1/2}
    std::vector<std::string> warnings;

    double alpha_max() const { return alpha_y > alpha_z ? alpha_y : alpha_z; }
};

QuadraticFieldParams quadratic_params(const ArrayConfig& array, const SceneConfig& scene);

double bhattacharyya_quadratic(const Displacement& delta, const QuadraticFieldParams& params);

// The quadratic surrogate is trusted where the correlation loss 1 - eta stays
// below 0.012 / (1 + kappa). Its relative error there stays under 1%: the
// Dirichlet expansion plus the dropped cross term contribute about
// 0.65 (1 - eta), and log1p(x) ~ x adds about kappa (1 - eta) / 2.
double quadratic_validity_loss(double kappa);

/// Largest exact B inside the validity region, log1p(kappa * max loss).
double quadratic_validity_limit(double gamma0);

bool within_quadratic_validity(const Displacement& delta, const ArrayConfig& array, const SceneConfig& scene);

namespace thresholds {

/// B_req = log(1/eps_p) / L.
double pairwise(double eps_p, int snapshots);

/// B_J = log((J - 1)/eps) / L, clamped at zero.
double codebook(double j, double eps, int snapshots);

/// B_nec = log(1 / (4 eps (1 - eps))) / (2 L).
double necessary(double eps, int snapshots);

} // namespace thresholds

/// True iff B(delta) < threshold.
bool forbidden_region_contains(const Displacement& delta, double threshold_b, const ArrayConfig& array,
                               const SceneConfig& scene);

struct RaySearchOptions {
    int rays = 720;
    double tol = 1e-5;        // bisection tolerance, meters
    int bracket_steps = 1024; // coarse samples per ray before bisection
};

struct RadiusSearchResult {
    double radius = 0.0;     // smallest crossing radius over rays (lower bracket end)
    bool bounded = true;     // false when no ray crosses within max_radius
    int unbounded_rays = 0;  // rays without a crossing inside max_radius
    double critical_angle = 0.0;
};

using FieldFunction = std::function<double(const Displacement&)>;

/// Min over directions psi in [0, pi) of the first radius where field >= threshold.
/// Every displacement shorter than the returned radius (along the sampled rays)
/// stays below the threshold. Rays run in parallel; the reduction is by ray index.
RadiusSearchResult min_crossing_radius(const FieldFunction& field, double threshold, double max_radius,
                                       const RaySearchOptions& options);

/// d_nec: radius of the largest origin-centered disk inside {B < B_nec(eps, L)},
/// searched out to the plane diameter.
RadiusSearchResult necessary_separation(double eps, int snapshots, const ArrayConfig& array,
                                        const SceneConfig& scene, const RaySearchOptions& options = {});

/// Main-lobe closed form sqrt(log(1/(4 eps (1-eps))) / (2 kappa L alpha_max)).
double necessary_separation_mainlobe(double eps, int snapshots, const QuadraticFieldParams& params);

/// Exact field bound to a fixed array and scene.
class ReliabilityField {
public:
    ReliabilityField(ArrayConfig array, SceneConfig scene);

    double exact(const Displacement& delta) const;
    double quadratic(const Displacement& delta) const;

    const ArrayConfig& array() const { return array_; }
    const SceneConfig& scene() const { return scene_; }
    const QuadraticFieldParams& params() const { return params_; }

private:
    ArrayConfig array_;
    SceneConfig scene_;
    QuadraticFieldParams params_;
};

} // namespace embcomm
