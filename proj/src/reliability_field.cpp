#include "embcomm/reliability_field.hpp"

#include "embcomm/errors.hpp"
#include "embcomm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace embcomm {

namespace {

constexpr double kValidityLossScale = 0.012;

double correlation_loss(const Displacement& delta, const ArrayConfig& array, const SceneConfig& scene) {
    const double ey = dirichlet_correlation(array.m_y, delta.dy, scene.distance_d);
    const double ez = dirichlet_correlation(array.m_z, delta.dz, scene.distance_d);
    // (1 - ey) + ey (1 - ez) keeps the small-loss digits of each axis.
    return (1.0 - ey) + ey * (1.0 - ez);
}

void require_probability(double eps, const char* where) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError(std::string(where) + ": eps must lie in (0, 1)");
    }
}

} // namespace

double field_gain(double gamma0) { return gamma0 * gamma0 / (4.0 * (1.0 + gamma0)); }

double bhattacharyya_ceiling(double gamma0) { return std::log1p(field_gain(gamma0)); }

double bhattacharyya_from_correlation(double eta, double gamma0) {
    // ((1 + g/2)^2 - g^2 eta / 4) / (1 + g) = 1 + kappa (1 - eta)
    return std::log1p(field_gain(gamma0) * (1.0 - eta));
}

double bhattacharyya_exact(const Displacement& delta, const ArrayConfig& array, const SceneConfig& scene) {
    return std::log1p(field_gain(scene.snr_gamma0) * correlation_loss(delta, array, scene));
}

double pairwise_error_bound(const Displacement& delta, int snapshots, const ArrayConfig& array,
                            const SceneConfig& scene) {
    if (snapshots < 1) {
        throw DomainError("pairwise_error_bound: snapshots must be >= 1");
    }
    return std::exp(-snapshots * bhattacharyya_exact(delta, array, scene));
}

QuadraticFieldParams quadratic_params(const ArrayConfig& array, const SceneConfig& scene) {
    QuadraticFieldParams p;
    const double d2 = scene.distance_d * scene.distance_d;
    const double my = array.m_y;
    const double mz = array.m_z;
    p.kappa = field_gain(scene.snr_gamma0);
    p.alpha_y = kPi * kPi * (my * my - 1.0) / (12.0 * d2);
    p.alpha_z = kPi * kPi * (mz * mz - 1.0) / (12.0 * d2);
    p.g_b = {p.kappa * p.alpha_y, p.kappa * p.alpha_z};
    p.transform = {std::sqrt(p.g_b[0]), std::sqrt(p.g_b[1])};
    if (array.m_y < 2) {
        p.warnings.emplace_back("m_y < 2: zero curvature along y, forbidden region unbounded along y");
    }
    if (array.m_z < 2) {
        p.warnings.emplace_back("m_z < 2: zero curvature along z, forbidden region unbounded along z");
    }
    return p;
}

double bhattacharyya_quadratic(const Displacement& delta, const QuadraticFieldParams& params) {
    return params.g_b[0] * delta.dy * delta.dy + params.g_b[1] * delta.dz * delta.dz;
}

double quadratic_validity_loss(double kappa) { return kValidityLossScale / (1.0 + kappa); }

double quadratic_validity_limit(double gamma0) {
    const double kappa = field_gain(gamma0);
    return std::log1p(kappa * quadratic_validity_loss(kappa));
}

bool within_quadratic_validity(const Displacement& delta, const ArrayConfig& array, const SceneConfig& scene) {
    return correlation_loss(delta, array, scene) <= quadratic_validity_loss(field_gain(scene.snr_gamma0));
}

namespace thresholds {

double pairwise(double eps_p, int snapshots) {
    require_probability(eps_p, "thresholds::pairwise");
    return std::log(1.0 / eps_p) / snapshots;
}

double codebook(double j, double eps, int snapshots) {
    require_probability(eps, "thresholds::codebook");
    if (j < 2.0) {
        return 0.0;
    }
    return std::max(0.0, std::log((j - 1.0) / eps) / snapshots);
}

double necessary(double eps, int snapshots) {
    require_probability(eps, "thresholds::necessary");
    return std::log(1.0 / (4.0 * eps * (1.0 - eps))) / (2.0 * snapshots);
}

} // namespace thresholds

bool forbidden_region_contains(const Displacement& delta, double threshold_b, const ArrayConfig& array,
                               const SceneConfig& scene) {
    return bhattacharyya_exact(delta, array, scene) < threshold_b;
}

RadiusSearchResult min_crossing_radius(const FieldFunction& field, double threshold, double max_radius,
                                       const RaySearchOptions& options) {
    if (options.rays < 1 || options.bracket_steps < 1 || !(options.tol > 0.0)) {
        throw DomainError("min_crossing_radius: rays, bracket_steps and tol must be positive");
    }
    if (!(max_radius > 0.0)) {
        throw DomainError("min_crossing_radius: max_radius must be positive");
    }
    RadiusSearchResult result;
    if (field(Displacement{}) >= threshold) {
        result.radius = 0.0;
        return result;
    }

    constexpr double kNoCrossing = std::numeric_limits<double>::infinity();
    const auto rays = static_cast<std::size_t>(options.rays);
    std::vector<double> radius(rays, kNoCrossing);
    const double step = max_radius / options.bracket_steps;

    parallel_for(rays, [&](std::size_t k) {
        const double psi = kPi * static_cast<double>(k) / static_cast<double>(rays);
        const double cy = std::cos(psi);
        const double cz = std::sin(psi);
        auto at = [&](double d) { return field(Displacement{d * cy, d * cz}); };

        double lo = 0.0;
        double hi = -1.0;
        for (int i = 1; i <= options.bracket_steps; ++i) {
            const double d = i * step;
            if (at(d) >= threshold) {
                hi = d;
                break;
            }
            lo = d;
        }
        if (hi < 0.0) {
            return;
        }
        while (hi - lo > options.tol) {
            const double mid = 0.5 * (lo + hi);
            if (at(mid) >= threshold) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        radius[k] = lo;
    });

    result.radius = kNoCrossing;
    for (std::size_t k = 0; k < rays; ++k) {
        if (radius[k] == kNoCrossing) {
            ++result.unbounded_rays;
        } else if (radius[k] < result.radius) {
            result.radius = radius[k];
            result.critical_angle = kPi * static_cast<double>(k) / static_cast<double>(rays);
        }
    }
    result.bounded = result.unbounded_rays < options.rays;
    return result;
}

RadiusSearchResult necessary_separation(double eps, int snapshots, const ArrayConfig& array,
                                        const SceneConfig& scene, const RaySearchOptions& options) {
    if (!(eps > 0.0 && eps < 0.5)) {
        throw DomainError("necessary_separation: eps must lie in (0, 1/2)");
    }
    const double threshold = thresholds::necessary(eps, snapshots);
    return min_crossing_radius([&](const Displacement& d) { return bhattacharyya_exact(d, array, scene); },
                               threshold, scene.diameter(), options);
}

double necessary_separation_mainlobe(double eps, int snapshots, const QuadraticFieldParams& params) {
    if (!(eps > 0.0 && eps < 0.5)) {
        throw DomainError("necessary_separation_mainlobe: eps must lie in (0, 1/2)");
    }
    const double log_term = std::log(1.0 / (4.0 * eps * (1.0 - eps)));
    return std::sqrt(log_term / (2.0 * params.kappa * snapshots * params.alpha_max()));
}

ReliabilityField::ReliabilityField(ArrayConfig array, SceneConfig scene)
    : array_(array), scene_(scene), params_(quadratic_params(array_, scene_)) {}

double ReliabilityField::exact(const Displacement& delta) const { return bhattacharyya_exact(delta, array_, scene_); }

double ReliabilityField::quadratic(const Displacement& delta) const {
    return bhattacharyya_quadratic(delta, params_);
}

} // namespace embcomm
