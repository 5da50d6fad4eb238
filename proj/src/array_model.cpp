#include "embcomm/array_model.hpp"

#include "embcomm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace embcomm {

namespace {

// Relative slack on the plane boundary so that lattice points computed in
// floating point on the closed edge are retained.
constexpr double kBoundarySlack = 1e-12;

// Below this |sin| the Dirichlet ratio is replaced by its series limit.
constexpr double kSingularSin = 1e-9;

void require(bool ok, const char* key, const std::string& message) {
    if (!ok) {
        throw ConfigError(key, message);
    }
}

} // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

ArrayConfig ArrayConfig::from_carrier(int m_y, int m_z, double carrier_hz) {
    if (!(carrier_hz > 0.0)) {
        throw ConfigError("array.carrier_hz", "must be positive");
    }
    return ArrayConfig{m_y, m_z, kSpeedOfLight / carrier_hz};
}

void ArrayConfig::validate() const {
    require(m_y >= 1, "array.m_y", "must be >= 1");
    require(m_z >= 1, "array.m_z", "must be >= 1");
    require(std::isfinite(wavelength) && wavelength > 0.0, "array.wavelength", "must be positive");
}

double Displacement::norm() const { return std::hypot(dy, dz); }

bool SceneConfig::contains(const Position& r) const {
    const double hy = 0.5 * extent_y * (1.0 + kBoundarySlack);
    const double hz = 0.5 * extent_z * (1.0 + kBoundarySlack);
    return std::abs(r.y) <= hy && std::abs(r.z) <= hz;
}

double SceneConfig::diameter() const { return std::hypot(extent_y, extent_z); }

SceneConfig SceneConfig::with_snr(double gamma0) const {
    SceneConfig s = *this;
    s.snr_gamma0 = gamma0;
    return s;
}

SceneConfig SceneConfig::with_snapshots(int l) const {
    SceneConfig s = *this;
    s.snapshots_l = l;
    return s;
}

void SceneConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    require(positive(distance_d), "scene.distance_d", "must be positive");
    require(positive(extent_y), "scene.extent_y", "must be positive");
    require(positive(extent_z), "scene.extent_z", "must be positive");
    require(positive(snr_gamma0), "scene.snr_gamma0", "must be positive");
    require(positive(noise_var_sigma2), "scene.noise_var_sigma2", "must be positive");
    require(snapshots_l >= 1, "scene.snapshots_l", "must be >= 1");
    require(positive(pulse_duration_tp), "scene.pulse_duration_tp", "must be positive");
    require(positive(far_field_ratio), "scene.far_field_ratio", "must be positive");
    require(extent_y / (2.0 * distance_d) <= far_field_ratio, "scene.extent_y",
            "violates the far-field ratio extent/(2D) <= far_field_ratio");
    require(extent_z / (2.0 * distance_d) <= far_field_ratio, "scene.extent_z",
            "violates the far-field ratio extent/(2D) <= far_field_ratio");
}

double snr_from_link_budget(double energy_tx, double illumination_gain, double wavelength,
                            double rcs, double distance, double noise_var) {
    if (!(energy_tx > 0 && illumination_gain > 0 && wavelength > 0 && rcs > 0 && distance > 0 &&
          noise_var > 0)) {
        throw DomainError("snr_from_link_budget: all link-budget terms must be positive");
    }
    const double rho = std::sqrt(energy_tx * illumination_gain) * wavelength * std::sqrt(rcs) /
                       (std::pow(4.0 * kPi, 1.5) * distance * distance);
    return rho * rho / noise_var;
}

Angles position_to_angles(const Position& r, const SceneConfig& scene) {
    if (!scene.contains(r)) {
        throw DomainError("position_to_angles: position outside the agent plane");
    }
    return {r.y / scene.distance_d, r.z / scene.distance_d};
}

SteeringVector steering_vector(const Position& r, const ArrayConfig& array, const SceneConfig& scene) {
    const int my = array.m_y;
    const int mz = array.m_z;
    const double u = r.y / scene.distance_d;
    const double v = r.z / scene.distance_d;
    const double scale = 1.0 / std::sqrt(static_cast<double>(my) * mz);

    SteeringVector a(static_cast<std::size_t>(my) * mz);
    for (int m = 0; m < my; ++m) {
        for (int n = 0; n < mz; ++n) {
            const double phase = kPi * (m * u + n * v);
            a[static_cast<std::size_t>(m) * mz + n] = std::polar(scale, phase);
        }
    }
    return a;
}

double dirichlet_correlation(int m, double dx, double distance) {
    if (m == 1) {
        return 1.0;
    }
    // Reduce to the nearest multiple of pi; the squared kernel has period pi in x.
    const double x = kPi * dx / (2.0 * distance);
    const double t = x - kPi * std::nearbyint(x / kPi);
    const double s = std::sin(t);
    if (std::abs(s) < kSingularSin) {
        const double md = static_cast<double>(m);
        return std::max(0.0, 1.0 - (md * md - 1.0) * t * t / 3.0);
    }
    const double ratio = std::sin(m * t) / (m * s);
    return std::min(1.0, ratio * ratio);
}

double steering_correlation_exact(const Displacement& delta, const ArrayConfig& array,
                                  const SceneConfig& scene) {
    return dirichlet_correlation(array.m_y, delta.dy, scene.distance_d) *
           dirichlet_correlation(array.m_z, delta.dz, scene.distance_d);
}

} // namespace embcomm
