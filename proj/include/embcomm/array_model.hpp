#pragma once

#include <complex>
#include <vector>

namespace embcomm {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

double db_to_linear(double db);
double linear_to_db(double linear);

// Uniform planar array in the yz-plane with half-wavelength spacing.
struct ArrayConfig {
    int m_y = 64;
    int m_z = 16;
    double wavelength = kSpeedOfLight / 7.0e9;

    static ArrayConfig from_carrier(int m_y, int m_z, double carrier_hz);

    int elements() const { return m_y * m_z; }
    double spacing() const { return 0.5 * wavelength; }

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

// Offset from the agent-plane center, meters.
struct Position {
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

struct Displacement {
    double dy = 0.0;
    double dz = 0.0;

    Displacement operator-() const { return {-dy, -dz}; }
    double norm() const;
};

inline Displacement operator-(const Position& a, const Position& b) {
    return {a.y - b.y, a.z - b.z};
}

inline Position operator+(const Position& p, const Displacement& d) {
    return {p.y + d.dy, p.z + d.dz};
}

// BS-to-agent geometry and per-snapshot sensing budget.
struct SceneConfig {
    double distance_d = 100.0;
    double extent_y = 2.0;
    double extent_z = 2.0;
    double snr_gamma0 = 10.0;
    double noise_var_sigma2 = 1.0;
    int snapshots_l = 5;
    double pulse_duration_tp = 1.0;
    // Largest admissible extent/(2D); enforces the small-angle regime.
    double far_field_ratio = 0.05;

    double echo_power() const { return snr_gamma0 * noise_var_sigma2; }

    /// Closed rectangle [-a_y/2, a_y/2] x [-a_z/2, a_z/2].
    bool contains(const Position& r) const;
    double diameter() const;

    SceneConfig with_snr(double gamma0) const;
    SceneConfig with_snapshots(int l) const;

    void validate() const;
};

/// gamma0 = rho^2 / sigma^2 with rho from the free-space radar link budget.
double snr_from_link_budget(double energy_tx, double illumination_gain, double wavelength,
                            double rcs, double distance, double noise_var);

struct Angles {
    double theta = 0.0;
    double phi = 0.0;
};

/// Small-angle map theta = y/D, phi = z/D. Throws DomainError for r outside the plane.
Angles position_to_angles(const Position& r, const SceneConfig& scene);

using SteeringVector = std::vector<std::complex<double>>;

/// Normalized UPA response a_y (x) a_z at position r; element (m, n) sits at
/// index m * m_z + n. Plane membership is not checked here.
SteeringVector steering_vector(const Position& r, const ArrayConfig& array, const SceneConfig& scene);

/// Squared normalized Dirichlet kernel |sum_k exp(j pi k dx / D)|^2 / m^2 for one axis.
double dirichlet_correlation(int m, double dx, double distance);

/// eta(delta) = eta_y(dy) * eta_z(dz), in [0, 1].
double steering_correlation_exact(const Displacement& delta, const ArrayConfig& array,
                                  const SceneConfig& scene);

} // namespace embcomm
