#pragma once

#include "embcomm/array_model.hpp"
#include "embcomm/reliability_field.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace embcomm {

// Lattice {offset + G k : k in Z^2}; columns of G are the generator vectors in meters.
struct LatticeGenerator {
    Eigen::Matrix2d g = Eigen::Matrix2d::Identity();

    static LatticeGenerator from_columns(double g1y, double g1z, double g2y, double g2z);
    static LatticeGenerator rectangular(double step_y, double step_z);

    double cell_area() const;
    /// Throws DomainError for a (numerically) rank-deficient generator.
    void validate() const;
};

/// All lattice points inside the closed plane, enumerated over an integer box
/// derived from the inverse generator at the plane corners plus one cell.
/// Order: first coordinate outer, second inner, both ascending.
std::vector<Position> truncate_lattice(const LatticeGenerator& gen, const SceneConfig& scene,
                                       const Position& offset = {});

/// a_y a_z / |det G|.
double lattice_count_estimate(const LatticeGenerator& gen, const SceneConfig& scene);

struct PairMinimum {
    double b = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
};

/// Minimum exact B over unordered pairs; rows run in parallel and ties keep the
/// lexicographically smallest (i, j). Returns +inf for fewer than two points.
PairMinimum min_pairwise(const std::vector<Position>& positions, const ReliabilityField& field);

class Codebook {
public:
    /// Throws DomainError if a position falls outside the plane.
    Codebook(std::vector<Position> positions, ReliabilityField field);

    const std::vector<Position>& positions() const { return positions_; }
    std::size_t size() const { return positions_.size(); }
    const Position& operator[](std::size_t i) const { return positions_[i]; }
    const ReliabilityField& field() const { return field_; }

    double min_pairwise_b() const { return minimum_.b; }
    const PairMinimum& closest_pair() const { return minimum_; }

    std::optional<double> verified_epsilon() const { return verified_epsilon_; }
    void set_verified_epsilon(std::optional<double> eps) { verified_epsilon_ = eps; }

    void push_back(const Position& p);
    void pop_back();

    Codebook subset(const std::vector<std::size_t>& indices) const;

private:
    void refresh();

    std::vector<Position> positions_;
    ReliabilityField field_;
    PairMinimum minimum_;
    std::optional<double> verified_epsilon_;
};

struct DesignReport {
    std::size_t j = 0;
    double rate_bits_per_pulse = 0.0;
    double rate_bits_per_second = 0.0;
    bool feasible = false;
    double slack_nats = 0.0; // B_min - B_J; +inf for J < 2
    double b_min = 0.0;
    double b_threshold = 0.0;
    double eps = 0.0;
    int snapshots = 0;
};

/// Checks B_min >= log((J - 1)/eps)/L with the exact field. On success the
/// codebook's verified_epsilon is set when passed mutable.
DesignReport verify_codebook(const Codebook& cb, double eps);
DesignReport verify_codebook(Codebook& cb, double eps);

/// Xi = pi^2 a_y a_z gamma0^2 sqrt((M_y^2 - 1)(M_z^2 - 1)) / (48 D^2 (1 + gamma0)).
double hex_design_constant(const ArrayConfig& array, const SceneConfig& scene);

/// Xi_h = 2 Xi / sqrt(3).
double hex_packing_constant(const ArrayConfig& array, const SceneConfig& scene);

/// Real root of J log(J/eps) = xi_h L via the principal Lambert-W branch.
double hex_size_continuous(double xi_h, int snapshots, double eps);

/// floor of hex_size_continuous.
long hex_size_lambert(double xi_h, int snapshots, double eps);

struct FixedPointSizing {
    double value = 0.0;
    long j = 0;
    int iterations = 0;
    bool converged = false;
};

/// Iterates J <- xi_h L / log(J/eps) from J = 2.
FixedPointSizing hex_size_fixed_point(double xi_h, int snapshots, double eps);

struct HexDesignOptions {
    double rotation = 0.0;   // radians, in the whitened plane
    Position offset{};       // lattice anchor relative to the plane center, meters
    double growth = 1.025;   // whitened spacing multiplier per backoff step
    int max_backoff_steps = 4000;
};

/// Hexagonal lattice with minimum whitened distance `spacing`, mapped back by T^-1.
LatticeGenerator hex_generator(double spacing, const QuadraticFieldParams& params, double rotation = 0.0);

struct HexagonalDesign {
    Codebook codebook;
    DesignReport report;
    double xi = 0.0;
    double xi_h = 0.0;
    double j_continuous = 0.0;
    long j_lambert = 0;
    FixedPointSizing fixed_point;
    bool sizing_agree = true;       // |j_lambert - fixed_point.j| <= 1
    bool sizing_consistent = true;  // j_lambert log(j_lambert/eps) <= xi_h L
    double initial_spacing = 0.0;   // whitened spacing from the closed-form size
    double whitened_spacing = 0.0;  // spacing of the emitted lattice
    double design_threshold = 0.0;  // whitened_spacing^2
    int backoff_steps = 0;
    std::vector<std::string> notes;
};

/// Main-lobe hexagonal design with exact re-verification. If the closed-form
/// size fails, the whitened spacing grows until the truncated codebook verifies
/// or only one codeword remains.
HexagonalDesign hexagonal_design(double eps, const ArrayConfig& array, const SceneConfig& scene,
                                 const HexDesignOptions& options = {});

/// Smallest nonzero |T (r_i - r_j)| over pairs; +inf for fewer than two points.
double whitened_min_distance(const std::vector<Position>& positions, const QuadraticFieldParams& params);

/// Threshold on B as a function of the codebook size after insertion.
using ThresholdFunction = std::function<double(std::size_t j)>;

/// Scans candidates in order and accepts those whose B to every accepted point
/// reaches threshold(accepted + 1).
std::vector<Position> greedy_pack(const std::vector<Position>& candidates, const ReliabilityField& field,
                                  const ThresholdFunction& threshold);

/// Row-major grid scan from the (-a_y/2, -a_z/2) corner, z rows outer.
std::vector<Position> candidate_grid(const SceneConfig& scene, double step);

/// Greedy baseline: for J = 2, 3, ... scans the grid with the fixed threshold
/// B_J and keeps the first J accepted points while at least J are placed.
/// The result is re-checked exactly at its final size; trailing points are
/// dropped until it verifies.
Codebook greedy_packing_baseline(double eps, const ArrayConfig& array, const SceneConfig& scene,
                                 double grid_step);

} // namespace embcomm
