#include "embcomm/codebook.hpp"

#include "embcomm/errors.hpp"
#include "embcomm/lambert_w.hpp"
#include "embcomm/parallel.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace embcomm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative determinant floor for treating a generator as rank deficient.
constexpr double kRankTolerance = 1e-12;

double rate_bits(std::size_t j, int snapshots) {
    return j < 2 ? 0.0 : std::log2(static_cast<double>(j)) / snapshots;
}

} // namespace

LatticeGenerator LatticeGenerator::from_columns(double g1y, double g1z, double g2y, double g2z) {
    LatticeGenerator gen;
    gen.g << g1y, g2y, g1z, g2z;
    return gen;
}

LatticeGenerator LatticeGenerator::rectangular(double step_y, double step_z) {
    return from_columns(step_y, 0.0, 0.0, step_z);
}

double LatticeGenerator::cell_area() const { return std::abs(g.determinant()); }

void LatticeGenerator::validate() const {
    if (!g.allFinite()) {
        throw DomainError("lattice generator has non-finite entries");
    }
    const double scale = g.col(0).norm() * g.col(1).norm();
    if (!(scale > 0.0) || cell_area() <= kRankTolerance * scale) {
        throw DomainError("lattice generator is rank deficient");
    }
}

std::vector<Position> truncate_lattice(const LatticeGenerator& gen, const SceneConfig& scene,
                                       const Position& offset) {
    gen.validate();
    const Eigen::Matrix2d inv = gen.g.inverse();
    const double hy = 0.5 * scene.extent_y;
    const double hz = 0.5 * scene.extent_z;

    double lo[2] = {kInf, kInf};
    double hi[2] = {-kInf, -kInf};
    for (double cy : {-hy, hy}) {
        for (double cz : {-hz, hz}) {
            const Eigen::Vector2d k = inv * Eigen::Vector2d(cy - offset.y, cz - offset.z);
            for (int a = 0; a < 2; ++a) {
                lo[a] = std::min(lo[a], k[a]);
                hi[a] = std::max(hi[a], k[a]);
            }
        }
    }
    const long k1_lo = static_cast<long>(std::floor(lo[0])) - 1;
    const long k1_hi = static_cast<long>(std::ceil(hi[0])) + 1;
    const long k2_lo = static_cast<long>(std::floor(lo[1])) - 1;
    const long k2_hi = static_cast<long>(std::ceil(hi[1])) + 1;

    std::vector<Position> points;
    for (long k1 = k1_lo; k1 <= k1_hi; ++k1) {
        for (long k2 = k2_lo; k2 <= k2_hi; ++k2) {
            const Eigen::Vector2d p = gen.g * Eigen::Vector2d(static_cast<double>(k1), static_cast<double>(k2));
            const Position r{offset.y + p[0], offset.z + p[1]};
            if (scene.contains(r)) {
                points.push_back(r);
            }
        }
    }
    return points;
}

double lattice_count_estimate(const LatticeGenerator& gen, const SceneConfig& scene) {
    return scene.extent_y * scene.extent_z / gen.cell_area();
}

PairMinimum min_pairwise(const std::vector<Position>& positions, const ReliabilityField& field) {
    PairMinimum best{kInf, 0, 0};
    const std::size_t n = positions.size();
    if (n < 2) {
        return best;
    }
    std::vector<PairMinimum> rows(n - 1, PairMinimum{kInf, 0, 0});
    parallel_for(n - 1, [&](std::size_t i) {
        PairMinimum row{kInf, i, i + 1};
        for (std::size_t j = i + 1; j < n; ++j) {
            const double b = field.exact(positions[j] - positions[i]);
            if (b < row.b) {
                row = PairMinimum{b, i, j};
            }
        }
        rows[i] = row;
    });
    best = rows[0];
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].b < best.b) {
            best = rows[i];
        }
    }
    return best;
}

Codebook::Codebook(std::vector<Position> positions, ReliabilityField field)
    : positions_(std::move(positions)), field_(std::move(field)) {
    for (const auto& p : positions_) {
        if (!field_.scene().contains(p)) {
            throw DomainError("codebook position outside the agent plane");
        }
    }
    refresh();
}

void Codebook::refresh() {
    minimum_ = min_pairwise(positions_, field_);
    verified_epsilon_.reset();
}

void Codebook::push_back(const Position& p) {
    if (!field_.scene().contains(p)) {
        throw DomainError("codebook position outside the agent plane");
    }
    positions_.push_back(p);
    refresh();
}

void Codebook::pop_back() {
    if (!positions_.empty()) {
        positions_.pop_back();
        refresh();
    }
}

Codebook Codebook::subset(const std::vector<std::size_t>& indices) const {
    std::vector<Position> pts;
    pts.reserve(indices.size());
    for (std::size_t i : indices) {
        pts.push_back(positions_.at(i));
    }
    return Codebook(std::move(pts), field_);
}

DesignReport verify_codebook(const Codebook& cb, double eps) {
    const SceneConfig& scene = cb.field().scene();
    DesignReport r;
    r.eps = eps;
    r.snapshots = scene.snapshots_l;
    r.j = cb.size();
    r.b_threshold = thresholds::codebook(static_cast<double>(r.j), eps, scene.snapshots_l);
    if (r.j < 2) {
        r.feasible = true;
        r.b_min = kInf;
        r.slack_nats = kInf;
        return r;
    }
    r.b_min = cb.min_pairwise_b();
    r.slack_nats = r.b_min - r.b_threshold;
    r.feasible = r.slack_nats >= 0.0;
    r.rate_bits_per_pulse = rate_bits(r.j, scene.snapshots_l);
    r.rate_bits_per_second = r.rate_bits_per_pulse / scene.pulse_duration_tp;
    return r;
}

DesignReport verify_codebook(Codebook& cb, double eps) {
    const DesignReport r = verify_codebook(static_cast<const Codebook&>(cb), eps);
    cb.set_verified_epsilon(r.feasible ? std::optional<double>(eps) : std::nullopt);
    return r;
}

double hex_design_constant(const ArrayConfig& array, const SceneConfig& scene) {
    const double g = scene.snr_gamma0;
    const double my = array.m_y;
    const double mz = array.m_z;
    const double d2 = scene.distance_d * scene.distance_d;
    return kPi * kPi * scene.extent_y * scene.extent_z * g * g * std::sqrt((my * my - 1.0) * (mz * mz - 1.0)) /
           (48.0 * d2 * (1.0 + g));
}

double hex_packing_constant(const ArrayConfig& array, const SceneConfig& scene) {
    return 2.0 * hex_design_constant(array, scene) / std::sqrt(3.0);
}

double hex_size_continuous(double xi_h, int snapshots, double eps) {
    if (!(eps > 0.0 && eps < 1.0) || snapshots < 1 || !(xi_h >= 0.0)) {
        throw DomainError("hex_size_continuous: need xi_h >= 0, L >= 1, eps in (0, 1)");
    }
    // With u = log(J/eps): u e^u = xi_h L / eps and J = xi_h L / u.
    const double c = xi_h * snapshots;
    if (c == 0.0) {
        return 0.0;
    }
    return c / lambert_w0(c / eps);
}

long hex_size_lambert(double xi_h, int snapshots, double eps) {
    return static_cast<long>(std::floor(hex_size_continuous(xi_h, snapshots, eps)));
}

FixedPointSizing hex_size_fixed_point(double xi_h, int snapshots, double eps) {
    if (!(eps > 0.0 && eps < 1.0) || snapshots < 1 || !(xi_h >= 0.0)) {
        throw DomainError("hex_size_fixed_point: need xi_h >= 0, L >= 1, eps in (0, 1)");
    }
    const double c = xi_h * snapshots;
    FixedPointSizing out;
    double j = 2.0;
    for (int it = 1; it <= 500; ++it) {
        const double next = c / std::log(j / eps);
        out.iterations = it;
        const bool done = std::abs(next - j) <= 1e-12 * std::max(1.0, j);
        j = next;
        if (done) {
            out.converged = true;
            break;
        }
        if (!(j > eps)) {
            // Below eps the map leaves its domain; the root is then below 1.
            j = 0.0;
            out.converged = true;
            break;
        }
    }
    out.value = j;
    out.j = static_cast<long>(std::floor(j));
    return out;
}

LatticeGenerator hex_generator(double spacing, const QuadraticFieldParams& params, double rotation) {
    if (!(params.transform[0] > 0.0 && params.transform[1] > 0.0)) {
        throw DomainError("hex_generator: whitening transform is singular (need m_y, m_z >= 2)");
    }
    Eigen::Matrix2d basis;
    basis << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
    Eigen::Matrix2d rot;
    rot << std::cos(rotation), -std::sin(rotation), std::sin(rotation), std::cos(rotation);
    const Eigen::Matrix2d t_inv =
        Eigen::Vector2d(1.0 / params.transform[0], 1.0 / params.transform[1]).asDiagonal();
    LatticeGenerator gen;
    gen.g = t_inv * (spacing * rot * basis);
    return gen;
}

double whitened_min_distance(const std::vector<Position>& positions, const QuadraticFieldParams& params) {
    double best = kInf;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            const Displacement d = positions[j] - positions[i];
            best = std::min(best, std::hypot(params.transform[0] * d.dy, params.transform[1] * d.dz));
        }
    }
    return best;
}

HexagonalDesign hexagonal_design(double eps, const ArrayConfig& array, const SceneConfig& scene,
                                 const HexDesignOptions& options) {
    if (array.m_y < 2 || array.m_z < 2) {
        throw DomainError("hexagonal_design: needs m_y, m_z >= 2");
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("hexagonal_design: eps must lie in (0, 1)");
    }
    if (!(options.growth > 1.0)) {
        throw DomainError("hexagonal_design: growth must exceed 1");
    }
    ReliabilityField field(array, scene);
    const int l = scene.snapshots_l;

    const double xi = hex_design_constant(array, scene);
    const double xi_h = 2.0 * xi / std::sqrt(3.0);
    const double j_cont = hex_size_continuous(xi_h, l, eps);
    const long j_lw = static_cast<long>(std::floor(j_cont));
    const FixedPointSizing fp = hex_size_fixed_point(xi_h, l, eps);

    std::vector<std::string> notes;
    const bool agree = std::abs(j_lw - fp.j) <= 1;
    if (!agree) {
        notes.push_back("closed-form and fixed-point sizes differ by more than one codeword");
    }
    const bool consistent =
        j_lw < 1 || static_cast<double>(j_lw) * std::log(static_cast<double>(j_lw) / eps) <= xi_h * l * (1.0 + 1e-12);

    const double s0 = std::sqrt(std::log(static_cast<double>(std::max(j_lw, 2L)) / eps) / l);
    double s = s0;
    int steps = 0;
    std::vector<Position> points;
    while (true) {
        points = truncate_lattice(hex_generator(s, field.params(), options.rotation), scene, options.offset);
        if (points.size() <= 1) {
            break;
        }
        const PairMinimum pm = min_pairwise(points, field);
        if (pm.b >= thresholds::codebook(static_cast<double>(points.size()), eps, l)) {
            break;
        }
        if (steps >= options.max_backoff_steps) {
            notes.push_back("backoff limit reached; falling back to a single codeword");
            points.clear();
            break;
        }
        s *= options.growth;
        ++steps;
    }
    if (points.empty()) {
        points.push_back(scene.contains(options.offset) ? options.offset : Position{});
    }
    if (points.size() == 1 && j_lw >= 2) {
        notes.push_back("no codebook with J >= 2 verified; single codeword emitted");
    }
    if (steps > 0) {
        notes.push_back("whitened spacing enlarged to pass exact verification");
    }

    Codebook cb(std::move(points), field);
    const DesignReport report = verify_codebook(cb, eps);
    return HexagonalDesign{std::move(cb), report, xi, xi_h, j_cont, j_lw, fp, agree, consistent,
                           s0, s, s * s, steps, std::move(notes)};
}

std::vector<Position> greedy_pack(const std::vector<Position>& candidates, const ReliabilityField& field,
                                  const ThresholdFunction& threshold) {
    std::vector<Position> accepted;
    for (const auto& c : candidates) {
        const double need = threshold(accepted.size() + 1);
        bool ok = true;
        for (const auto& a : accepted) {
            if (field.exact(c - a) < need) {
                ok = false;
                break;
            }
        }
        if (ok) {
            accepted.push_back(c);
        }
    }
    return accepted;
}

std::vector<Position> candidate_grid(const SceneConfig& scene, double step) {
    if (!(step > 0.0)) {
        throw DomainError("candidate_grid: step must be positive");
    }
    const long ny = static_cast<long>(std::floor(scene.extent_y / step * (1.0 + 1e-12))) + 1;
    const long nz = static_cast<long>(std::floor(scene.extent_z / step * (1.0 + 1e-12))) + 1;
    std::vector<Position> grid;
    grid.reserve(static_cast<std::size_t>(ny * nz));
    for (long iz = 0; iz < nz; ++iz) {
        for (long iy = 0; iy < ny; ++iy) {
            const Position p{-0.5 * scene.extent_y + iy * step, -0.5 * scene.extent_z + iz * step};
            if (scene.contains(p)) {
                grid.push_back(p);
            }
        }
    }
    return grid;
}

Codebook greedy_packing_baseline(double eps, const ArrayConfig& array, const SceneConfig& scene,
                                 double grid_step) {
    ReliabilityField field(array, scene);
    const int l = scene.snapshots_l;
    const std::vector<Position> grid = candidate_grid(scene, grid_step);

    // Raise the target size while a fixed-threshold scan still places that
    // many points; a scan whose threshold tracked the running count would
    // lock in early pairs that only clear B_2.
    std::vector<Position> best;
    if (!grid.empty()) {
        best.push_back(grid.front());
    }
    for (std::size_t target = 2; target <= grid.size(); ++target) {
        const double need = thresholds::codebook(static_cast<double>(target), eps, l);
        auto pts = greedy_pack(grid, field, [need](std::size_t) { return need; });
        if (pts.size() < target) {
            break;
        }
        pts.resize(target);
        best = std::move(pts);
    }

    Codebook cb(std::move(best), field);
    while (cb.size() >= 2 && !verify_codebook(cb, eps).feasible) {
        cb.pop_back();
    }
    verify_codebook(cb, eps);
    return cb;
}

} // namespace embcomm
