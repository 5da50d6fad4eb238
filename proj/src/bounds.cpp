#include "embcomm/bounds.hpp"

#include "embcomm/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace embcomm {

namespace {

using Cd = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;

// Singular values below this fraction of the largest are treated as zero when
// extracting the span of the per-axis responses.
constexpr double kSpanTolerance = 1e-10;

// The covariance is updated in place along the search direction and rebuilt
// from the weights this often to stop drift.
constexpr int kRebuildInterval = 64;

void require_eps(double eps, const char* where) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError(std::string(where) + ": eps must lie in (0, 1)");
    }
}

// Columns are normalized 1-D responses (1/sqrt(m)) exp(j pi k x / D).
MatrixC axis_responses(int m, const std::vector<double>& xs, double distance) {
    MatrixC a(m, static_cast<Eigen::Index>(xs.size()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t c = 0; c < xs.size(); ++c) {
        for (int k = 0; k < m; ++k) {
            a(k, static_cast<Eigen::Index>(c)) = std::polar(scale, kPi * k * xs[c] / distance);
        }
    }
    return a;
}

// Coordinates of the responses in an orthonormal basis of their span.
MatrixC reduced_coordinates(const MatrixC& a) {
    Eigen::JacobiSVD<MatrixC> svd(a, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    const double floor = kSpanTolerance * (sv.size() > 0 ? sv[0] : 0.0);
    while (rank < sv.size() && sv[rank] > floor) {
        ++rank;
    }
    rank = std::max<Eigen::Index>(rank, 1);
    return svd.matrixU().leftCols(rank).adjoint() * a;
}

double log_det_pd(const MatrixC& a) {
    Eigen::LLT<MatrixC> llt(a);
    const auto& l = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        s += std::log(l(i, i).real());
    }
    return 2.0 * s;
}

// Maximizes the concave phi(t) = sum log1p(t lambda_i) on [0, t_max].
double line_search(const Eigen::VectorXd& lambda, double t_max, double* gain) {
    auto phi = [&](double t) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < lambda.size(); ++i) {
            const double v = 1.0 + t * lambda[i];
            if (!(v > 0.0)) {
                return -kInf;
            }
            s += std::log1p(t * lambda[i]);
        }
        return s;
    };
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0;
    double hi = t_max;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = phi(x1);
    double f2 = phi(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, t_max); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = phi(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = phi(x1);
        }
    }
    double best_t = 0.0;
    double best = 0.0;
    for (double t : {0.5 * (lo + hi), t_max}) {
        const double v = phi(t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    *gain = best;
    return best_t;
}

} // namespace

double binary_entropy(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw DomainError("binary_entropy: eps must lie in [0, 1]");
    }
    if (eps == 0.0 || eps == 1.0) {
        return 0.0;
    }
    return -eps * std::log2(eps) - (1.0 - eps) * std::log2(1.0 - eps);
}

double snapshot_capacity_universal(double gamma0, int elements) {
    if (elements < 1 || !(gamma0 >= 0.0)) {
        throw DomainError("snapshot_capacity_universal: need M >= 1 and gamma0 >= 0");
    }
    if (elements == 1) {
        return 0.0;
    }
    const double m = elements;
    return std::max(0.0, (m * std::log1p(gamma0 / m) - std::log1p(gamma0)) / kLn2);
}

double info_bound_from_snapshot(double c_snap_bits, double eps, const SceneConfig& scene) {
    require_eps(eps, "info bound");
    return (c_snap_bits + binary_entropy(eps) / scene.snapshots_l) / ((1.0 - eps) * scene.pulse_duration_tp);
}

double info_bound_universal(double eps, const ArrayConfig& array, const SceneConfig& scene) {
    return info_bound_from_snapshot(snapshot_capacity_universal(scene.snr_gamma0, array.elements()), eps, scene);
}

std::vector<double> plane_axis_grid(double extent, int n) {
    if (n < 1) {
        throw DomainError("plane_axis_grid: need at least one point");
    }
    if (n == 1) {
        return {0.0};
    }
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = -0.5 * extent + extent * i / (n - 1);
    }
    return g;
}

SupportSnapshotResult support_snapshot_capacity(double gamma0, const ArrayConfig& array, const SceneConfig& scene,
                                                const std::vector<double>& ys, const std::vector<double>& zs,
                                                const SupportBoundOptions& options) {
    if (ys.empty() || zs.empty()) {
        throw DomainError("support_snapshot_capacity: empty grid");
    }
    if (options.fw_iters < 0 || !(options.gap_tol > 0.0)) {
        throw DomainError("support_snapshot_capacity: fw_iters >= 0 and gap_tol > 0 required");
    }
    const MatrixC by = reduced_coordinates(axis_responses(array.m_y, ys, scene.distance_d));
    const MatrixC bz = reduced_coordinates(axis_responses(array.m_z, zs, scene.distance_d));
    const Eigen::Index ry = by.rows();
    const Eigen::Index rz = bz.rows();
    const Eigen::Index r = ry * rz;
    const Eigen::Index ny = by.cols();
    const Eigen::Index k_atoms = ny * bz.cols();

    // Atom k = iz * ny + iy is the reduced response at (ys[iy], zs[iz]).
    MatrixC atoms(r, k_atoms);
    for (Eigen::Index iz = 0; iz < bz.cols(); ++iz) {
        for (Eigen::Index iy = 0; iy < ny; ++iy) {
            const Eigen::Index k = iz * ny + iy;
            for (Eigen::Index p = 0; p < ry; ++p) {
                atoms.col(k).segment(p * rz, rz) = by(p, iy) * bz.col(iz);
            }
        }
    }

    SupportSnapshotResult out;
    out.reduced_dimension = static_cast<int>(r);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(k_atoms, 1.0 / static_cast<double>(k_atoms));
    const MatrixC id = MatrixC::Identity(r, r);

    auto covariance = [&](const Eigen::VectorXd& weights) -> MatrixC {
        MatrixC q = atoms * weights.cast<Cd>().asDiagonal() * atoms.adjoint();
        return 0.5 * (q + q.adjoint()).eval();
    };

    MatrixC q = covariance(w);
    double f = log_det_pd(id + gamma0 * q);
    out.trace.push_back(f);

    Eigen::VectorXd grad(k_atoms);
    const Eigen::Index nz = bz.cols();
    // Per-axis products by(p, i)^* by(p', i) for every (p, p') block pair.
    MatrixC y_pairs(ry * ry, ny);
    for (Eigen::Index p = 0; p < ry; ++p) {
        for (Eigen::Index pp = 0; pp < ry; ++pp) {
            y_pairs.row(p * ry + pp) = by.row(p).conjugate().cwiseProduct(by.row(pp));
        }
    }
    // g_k = gamma b_k^H A^-1 b_k, evaluated blockwise through b_k = by_i (x) bz_j.
    auto gradient = [&](const MatrixC& a_inv) {
        MatrixC z_forms(ry * ry, nz);
        for (Eigen::Index p = 0; p < ry; ++p) {
            for (Eigen::Index pp = 0; pp < ry; ++pp) {
                const MatrixC mb = a_inv.block(p * rz, pp * rz, rz, rz) * bz;
                z_forms.row(p * ry + pp) = bz.cwiseProduct(mb.conjugate()).colwise().sum().conjugate();
            }
        }
        // grad(iz * ny + iy) = sum_pp' y_pairs(pp', iy) z_forms(pp', iz)
        const MatrixC g = y_pairs.transpose() * z_forms; // ny x nz
        for (Eigen::Index iz = 0; iz < nz; ++iz) {
            for (Eigen::Index iy = 0; iy < ny; ++iy) {
                grad[iz * ny + iy] = gamma0 * g(iy, iz).real();
            }
        }
    };

    double gap = kInf;
    int it = 0;
    for (; it < options.fw_iters; ++it) {
        const MatrixC a = id + gamma0 * q;
        // With A = C C^H, C^-1 D C^-H is similar to A^{-1/2} D A^{-1/2}.
        Eigen::LLT<MatrixC> llt(a);
        const MatrixC c_inv = llt.matrixL().solve(id);
        gradient(c_inv.adjoint() * c_inv);

        Eigen::Index top = 0;
        for (Eigen::Index k = 1; k < k_atoms; ++k) {
            if (grad[k] > grad[top]) {
                top = k;
            }
        }
        Eigen::Index away = -1;
        for (Eigen::Index k = 0; k < k_atoms; ++k) {
            if (w[k] > 0.0 && (away < 0 || grad[k] < grad[away])) {
                away = k;
            }
        }
        const double wg = w.dot(grad);
        gap = grad[top] - wg;
        if (gap <= options.gap_tol) {
            out.converged = true;
            break;
        }
        const double away_gap = wg - grad[away];
        const bool toward = gap >= away_gap || w[away] >= 1.0;

        MatrixC dir;
        double t_max = 1.0;
        if (toward) {
            dir = atoms.col(top) * atoms.col(top).adjoint() - q;
        } else {
            dir = q - atoms.col(away) * atoms.col(away).adjoint();
            t_max = w[away] / (1.0 - w[away]);
        }

        // phi(t) = log det(A + t gamma D) - log det A = sum log1p(t lambda_i),
        // lambda = eig(C^-1 gamma D C^-H).
        MatrixC s = gamma0 * c_inv * dir * c_inv.adjoint();
        s = 0.5 * (s + s.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixC> eig_s(s, Eigen::EigenvaluesOnly);
        double gain = 0.0;
        const double t = line_search(eig_s.eigenvalues(), t_max, &gain);
        if (t <= 0.0) {
            out.warnings.push_back("line search made no progress");
            break;
        }
        if (toward) {
            w *= (1.0 - t);
            w[top] += t;
        } else {
            w *= (1.0 + t);
            w[away] = t == t_max ? 0.0 : w[away] - t;
        }
        w = w.cwiseMax(0.0);
        w /= w.sum();
        if ((it + 1) % kRebuildInterval == 0) {
            q = covariance(w);
        } else {
            q += t * dir;
            q = 0.5 * (q + q.adjoint()).eval();
        }
        f = log_det_pd(id + gamma0 * q);
        out.trace.push_back(f);
    }
    out.iterations = it;
    out.duality_gap = gap;
    if (!out.converged) {
        out.warnings.push_back("Frank-Wolfe stopped before the duality gap reached tolerance");
    }
    out.weights.assign(w.data(), w.data() + w.size());
    out.c_snap_bits = std::max(0.0, (f - std::log1p(gamma0)) / kLn2);
    return out;
}

SupportBoundResult info_bound_support(double eps, const ArrayConfig& array, const SceneConfig& scene,
                                      const SupportBoundOptions& options) {
    if (options.grid_n < 2) {
        throw DomainError("info_bound_support: grid_n must be >= 2");
    }
    SupportBoundResult out;
    out.snapshot = support_snapshot_capacity(scene.snr_gamma0, array, scene, plane_axis_grid(scene.extent_y, options.grid_n),
                                             plane_axis_grid(scene.extent_z, options.grid_n), options);
    out.bound = info_bound_from_snapshot(out.snapshot.c_snap_bits, eps, scene);
    return out;
}

double packing_count_bound(double d, double extent_y, double extent_z) {
    if (!(d > 0.0)) {
        throw DomainError("packing_count_bound: separation must be positive");
    }
    if (std::isinf(d)) {
        return 1.0;
    }
    const double disk = kPi * d * d / 4.0;
    return (extent_y * extent_z + (extent_y + extent_z) * d + disk) / disk;
}

GeoBoundResult geo_bound(double eps, const ArrayConfig& array, const SceneConfig& scene, const RaySearchOptions& rays) {
    const RadiusSearchResult sep = necessary_separation(eps, scene.snapshots_l, array, scene, rays);
    GeoBoundResult out;
    out.bounded = sep.bounded;
    if (!sep.bounded) {
        // Every displacement realizable in the plane is below B_nec, so no two
        // codewords can be told apart at this eps.
        out.d_nec = kInf;
        out.j_max = 1.0;
        out.bound = 0.0;
        out.diagnostic = "no displacement within the plane reaches B_nec; d_nec is unbounded";
        return out;
    }
    out.d_nec = sep.radius;
    if (!(sep.radius > 0.0)) {
        out.j_max = kInf;
        out.bound = kInf;
        out.diagnostic = "B_nec is met at zero displacement";
        return out;
    }
    if (sep.unbounded_rays > 0) {
        out.diagnostic = "some directions never reach B_nec within the plane";
    }
    out.j_max = packing_count_bound(sep.radius, scene.extent_y, scene.extent_z);
    out.bound = std::log2(out.j_max) / (scene.snapshots_l * scene.pulse_duration_tp);
    return out;
}

double mainlobe_curvature(const ArrayConfig& array, const SceneConfig& scene) {
    const double my = array.m_y;
    const double mz = array.m_z;
    const double m_max = std::max(my * my - 1.0, mz * mz - 1.0);
    const double g = scene.snr_gamma0;
    return kPi * kPi * g * g * m_max / (24.0 * scene.distance_d * scene.distance_d * (1.0 + g));
}

double geo_bound_mainlobe(double eps, const ArrayConfig& array, const SceneConfig& scene) {
    if (!(eps > 0.0 && eps < 0.5)) {
        throw DomainError("geo_bound_mainlobe: eps must lie in (0, 1/2)");
    }
    const double lg = std::log(1.0 / (4.0 * eps * (1.0 - eps)));
    const double x = mainlobe_curvature(array, scene) * scene.snapshots_l / lg;
    const double ay = scene.extent_y;
    const double az = scene.extent_z;
    const double j = 1.0 + 4.0 * (ay + az) / kPi * std::sqrt(x) + 4.0 * ay * az / kPi * x;
    return std::log2(j) / (scene.snapshots_l * scene.pulse_duration_tp);
}

double snapshot_stationary_point(double eps) {
    require_eps(eps, "snapshot_stationary_point");
    const double q = -std::log(eps);
    return 0.5 * (q + std::sqrt(q * q + 4.0 * q));
}

double optimal_snapshots_continuous(double eps, const ArrayConfig& array, const SceneConfig& scene) {
    const double xi_h = hex_packing_constant(array, scene);
    if (!(xi_h > 0.0)) {
        throw DomainError("optimal_snapshots: packing constant must be positive");
    }
    const double y = snapshot_stationary_point(eps);
    return eps / xi_h * y * std::exp(y);
}

double hex_rate_at(double eps, const ArrayConfig& array, const SceneConfig& scene, int snapshots,
                   const HexDesignOptions& options) {
    const HexagonalDesign d = hexagonal_design(eps, array, scene.with_snapshots(snapshots), options);
    return d.report.feasible ? d.report.rate_bits_per_pulse : 0.0;
}

OptimalSnapshots optimal_snapshots(double eps, const ArrayConfig& array, const SceneConfig& scene,
                                   const HexDesignOptions& options) {
    OptimalSnapshots out;
    out.q = -std::log(eps);
    out.y_star = snapshot_stationary_point(eps);
    out.l_continuous = optimal_snapshots_continuous(eps, array, scene);
    if (!(out.l_continuous < 1e6)) {
        throw DomainError("optimal_snapshots: continuous optimum exceeds 1e6 snapshots");
    }
    const int fl = static_cast<int>(std::floor(out.l_continuous));
    const int cl = static_cast<int>(std::ceil(out.l_continuous));
    const int lo = std::max(1, fl - 2);
    const int hi = std::max(lo, cl + 2);

    int best_l = lo;
    double best_rate = -1.0;
    double near_rate = -1.0;
    out.l_nearest = std::max(1, fl);
    for (int l = lo; l <= hi; ++l) {
        const double rate = hex_rate_at(eps, array, scene, l, options);
        out.candidates.push_back(l);
        out.candidate_rates.push_back(rate);
        if (rate > best_rate) {
            best_rate = rate;
            best_l = l;
        }
        if ((l == std::max(1, fl) || l == std::max(1, cl)) && rate > near_rate) {
            near_rate = rate;
            out.l_nearest = l;
        }
    }
    out.l_integer = best_l;
    return out;
}

BoundReport bound_report(double eps, const ArrayConfig& array, const SceneConfig& scene,
                         const BoundOptions& options) {
    BoundReport r;
    r.c_info_universal = info_bound_universal(eps, array, scene);
    if (options.with_support) {
        const SupportBoundResult s = info_bound_support(eps, array, scene, options.support);
        r.c_info_support = s.bound;
        r.warnings.insert(r.warnings.end(), s.snapshot.warnings.begin(), s.snapshot.warnings.end());
    } else {
        r.c_info_support = std::numeric_limits<double>::quiet_NaN();
    }
    const GeoBoundResult g = geo_bound(eps, array, scene, options.rays);
    r.c_geo = g.bound;
    r.d_nec_m = g.d_nec;
    if (!g.diagnostic.empty()) {
        r.warnings.push_back(g.diagnostic);
    }
    r.c_geo_mainlobe = geo_bound_mainlobe(eps, array, scene);
    if (options.with_l_star) {
        const OptimalSnapshots o = optimal_snapshots(eps, array, scene, options.design);
        r.l_star_continuous = o.l_continuous;
        r.l_star_integer = o.l_integer;
    }
    return r;
}

} // namespace embcomm
