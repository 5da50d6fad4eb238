#include "embcomm/sweep.hpp"

#include "embcomm/errors.hpp"

#include <limits>

namespace embcomm {

std::vector<RateSweepRow> rate_sweep(double eps, const SceneConfig& scene_template, const ArrayConfig& array,
                                     const std::vector<double>& snr_list, const std::vector<int>& l_list,
                                     const RateSweepOptions& options) {
    if (snr_list.empty() || l_list.empty()) {
        throw DomainError("rate_sweep: sweep lists must be non-empty");
    }
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    const bool with_support = options.bounds.with_support;
    std::vector<RateSweepRow> rows;
    rows.reserve(snr_list.size() * l_list.size());
    for (double gamma0 : snr_list) {
        const SceneConfig at_snr = scene_template.with_snr(gamma0);
        const std::size_t first = rows.size();
        for (int l : l_list) {
            const SceneConfig scene = at_snr.with_snapshots(l);
            const HexagonalDesign design = hexagonal_design(eps, array, scene, options.bounds.design);
            const GeoBoundResult geo = geo_bound(eps, array, scene, options.bounds.rays);

            RateSweepRow row;
            row.gamma0 = gamma0;
            row.snapshots = l;
            row.j_hex = design.report.j;
            row.feasible = design.report.feasible;
            row.rate_bits_per_pulse = row.feasible ? design.report.rate_bits_per_pulse : 0.0;
            row.rate_bits_per_second = row.feasible ? design.report.rate_bits_per_second : 0.0;
            row.c_info_universal = info_bound_universal(eps, array, scene);
            row.c_info_support = kNaN;
            row.c_geo = geo.bound;
            row.c_geo_mainlobe = geo_bound_mainlobe(eps, array, scene);
            row.d_nec = geo.d_nec;
            row.sandwich_ok = row.rate_bits_per_second <= row.c_info_universal && row.rate_bits_per_second <= row.c_geo;
            rows.push_back(row);
        }
        if (!with_support) {
            continue;
        }

        SupportBoundOptions support = options.bounds.support;
        for (int refinement = 0;; ++refinement) {
            const double c_snap = info_bound_support(eps, array, at_snr, support).snapshot.c_snap_bits;
            bool violated = false;
            for (std::size_t i = first; i < rows.size(); ++i) {
                RateSweepRow& row = rows[i];
                row.c_info_support = info_bound_from_snapshot(c_snap, eps, at_snr.with_snapshots(row.snapshots));
                row.support_grid_n = support.grid_n;
                row.support_ok = row.rate_bits_per_second <= row.c_info_support;
                violated = violated || !row.support_ok;
            }
            if (!violated || refinement >= options.max_grid_refinements) {
                break;
            }
            support.grid_n = 2 * support.grid_n - 1;
        }
    }
    return rows;
}

} // namespace embcomm
