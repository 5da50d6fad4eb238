#pragma once

#include "embcomm/bounds.hpp"

#include <vector>

namespace embcomm {

struct RateSweepRow {
    double gamma0 = 0.0;
    int snapshots = 0;
    std::size_t j_hex = 0;
    double rate_bits_per_pulse = 0.0;
    double rate_bits_per_second = 0.0;
    bool feasible = false;
    double c_info_universal = 0.0;
    double c_info_support = 0.0; // grid-restricted; NaN when disabled
    double c_geo = 0.0;
    double c_geo_mainlobe = 0.0;
    double d_nec = 0.0;
    bool sandwich_ok = false;    // rate <= universal and rate <= geometric
    int support_grid_n = 0;      // grid used for c_info_support after refinement
    bool support_ok = true;      // rate <= c_info_support after refinement
};

struct RateSweepOptions {
    BoundOptions bounds{};
    int max_grid_refinements = 3; // nested refinements n -> 2n - 1 when the grid bound is violated
};

/// One row per (gamma0, L), gamma0 outer. The support bound is computed once
/// per gamma0 since its snapshot term does not depend on L; when some rate
/// exceeds it, the grid is refined (nested) before the row is flagged.
std::vector<RateSweepRow> rate_sweep(double eps, const SceneConfig& scene_template, const ArrayConfig& array,
                                     const std::vector<double>& snr_list, const std::vector<int>& l_list,
                                     const RateSweepOptions& options = {});

} // namespace embcomm
