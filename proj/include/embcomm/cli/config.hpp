#pragma once

#include "embcomm/array_model.hpp"
#include "embcomm/bounds.hpp"
#include "embcomm/codebook.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace embcomm::cli {

struct DesignSection {
    double eps = 1e-3;
    double lattice_rotation = 0.0;
    double offset_y = 0.0;
    double offset_z = 0.0;
    double greedy_step = 0.05;
    std::string import_csv;
};

struct SweepSection {
    std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<int> l_list{1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20};
    int l_max = 64; // exhaustive L search range for the lstar command
};

struct SolverSection {
    int rays = 720;
    double ray_tol = 1e-5;
    int grid_n = 41;
    int fw_iters = 5000;
    double fw_gap_tol = 1e-6;
    bool support_bound = true;
};

struct FieldSection {
    double dy_min = -0.5;
    double dy_max = 0.5;
    int n_dy = 101;
    double dz_min = -2.0;
    double dz_max = 2.0;
    int n_dz = 101;
    double polar_radius = 0.1;
    int polar_n = 360;
};

struct SimSection {
    std::uint64_t trials = 20000;
    std::uint64_t seed = 1;
    int max_codewords = 16;
    bool self_test = false;
};

struct RunConfig {
    ArrayConfig array = ArrayConfig::from_carrier(64, 16, 7.0e9);
    SceneConfig scene{};
    DesignSection design{};
    SweepSection sweep{};
    SolverSection solver{};
    FieldSection field{};
    SimSection sim{};

    HexDesignOptions hex_options() const;
    RaySearchOptions ray_options() const;
    SupportBoundOptions support_options() const;
    BoundOptions bound_options() const;

    /// Throws ConfigError naming the first offending key.
    void validate() const;

    /// Every key with its resolved value, in a fixed order.
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

/// Reads an INI file (may be empty for defaults), then applies "section.key=value"
/// overrides in order. Unknown sections or keys are rejected.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

/// Applies one "section.key=value" assignment.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

std::vector<std::string> known_keys();

} // namespace embcomm::cli
