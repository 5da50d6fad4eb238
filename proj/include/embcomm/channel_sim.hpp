#pragma once

#include "embcomm/array_model.hpp"
#include "embcomm/codebook.hpp"
#include "embcomm/kernels.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace embcomm {

// Complex matrix in split storage, column-major.
struct SplitComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> re;
    std::vector<double> im;

    SplitComplexMatrix() = default;
    SplitComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), re(r * c, 0.0), im(r * c, 0.0) {}

    std::complex<double> at(std::size_t r, std::size_t c) const { return {re[c * rows + r], im[c * rows + r]}; }
};

// One channel use: Y = a(r_j) h^T + N, M x L.
struct SnapshotBatch {
    SplitComplexMatrix y;
    std::vector<std::complex<double>> h;
    std::size_t true_index = 0;
};

// Steering vectors of a codebook in split storage.
class SteeringBank {
public:
    SteeringBank(const std::vector<Position>& positions, const ArrayConfig& array, const SceneConfig& scene);

    std::size_t size() const { return count_; }
    std::size_t elements() const { return m_; }
    const double* re(std::size_t j) const { return re_.data() + j * m_; }
    const double* im(std::size_t j) const { return im_.data() + j * m_; }

private:
    std::size_t count_ = 0;
    std::size_t m_ = 0;
    std::vector<double> re_;
    std::vector<double> im_;
};

struct SimSeed {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
};

/// Independent engine for one (codeword, trial) stream.
std::mt19937_64 stream_engine(SimSeed seed, std::uint64_t codeword, std::uint64_t trial);

/// CN(0, variance): real and imaginary parts N(0, variance / 2).
std::complex<double> complex_gaussian(std::mt19937_64& rng, double variance);

/// Draws a channel use for codeword j of the bank; determined by (seed, j, trial).
SnapshotBatch draw_channel_use(const SteeringBank& bank, std::size_t j, SimSeed seed, std::uint64_t trial,
                               const SceneConfig& scene);

SnapshotBatch draw_channel_use(const Codebook& cb, std::size_t j, SimSeed seed, std::uint64_t trial);

/// a_j^H Y Y^H a_j = sum_l |a_j^H y_l|^2 for every codeword.
std::vector<double> decision_statistics(const SnapshotBatch& batch, const SteeringBank& bank,
                                        const kernels::KernelTable& table = kernels::active());

/// Argmax of the decision statistics; ties go to the lowest index.
std::size_t ml_decode(const SnapshotBatch& batch, const SteeringBank& bank,
                      const kernels::KernelTable& table = kernels::active());

std::size_t ml_decode(const SnapshotBatch& batch, const Codebook& cb);

struct WilsonInterval {
    double center = 0.0;
    double halfwidth = 0.0;
    double lower() const { return center - halfwidth; }
    double upper() const { return center + halfwidth; }
};

/// 95% Wilson score interval (z = 1.96) for k events in n trials.
WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.96);

struct PairwiseEntry {
    std::size_t i = 0;
    std::size_t j = 0;
    double empirical_rate = 0.0; // P(stat_j > stat_i | i sent)
    double confusion_rate = 0.0; // P(decoded j | i sent)
    double bhatt_bound = 0.0;    // exp(-L B(r_i - r_j))
    double halfwidth = 0.0;      // Wilson half-width of empirical_rate
};

struct SimReport {
    std::uint64_t trials = 0; // per codeword
    std::vector<double> per_codeword_error;
    std::vector<double> per_codeword_halfwidth;
    double max_error = 0.0;
    std::size_t max_error_index = 0;
    double wilson_halfwidth_95 = 0.0; // at the worst codeword
    double union_bound_prediction = 0.0;
    double b_min = 0.0;
    std::vector<PairwiseEntry> pairwise_table; // ordered pairs, i outer
    bool union_bound_respected = false;
    bool pairwise_bounds_respected = false;
    const char* kernel = "scalar";
};

/// Runs trials_per_codeword channel uses for every codeword. Trials run in
/// parallel; all tallies are integer counts so the report is independent of
/// scheduling.
SimReport estimate_errors(const Codebook& cb, std::uint64_t trials_per_codeword, SimSeed seed,
                          const kernels::KernelTable& table = kernels::active());

struct BinaryPairResult {
    std::uint64_t trials = 0; // total over both hypotheses
    std::uint64_t errors = 0;
    double error_rate = 0.0;
    double halfwidth = 0.0;
    double bhattacharyya = 0.0;
    double floor = 0.0; // (1 - sqrt(1 - exp(-2 L B))) / 2
};

/// Equal-prior binary test between two positions, trials_per_hypothesis each.
BinaryPairResult binary_pair_experiment(const Codebook& pair, std::uint64_t trials_per_hypothesis, SimSeed seed,
                                        const kernels::KernelTable& table = kernels::active());

/// Binary error floor (1 - sqrt(1 - exp(-2 L B))) / 2.
double binary_error_floor(double b, int snapshots);

/// Up to max_codewords indices: endpoints of the lowest-B pairs until half the
/// budget is used, then a seeded random fill. Sorted ascending.
std::vector<std::size_t> select_sub_codebook(const Codebook& cb, std::size_t max_codewords, std::uint64_t seed);

} // namespace embcomm
