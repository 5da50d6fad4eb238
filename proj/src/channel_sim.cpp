#include "embcomm/channel_sim.hpp"

#include "embcomm/errors.hpp"
#include "embcomm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <tuple>

namespace embcomm {

namespace {

void split_words(std::vector<std::uint32_t>& out, std::uint64_t v) {
    out.push_back(static_cast<std::uint32_t>(v >> 32));
    out.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
}

} // namespace

SteeringBank::SteeringBank(const std::vector<Position>& positions, const ArrayConfig& array,
                           const SceneConfig& scene)
    : count_(positions.size()), m_(static_cast<std::size_t>(array.elements())) {
    re_.resize(count_ * m_);
    im_.resize(count_ * m_);
    for (std::size_t j = 0; j < count_; ++j) {
        const SteeringVector a = steering_vector(positions[j], array, scene);
        for (std::size_t k = 0; k < m_; ++k) {
            re_[j * m_ + k] = a[k].real();
            im_[j * m_ + k] = a[k].imag();
        }
    }
}

std::mt19937_64 stream_engine(SimSeed seed, std::uint64_t codeword, std::uint64_t trial) {
    std::vector<std::uint32_t> words;
    words.reserve(8);
    split_words(words, seed.hi);
    split_words(words, seed.lo);
    split_words(words, codeword);
    split_words(words, trial);
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

std::complex<double> complex_gaussian(std::mt19937_64& rng, double variance) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * variance));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

SnapshotBatch draw_channel_use(const SteeringBank& bank, std::size_t j, SimSeed seed, std::uint64_t trial,
                               const SceneConfig& scene) {
    if (j >= bank.size()) {
        throw DomainError("draw_channel_use: codeword index out of range");
    }
    const std::size_t m = bank.elements();
    const std::size_t l = static_cast<std::size_t>(scene.snapshots_l);
    std::mt19937_64 rng = stream_engine(seed, j, trial);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double h_sd = std::sqrt(0.5 * scene.echo_power());
    const double n_sd = std::sqrt(0.5 * scene.noise_var_sigma2);

    SnapshotBatch batch;
    batch.true_index = j;
    batch.y = SplitComplexMatrix(m, l);
    batch.h.resize(l);
    const double* ar = bank.re(j);
    const double* ai = bank.im(j);
    for (std::size_t c = 0; c < l; ++c) {
        const double hr = h_sd * normal(rng);
        const double hi = h_sd * normal(rng);
        batch.h[c] = {hr, hi};
        double* yr = batch.y.re.data() + c * m;
        double* yi = batch.y.im.data() + c * m;
        for (std::size_t k = 0; k < m; ++k) {
            const double nr = n_sd * normal(rng);
            const double ni = n_sd * normal(rng);
            yr[k] = ar[k] * hr - ai[k] * hi + nr;
            yi[k] = ar[k] * hi + ai[k] * hr + ni;
        }
    }
    return batch;
}

SnapshotBatch draw_channel_use(const Codebook& cb, std::size_t j, SimSeed seed, std::uint64_t trial) {
    const SteeringBank bank(cb.positions(), cb.field().array(), cb.field().scene());
    return draw_channel_use(bank, j, seed, trial, cb.field().scene());
}

std::vector<double> decision_statistics(const SnapshotBatch& batch, const SteeringBank& bank,
                                        const kernels::KernelTable& table) {
    if (batch.y.rows != bank.elements()) {
        throw DomainError("decision_statistics: batch and bank dimensions differ");
    }
    std::vector<double> stats(bank.size());
    for (std::size_t j = 0; j < bank.size(); ++j) {
        stats[j] = table.snapshot_energy(bank.re(j), bank.im(j), batch.y.re.data(), batch.y.im.data(), batch.y.rows,
                                         batch.y.cols);
    }
    return stats;
}

std::size_t ml_decode(const SnapshotBatch& batch, const SteeringBank& bank, const kernels::KernelTable& table) {
    const std::vector<double> stats = decision_statistics(batch, bank, table);
    std::size_t best = 0;
    for (std::size_t j = 1; j < stats.size(); ++j) {
        if (stats[j] > stats[best]) {
            best = j;
        }
    }
    return best;
}

std::size_t ml_decode(const SnapshotBatch& batch, const Codebook& cb) {
    const SteeringBank bank(cb.positions(), cb.field().array(), cb.field().scene());
    return ml_decode(batch, bank);
}

WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
    if (n == 0 || k > n) {
        throw DomainError("wilson_interval: need 0 <= k <= n and n >= 1");
    }
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    WilsonInterval w;
    w.center = (p + z2 / (2.0 * nn)) / denom;
    w.halfwidth = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return w;
}

SimReport estimate_errors(const Codebook& cb, std::uint64_t trials_per_codeword, SimSeed seed,
                          const kernels::KernelTable& table) {
    if (trials_per_codeword < 1) {
        throw DomainError("estimate_errors: need at least one trial per codeword");
    }
    if (cb.size() < 1) {
        throw DomainError("estimate_errors: empty codebook");
    }
    const SceneConfig& scene = cb.field().scene();
    const SteeringBank bank(cb.positions(), cb.field().array(), scene);
    const std::size_t nj = cb.size();

    // decoded[i][j]: trials with i sent and j decoded; beaten[i][j]: stat_j > stat_i.
    std::vector<std::uint64_t> decoded(nj * nj, 0);
    std::vector<std::uint64_t> beaten(nj * nj, 0);
    std::mutex merge;
    for (std::size_t i = 0; i < nj; ++i) {
        parallel_chunks(trials_per_codeword, [&](std::size_t begin, std::size_t end) {
            std::vector<std::uint64_t> dec(nj, 0);
            std::vector<std::uint64_t> beat(nj, 0);
            for (std::size_t t = begin; t < end; ++t) {
                const SnapshotBatch batch = draw_channel_use(bank, i, seed, t, scene);
                const std::vector<double> stats = decision_statistics(batch, bank, table);
                std::size_t best = 0;
                for (std::size_t j = 0; j < nj; ++j) {
                    if (stats[j] > stats[best]) {
                        best = j;
                    }
                    if (j != i && stats[j] > stats[i]) {
                        ++beat[j];
                    }
                }
                ++dec[best];
            }
            std::lock_guard lock(merge);
            for (std::size_t j = 0; j < nj; ++j) {
                decoded[i * nj + j] += dec[j];
                beaten[i * nj + j] += beat[j];
            }
        });
    }

    SimReport r;
    r.trials = trials_per_codeword;
    r.kernel = kernels::isa_name(table.isa);
    r.b_min = cb.min_pairwise_b();
    const int l = scene.snapshots_l;
    r.union_bound_prediction = nj < 2 ? 0.0 : static_cast<double>(nj - 1) * std::exp(-l * r.b_min);
    r.per_codeword_error.resize(nj);
    r.per_codeword_halfwidth.resize(nj);
    for (std::size_t i = 0; i < nj; ++i) {
        const std::uint64_t errors = trials_per_codeword - decoded[i * nj + i];
        r.per_codeword_error[i] = static_cast<double>(errors) / static_cast<double>(trials_per_codeword);
        r.per_codeword_halfwidth[i] = wilson_interval(errors, trials_per_codeword).halfwidth;
        if (r.per_codeword_error[i] > r.max_error) {
            r.max_error = r.per_codeword_error[i];
            r.max_error_index = i;
        }
    }
    r.wilson_halfwidth_95 = r.per_codeword_halfwidth[r.max_error_index];
    r.union_bound_respected = r.max_error <= r.union_bound_prediction + r.wilson_halfwidth_95 || nj < 2;

    r.pairwise_bounds_respected = true;
    for (std::size_t i = 0; i < nj; ++i) {
        for (std::size_t j = 0; j < nj; ++j) {
            if (i == j) {
                continue;
            }
            PairwiseEntry e;
            e.i = i;
            e.j = j;
            e.empirical_rate = static_cast<double>(beaten[i * nj + j]) / static_cast<double>(trials_per_codeword);
            e.confusion_rate = static_cast<double>(decoded[i * nj + j]) / static_cast<double>(trials_per_codeword);
            e.bhatt_bound = std::exp(-l * cb.field().exact(cb[j] - cb[i]));
            e.halfwidth = wilson_interval(beaten[i * nj + j], trials_per_codeword).halfwidth;
            if (e.empirical_rate > e.bhatt_bound + e.halfwidth) {
                r.pairwise_bounds_respected = false;
            }
            r.pairwise_table.push_back(e);
        }
    }
    return r;
}

double binary_error_floor(double b, int snapshots) {
    return 0.5 * (1.0 - std::sqrt(-std::expm1(-2.0 * snapshots * b)));
}

BinaryPairResult binary_pair_experiment(const Codebook& pair, std::uint64_t trials_per_hypothesis, SimSeed seed,
                                        const kernels::KernelTable& table) {
    if (pair.size() != 2) {
        throw DomainError("binary_pair_experiment: codebook must have exactly two positions");
    }
    const SimReport r = estimate_errors(pair, trials_per_hypothesis, seed, table);
    BinaryPairResult out;
    out.trials = 2 * trials_per_hypothesis;
    const double total = r.per_codeword_error[0] + r.per_codeword_error[1];
    out.errors = static_cast<std::uint64_t>(std::llround(total * static_cast<double>(trials_per_hypothesis)));
    out.error_rate = static_cast<double>(out.errors) / static_cast<double>(out.trials);
    out.halfwidth = wilson_interval(out.errors, out.trials).halfwidth;
    out.bhattacharyya = pair.min_pairwise_b();
    out.floor = binary_error_floor(out.bhattacharyya, pair.field().scene().snapshots_l);
    return out;
}

std::vector<std::size_t> select_sub_codebook(const Codebook& cb, std::size_t max_codewords, std::uint64_t seed) {
    const std::size_t n = cb.size();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (n <= max_codewords) {
        return all;
    }
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            pairs.emplace_back(cb.field().exact(cb[j] - cb[i]), i, j);
        }
    }
    std::sort(pairs.begin(), pairs.end());

    std::vector<bool> taken(n, false);
    std::vector<std::size_t> chosen;
    auto take = [&](std::size_t k) {
        if (!taken[k] && chosen.size() < max_codewords) {
            taken[k] = true;
            chosen.push_back(k);
        }
    };
    const std::size_t half = max_codewords / 2;
    for (const auto& [b, i, j] : pairs) {
        if (chosen.size() >= half) {
            break;
        }
        take(i);
        take(j);
    }
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < n; ++k) {
        if (!taken[k]) {
            rest.push_back(k);
        }
    }
    std::mt19937_64 rng(seed);
    std::shuffle(rest.begin(), rest.end(), rng);
    for (std::size_t k : rest) {
        take(k);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

} // namespace embcomm
