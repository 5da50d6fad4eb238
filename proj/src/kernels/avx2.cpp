#include "kernels_internal.hpp"

#include <immintrin.h>

namespace embcomm::kernels {

namespace {

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

std::complex<double> cdot_avx2(const double* ar, const double* ai, const double* br, const double* bi,
                               std::size_t n) {
    __m256d re = _mm256_setzero_pd();
    __m256d im = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d xr = _mm256_loadu_pd(ar + k);
        const __m256d xi = _mm256_loadu_pd(ai + k);
        const __m256d yr = _mm256_loadu_pd(br + k);
        const __m256d yi = _mm256_loadu_pd(bi + k);
        re = _mm256_fmadd_pd(xr, yr, re);
        re = _mm256_fmadd_pd(xi, yi, re);
        im = _mm256_fmadd_pd(xr, yi, im);
        im = _mm256_fnmadd_pd(xi, yr, im);
    }
    double sre = hsum(re);
    double sim = hsum(im);
    for (; k < n; ++k) {
        sre += ar[k] * br[k] + ai[k] * bi[k];
        sim += ar[k] * bi[k] - ai[k] * br[k];
    }
    return {sre, sim};
}

double snapshot_energy_avx2(const double* ar, const double* ai, const double* yr, const double* yi,
                            std::size_t m, std::size_t l) {
    double total = 0.0;
    for (std::size_t c = 0; c < l; ++c) {
        total += std::norm(cdot_avx2(ar, ai, yr + c * m, yi + c * m, m));
    }
    return total;
}

} // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{Isa::Avx2, &cdot_avx2, &snapshot_energy_avx2};
    return table;
}

} // namespace embcomm::kernels
