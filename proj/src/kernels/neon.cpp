#include "kernels_internal.hpp"

#include <arm_neon.h>

namespace embcomm::kernels {

namespace {

std::complex<double> cdot_neon(const double* ar, const double* ai, const double* br, const double* bi,
                               std::size_t n) {
    float64x2_t re = vdupq_n_f64(0.0);
    float64x2_t im = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t xr = vld1q_f64(ar + k);
        const float64x2_t xi = vld1q_f64(ai + k);
        const float64x2_t yr = vld1q_f64(br + k);
        const float64x2_t yi = vld1q_f64(bi + k);
        re = vfmaq_f64(re, xr, yr);
        re = vfmaq_f64(re, xi, yi);
        im = vfmaq_f64(im, xr, yi);
        im = vfmsq_f64(im, xi, yr);
    }
    double sre = vaddvq_f64(re);
    double sim = vaddvq_f64(im);
    for (; k < n; ++k) {
        sre += ar[k] * br[k] + ai[k] * bi[k];
        sim += ar[k] * bi[k] - ai[k] * br[k];
    }
    return {sre, sim};
}

double snapshot_energy_neon(const double* ar, const double* ai, const double* yr, const double* yi,
                            std::size_t m, std::size_t l) {
    double total = 0.0;
    for (std::size_t c = 0; c < l; ++c) {
        total += std::norm(cdot_neon(ar, ai, yr + c * m, yi + c * m, m));
    }
    return total;
}

} // namespace

const KernelTable& neon_table() {
    static const KernelTable table{Isa::Neon, &cdot_neon, &snapshot_energy_neon};
    return table;
}

} // namespace embcomm::kernels
