#include "kernels_internal.hpp"

namespace embcomm::kernels {

namespace {

std::complex<double> cdot_scalar(const double* ar, const double* ai, const double* br, const double* bi,
                                 std::size_t n) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        re += ar[k] * br[k] + ai[k] * bi[k];
        im += ar[k] * bi[k] - ai[k] * br[k];
    }
    return {re, im};
}

double snapshot_energy_scalar(const double* ar, const double* ai, const double* yr, const double* yi,
                              std::size_t m, std::size_t l) {
    double total = 0.0;
    for (std::size_t c = 0; c < l; ++c) {
        const std::complex<double> p = cdot_scalar(ar, ai, yr + c * m, yi + c * m, m);
        total += std::norm(p);
    }
    return total;
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::Scalar, &cdot_scalar, &snapshot_energy_scalar};
    return table;
}

} // namespace embcomm::kernels
