#pragma once

#include <complex>
#include <cstddef>

namespace embcomm::kernels {

enum class Isa { Scalar, Avx2, Neon };

const char* isa_name(Isa isa);

// Complex vectors are passed in split form (separate real and imaginary arrays).
struct KernelTable {
    Isa isa = Isa::Scalar;

    /// sum_k conj(a_k) b_k over n entries.
    std::complex<double> (*cdot)(const double* ar, const double* ai, const double* br, const double* bi,
                                 std::size_t n) = nullptr;

    /// sum_l |a^H y_l|^2 for an m x l matrix Y stored column-major (column l at offset l * m).
    double (*snapshot_energy)(const double* ar, const double* ai, const double* yr, const double* yi,
                              std::size_t m, std::size_t l) = nullptr;
};

/// Table picked once from the running CPU.
const KernelTable& active();

/// True when the running CPU and this build both support the ISA.
bool available(Isa isa);

/// Table for a specific ISA; throws DomainError when unavailable.
const KernelTable& table_for(Isa isa);

const KernelTable& scalar_table();

} // namespace embcomm::kernels
