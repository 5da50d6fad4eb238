#include "kernels_internal.hpp"

#include "embcomm/errors.hpp"

namespace embcomm::kernels {

const char* isa_name(Isa isa) {
    switch (isa) {
    case Isa::Scalar:
        return "scalar";
    case Isa::Avx2:
        return "avx2";
    case Isa::Neon:
        return "neon";
    }
    return "unknown";
}

bool available(Isa isa) {
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(EMBCOMM_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::Neon:
#if defined(EMBCOMM_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

const KernelTable& table_for(Isa isa) {
    if (!available(isa)) {
        throw DomainError(std::string("kernel ISA not available: ") + isa_name(isa));
    }
    switch (isa) {
#if defined(EMBCOMM_HAVE_AVX2)
    case Isa::Avx2:
        return avx2_table();
#endif
#if defined(EMBCOMM_HAVE_NEON)
    case Isa::Neon:
        return neon_table();
#endif
    default:
        return scalar_table();
    }
}

const KernelTable& active() {
    static const KernelTable& table = available(Isa::Avx2)   ? table_for(Isa::Avx2)
                                      : available(Isa::Neon) ? table_for(Isa::Neon)
                                                             : scalar_table();
    return table;
}

} // namespace embcomm::kernels
