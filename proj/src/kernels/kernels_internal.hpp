#pragma once

#include "embcomm/kernels.hpp"

namespace embcomm::kernels {

#if defined(EMBCOMM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(EMBCOMM_HAVE_NEON)
const KernelTable& neon_table();
#endif

} // namespace embcomm::kernels
