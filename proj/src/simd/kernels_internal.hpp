#pragma once

#include "vrecon/simd/kernels.hpp"

namespace vrecon::simd::detail {

extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
#if defined(__ARM_NEON) || defined(__aarch64__)
extern const KernelTable neon_table;
#endif

}  // namespace vrecon::simd::detail
