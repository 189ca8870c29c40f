#pragma once

#include "deltarec/simd/kernels.hpp"

namespace deltarec::simd::detail {

#if defined(DELTAREC_HAVE_AVX2)
const KernelSet& avx2_set() noexcept;
#endif

}  // namespace deltarec::simd::detail
