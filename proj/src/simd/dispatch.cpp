#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace deltarec::simd {

const KernelSet* avx2_kernels() noexcept {
#if defined(DELTAREC_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &detail::avx2_set() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet& kernels() noexcept {
  static const KernelSet* chosen = [] {
    const KernelSet* best = avx2_kernels();
    if (const char* env = std::getenv("DELTAREC_SIMD")) {
      const std::string_view want{env};
      if (want == "scalar") return &scalar_kernels();
      if (want == "avx2" && best != nullptr) return best;
    }
    return best != nullptr ? best : &scalar_kernels();
  }();
  return *chosen;
}

std::vector<const KernelSet*> available_kernels() {
  std::vector<const KernelSet*> out{&scalar_kernels()};
  if (const KernelSet* a = avx2_kernels()) out.push_back(a);
  return out;
}

}  // namespace deltarec::simd
