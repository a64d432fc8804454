#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "mde/simd.hpp"

namespace mde::simd {

bool avx2_available() {
#if MDE_HAVE_AVX2
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Isa select_isa() {
    if (const char* env = std::getenv("MDE_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_available())
                throw std::runtime_error("MDE_SIMD=avx2 requested but AVX2 unavailable");
            return Isa::avx2;
        }
        throw std::runtime_error("MDE_SIMD must be 'scalar' or 'avx2'");
    }
    return avx2_available() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

Isa active_isa() {
    static const Isa isa = select_isa();
    return isa;
}

const Kernels& active() {
#if MDE_HAVE_AVX2
    if (active_isa() == Isa::avx2) return avx2_kernels();
#endif
    return scalar_kernels();
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::avx2: return "avx2";
        case Isa::scalar: return "scalar";
    }
    return "unknown";
}

}  // namespace mde::simd
