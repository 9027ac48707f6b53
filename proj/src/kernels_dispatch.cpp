#include "sbsdp/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace sbsdp::kernels {

namespace {

const Backend& pick_backend() {
    if (const char* env = std::getenv("SBSDP_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return scalar_backend();
#if defined(SBSDP_HAVE_AVX2_TU)
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return avx2_backend();
#endif
#if defined(SBSDP_HAVE_NEON_TU)
        if (std::strcmp(env, "neon") == 0) return neon_backend();
#endif
        return scalar_backend();  // unknown or unsupported name
    }
#if defined(SBSDP_HAVE_AVX2_TU)
    if (avx2_supported()) return avx2_backend();
#endif
#if defined(SBSDP_HAVE_NEON_TU)
    return neon_backend();
#else
    return scalar_backend();
#endif
}

}  // namespace

const Backend& active_backend() {
    static const Backend& b = pick_backend();
    return b;
}

std::vector<const Backend*> available_backends() {
    std::vector<const Backend*> out{&scalar_backend()};
#if defined(SBSDP_HAVE_AVX2_TU)
    if (avx2_supported()) out.push_back(&avx2_backend());
#endif
#if defined(SBSDP_HAVE_NEON_TU)
    out.push_back(&neon_backend());
#endif
    return out;
}

}  // namespace sbsdp::kernels
