#pragma once

#include <cstddef>
#include <vector>

// Flat double-array kernels behind every dense inner loop (trace inner
// products, A/A* maps, iterate updates). A scalar reference implementation is
// always present; on x86-64 an AVX2+FMA variant and on aarch64 a NEON variant
// are selected once at runtime. The environment variable SBSDP_KERNELS
// (scalar|avx2|neon) overrides the selection.

namespace sbsdp::kernels {

struct Backend {
    const char* name;
    double (*dot)(const double* x, const double* y, std::size_t n);
    void (*axpy)(double a, const double* x, double* y, std::size_t n);  // y += a*x
    void (*scal)(double a, double* x, std::size_t n);                   // x *= a
};

const Backend& scalar_backend();
#if defined(SBSDP_HAVE_AVX2_TU)
const Backend& avx2_backend();
bool avx2_supported();
#endif
#if defined(SBSDP_HAVE_NEON_TU)
const Backend& neon_backend();
#endif

/// Backend in use for this process (resolved on first call).
const Backend& active_backend();

/// All backends usable on this machine (scalar first).
std::vector<const Backend*> available_backends();

inline double dot(const double* x, const double* y, std::size_t n) {
    return active_backend().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
    active_backend().axpy(a, x, y, n);
}
inline void scal(double a, double* x, std::size_t n) {
    active_backend().scal(a, x, n);
}

}  // namespace sbsdp::kernels
