#include "sbsdp/kernels.hpp"

namespace sbsdp::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    // Four independent partial sums; same association order as the SIMD
    // variants' tails so results stay close without being bit-coupled.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend b{"scalar", dot_scalar, axpy_scalar, scal_scalar};
    return b;
}

}  // namespace sbsdp::kernels
