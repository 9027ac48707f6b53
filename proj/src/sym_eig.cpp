#include "sbsdp/sym_eig.hpp"

#include <algorithm>
#include <cmath>

#include <lapacke.h>

#include "sbsdp/errors.hpp"

// All dense problems here are small; threaded BLAS only adds overhead and
// run-to-run reduction nondeterminism.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace sbsdp {

namespace {

struct BlasThreadInit {
    BlasThreadInit() {
        if (openblas_set_num_threads) openblas_set_num_threads(1);
    }
};
const BlasThreadInit blas_thread_init;

}  // namespace

namespace {

// Flips vector v (length n) so its largest-magnitude component is
// nonnegative; first such index wins on ties. Keeps logs reproducible.
void fix_sign(double* v, int n) {
    int arg = 0;
    double best = std::abs(v[0]);
    for (int i = 1; i < n; ++i) {
        double a = std::abs(v[i]);
        if (a > best) {
            best = a;
            arg = i;
        }
    }
    if (v[arg] < 0.0) {
        for (int i = 0; i < n; ++i) v[i] = -v[i];
    }
}

}  // namespace

EigenDecomp eig_sym(const SymMatrix& M) {
    if (!M.all_finite()) throw InvalidInput("eig_sym: non-finite entries");
    const int n = M.order();
    // dsyevd in column-major; symmetric input, so the row-major buffer is
    // reused directly. On exit column j (contiguous) is eigenvector j.
    Vec a(M.data(), M.data() + M.size());
    Vec w(n);
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
    if (info != 0) throw InvalidInput("eig_sym: LAPACK dsyevd failed");

    EigenDecomp d;
    d.values.resize(n);
    d.vectors = Basis(n, n);
    // LAPACK returns ascending order; store descending.
    for (int k = 0; k < n; ++k) {
        int src = n - 1 - k;
        d.values[k] = w[src];
        double* dst = d.vectors.vec(k);
        std::copy(a.begin() + static_cast<std::size_t>(src) * n,
                  a.begin() + static_cast<std::size_t>(src + 1) * n, dst);
        fix_sign(dst, n);
    }
    return d;
}

Basis top_eigvecs(const SymMatrix& M, int r) {
    if (r < 1 || r > M.order()) throw InvalidInput("top_eigvecs: r out of range");
    EigenDecomp d = eig_sym(M);
    Basis B(M.order(), r);
    for (int k = 0; k < r; ++k)
        std::copy(d.vectors.vec(k), d.vectors.vec(k) + M.order(), B.vec(k));
    return B;
}

Basis orth(const Basis& B) {
    if (!B.all_finite()) throw InvalidInput("orth: non-finite entries");
    if (B.count == 0) return Basis(B.dim, 0);
    const int n = B.dim;
    const int k = B.count;
    const int kmin = std::min(n, k);
    // B.data read as column-major n x k (columns are the vectors).
    Vec a = B.data;
    Vec s(kmin);
    Vec u(static_cast<std::size_t>(n) * kmin);
    Vec vt(static_cast<std::size_t>(kmin) * k);
    lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', n, k, a.data(), n, s.data(),
                                     u.data(), n, vt.data(), kmin);
    if (info != 0) throw InvalidInput("orth: LAPACK dgesdd failed");

    int rank = 0;
    const double tol = 1e-12 * (s.empty() ? 0.0 : s[0]);
    for (int i = 0; i < kmin; ++i)
        if (s[i] > tol) ++rank;

    Basis Q(n, rank);
    for (int j = 0; j < rank; ++j) {
        std::copy(u.begin() + static_cast<std::size_t>(j) * n,
                  u.begin() + static_cast<std::size_t>(j + 1) * n, Q.vec(j));
    }
    return Q;
}

}  // namespace sbsdp
