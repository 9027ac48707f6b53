#pragma once

// Shared test utilities and independent oracles. Everything here recomputes
// from first principles and stays off the library's solve paths.

#include <cmath>
#include <random>

#include "sbsdp/dense.hpp"
#include "sbsdp/problem.hpp"

namespace sbsdp::testing {

inline SymMatrix random_sym(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    SymMatrix M(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) M.set(i, j, gauss(rng));
    return M;
}

inline Vec random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Vec v(n);
    for (double& x : v) x = gauss(rng);
    return v;
}

/// Sum_ij A_ij X_ij by explicit double loop.
inline double brute_trace_inner(const SymMatrix& A, const SymMatrix& X) {
    double s = 0.0;
    for (int i = 0; i < A.order(); ++i)
        for (int j = 0; j < A.order(); ++j) s += A(i, j) * X(i, j);
    return s;
}

/// ||M v - lambda v|| style reconstruction residual of a full decomposition.
inline double reconstruction_error(const SymMatrix& M, const Vec& values,
                                   const Basis& vectors) {
    SymMatrix R(M.order());
    for (int k = 0; k < vectors.count; ++k) R.add_outer(vectors.vec(k), values[k]);
    R.add_scaled(M, -1.0);
    return R.frob_norm();
}

inline SdpProblem random_problem(int n, int m, std::mt19937_64& rng) {
    std::vector<SymMatrix> A;
    for (int i = 0; i < m; ++i) A.push_back(random_sym(n, rng));
    return SdpProblem(random_sym(n, rng), std::move(A), random_vec(m, rng));
}

inline double operator_norm_bound(const SymMatrix& M) {
    // Frobenius norm dominates the operator norm
    return M.frob_norm();
}

}  // namespace sbsdp::testing
