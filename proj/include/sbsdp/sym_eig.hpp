#pragma once

#include "sbsdp/dense.hpp"

namespace sbsdp {

/// Full symmetric eigen-decomposition. values are sorted non-increasing,
/// vectors.vec(k) is the unit eigenvector for values[k] with its
/// largest-magnitude component made nonnegative.
struct EigenDecomp {
    Vec values;
    Basis vectors;

    double lambda_max() const { return values.front(); }
    double lambda_min() const { return values.back(); }
};

EigenDecomp eig_sym(const SymMatrix& M);

/// Orthonormal eigenvectors for the r largest eigenvalues.
Basis top_eigvecs(const SymMatrix& M, int r);

/// Orthonormal basis of span(B); drops directions with singular value
/// <= 1e-12 * sigma_max, so the returned count is the numerical rank.
Basis orth(const Basis& B);

}  // namespace sbsdp
