#pragma once

#include "sbsdp/problem.hpp"

namespace sbsdp {

/// Result of rewriting the problem on the other side of the primal/dual pair.
/// The optimal values relate through a recorded constant:
///   original_optimum = objective_offset - converted_linear_optimum,
/// where the converted linear optimum is b'^T y at the converted problem's
/// dual optimum (primal_to_dual) or <C', X'> at its primal optimum
/// (dual_to_primal).
struct Conversion {
    SdpProblem problem;
    double objective_offset = 0.0;
    /// Satisfies A(feasible_point) = b for the original problem.
    SymMatrix feasible_point;
    /// Dimension of the constraint null space, p = n(n+1)/2 - m.
    int nullspace_dim = 0;
};

/// Rewrites (P) as an inequality-form problem over the constraint null space:
/// converted data b' = -N(C), A'_i = -N_i, C' = X_p with X_p the least-norm
/// solution of A(X)=b and {N_i} an orthonormal basis (trace inner product) of
/// the null space of A.
Conversion convert_primal_to_dual(const SdpProblem& p);

/// Rewrites (D) as an equality-form problem over the slack variable:
/// converted data A'_i = G_i (orthonormal basis of the orthogonal complement
/// of span{A_i}), b' = G(C), C' = X_f with A(X_f) = b.
Conversion convert_dual_to_primal(const SdpProblem& p);

/// Symmetric vectorization with sqrt(2)-scaled off-diagonals, so
/// <svec(A), svec(B)> equals the trace inner product <A, B>.
Vec svec(const SymMatrix& M);
SymMatrix smat(int n, const Vec& v);

}  // namespace sbsdp
