#pragma once

#include "sbsdp/bundle_model.hpp"
#include "sbsdp/problem.hpp"

namespace sbsdp {

/// Reduced master problem over v = (gamma, vec(S)):
///   min v^T M v + m^T v   s.t. gamma >= 0, S PSD, gamma + tr(S) <= rho,
/// scaled so that v^T M v + m^T v + constant = 2*alpha*(master objective).
/// M22 is held in factored operator form, M22 = m22_diag*I + m22_sign*B^T B
/// with B of size bq x r^2 (column-major, columns contiguous); a dense
/// accessor exists for small r and for tests.
struct SubQp {
    int r = 1;
    double rho = 1.0;
    double M11 = 0.0;
    Vec M12;  // r^2
    double m22_diag = 0.0;
    double m22_sign = 1.0;
    int bq = 0;
    Vec B;  // bq x r^2 column-major
    double m1 = 0.0;
    Vec m2;  // r^2
    double constant = 0.0;

    int dim() const { return 1 + r * r; }
    /// out = M22 * s  (s of length r^2)
    Vec apply_M22(const Vec& s) const;
    /// Dense r^2 x r^2 materialization (row-major).
    Vec M22_dense() const;
    /// v^T M v + m^T v at v = (gamma, vec(S)).
    double objective(double gamma, const Vec& vecS) const;
};

/// Data needed to recover y* = Q33^{-1}(-q3/2 - Q13^T gamma - Q23^T vec(S))
/// through the problem's cached factorization.
struct YRecovery {
    int m = 0;
    int r = 0;
    Vec u0;   // Q33^{-1}(-q3/2)
    Vec u1;   // Q33^{-1} Q13^T
    Vec U2;   // Q33^{-1} Q23^T, m x r^2 column-major
    // retained for residual checks
    Vec q3;
    Vec Q13;
    Vec Q23t;  // Q23^T, m x r^2 column-major
};

/// Blocks of the primal method's reduced master problem (Schur-eliminated y).
std::pair<SubQp, YRecovery> build_sbmp_subqp(const SdpProblem& p, const BundleModel& model,
                                             const SymMatrix& Omega, double alpha);

/// Blocks of the dual method's reduced master problem (no y elimination).
SubQp build_sbmd_subqp(const SdpProblem& p, const BundleModel& model, const Vec& omega,
                       double alpha);

/// Analytic solution of the r = 1 triangle problem
///   min [g s] M [g s]^T + m^T [g s]  s.t. g >= 0, s >= 0, g + s <= rho.
struct R1Solution {
    double gamma = 0.0;
    double s = 0.0;
    double objective = 0.0;
};
R1Solution solve_r1(double M11, double M12, double M22, double m1, double m2, double rho);

/// Solves the reduced master problem. Dispatches to solve_r1 for r = 1; for
/// r > 1 runs a monotone accelerated projected-gradient method until the
/// unit-step projected-gradient residual is <= tol * (1 + ||m||). Exceeding
/// max_iter is a non-fatal stall: the best iterate is returned with
/// stalled = true. W_star / y_star are left empty (assembled by the caller).
SubqpSolution solve_subqp(const SubQp& q, double tol, int max_iter = 10000);

Vec recover_y(const YRecovery& rec, double gamma, const SymMatrix& S);

/// X* = Omega + (1/alpha) (W* - C + A*(y*))
SymMatrix recover_primal_candidate(const SymMatrix& Omega, double alpha, const SymMatrix& W_star,
                                   const Vec& y_star, const SdpProblem& p);

}  // namespace sbsdp
