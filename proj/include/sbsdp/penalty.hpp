#pragma once

#include "sbsdp/problem.hpp"

namespace sbsdp {

enum class RhoSource {
    UserGiven,
    FromKnownSolution,
    MaxCutPrimal,
    MaxCutDual,
    SosSphere,
    ConstantTrace,
};

struct PenaltyConfig {
    double rho = 0.0;
    RhoSource source = RhoSource::UserGiven;
};

/// Penalized objective evaluation; the eigen data feeds the model update.
struct PenaltyEval {
    double value = 0.0;
    Vec top_vec;        // unit top eigenvector of the penalized matrix
    double lambda_max;  // lambda_max(-X), resp. lambda_max(A*(y)-C)
};

/// F(X) = <C,X> + rho * max{lambda_max(-X), 0}
PenaltyEval eval_primal_penalized(const SdpProblem& p, double rho, const SymMatrix& X);

/// F_d(y) = -b^T y + rho * max{lambda_max(A*(y)-C), 0}
PenaltyEval eval_dual_penalized(const SdpProblem& p, double rho, const Vec& y);

/// rho = 2n+2, valid for the dual method on Max-Cut SDPs (tr(X) = n).
double maxcut_rho_dual(int n);

/// rho = 2*(tr(L)/4 - (n/4) min{0, lambda_min(L)}) + 2 for the primal method.
double maxcut_rho_primal(const SymMatrix& L);

/// rho = (1 + R_bar)^k for sphere-constrained sum-of-squares relaxations.
double sos_sphere_rho(int k, double R_bar);

enum class PenaltySide { Primal, Dual };

/// Theorem-strength bound from a known solution:
/// Primal -> 2 tr(Z*) + 2, Dual -> 2 tr(X*) + 2.
double rho_from_known(const KnownSolution& sol, PenaltySide side);

}  // namespace sbsdp
