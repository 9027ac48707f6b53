#pragma once

#include <cstdint>

#include "sbsdp/problem.hpp"
#include "sbsdp/sym_eig.hpp"

namespace sbsdp {

/// Spectral lower-approximation model: aggregate weight W_bar (PSD, unit
/// trace) plus an orthonormal eigenvector block P. P normally has
/// r_p + r_c vectors; it can transiently hold fewer when the update span is
/// rank deficient.
struct BundleModel {
    SymMatrix W_bar;
    Basis P;
    int r_p = 0;
    int r_c = 1;
    double rho = 1.0;

    int r() const { return P.count; }
};

/// Solution of the reduced master problem over (gamma, S), together with the
/// assembled aggregate W* = gamma W_bar + P S P^T and, for the primal method,
/// the recovered multiplier y*.
struct SubqpSolution {
    double gamma = 0.0;
    SymMatrix S;
    SymMatrix W_star;
    Vec y_star;  // primal method only
    bool stalled = false;
    int iterations = 0;
    double kkt_residual = 0.0;
};

/// P = top r_p + r_c eigenvectors of M0, W_bar = I/n.
BundleModel init_model(const SymMatrix& M0, int r_p, int r_c, double rho);

/// Model value at X. The inner max over {gamma >= 0, S PSD, gamma+tr(S) <= 1}
/// is linear in (gamma, S), so it is attained at a vertex:
/// <C,X> + rho * max{0, <W_bar,-X>, lambda_max(-P^T X P)}.
double eval_model_primal(const BundleModel& model, const SdpProblem& p, const SymMatrix& X);

/// Same vertex formula with -X replaced by A*(y) - C and <C,X> by -b^T y.
double eval_model_dual(const BundleModel& model, const SdpProblem& p, const Vec& y);

/// gamma W_bar + P S P^T
SymMatrix assemble_W(const BundleModel& model, double gamma, const SymMatrix& S);

/// Cut-aggregation update: split S* at the r_p largest eigenvalues,
/// P+ = orth([V_new, P Q1]), W_bar+ = (gamma* W_bar + P Q2 S2 Q2^T P^T)
/// normalized to unit trace; W_bar is retained when the denominator
/// gamma* + tr(S2) vanishes.
BundleModel update_model(const BundleModel& model, const SubqpSolution& sol, const Basis& V_new);

/// Worst violations of the three cut-aggregation contracts, measured at a
/// panel of random feasible probe points. Violations are relative:
/// max(0, required - actual) / (1 + |required| + |actual|).
struct ProbeReport {
    double worst_minorant = 0.0;
    double worst_subgradient = 0.0;
    double worst_model_subgradient = 0.0;
    int points = 0;

    double worst() const;
};

/// Primal-side probe. `subgradient` is a subgradient of F at `candidate`
/// (C - rho v v^T when the penalty is active, C otherwise); probe points are
/// affine-feasible perturbations of the candidate.
ProbeReport model_invariant_probe(const BundleModel& model_next, const BundleModel& model_prev,
                                  const SdpProblem& p, double F_at_candidate,
                                  const SymMatrix& candidate, const SymMatrix& subgradient,
                                  double alpha, const SymMatrix& omega_prev, int points,
                                  std::uint64_t seed);

/// Dual-side probe over y in R^m; `subgradient` is -b + rho A(v v^T) when the
/// penalty is active, -b otherwise.
ProbeReport model_invariant_probe(const BundleModel& model_next, const BundleModel& model_prev,
                                  const SdpProblem& p, double F_at_candidate, const Vec& candidate,
                                  const Vec& subgradient, double alpha, const Vec& omega_prev,
                                  int points, std::uint64_t seed);

}  // namespace sbsdp
