#include "sbsdp/penalty.hpp"

#include <algorithm>

#include "sbsdp/errors.hpp"
#include "sbsdp/sym_eig.hpp"

namespace sbsdp {

PenaltyEval eval_primal_penalized(const SdpProblem& p, double rho, const SymMatrix& X) {
    if (X.order() != p.n) throw InvalidInput("eval_primal_penalized: dimension mismatch");
    if (rho <= 0.0) throw InvalidInput("eval_primal_penalized: rho must be positive");
    EigenDecomp d = eig_sym(X);
    PenaltyEval out;
    out.lambda_max = -d.lambda_min();  // lambda_max(-X)
    out.top_vec.assign(d.vectors.vec(p.n - 1), d.vectors.vec(p.n - 1) + p.n);
    out.value = SymMatrix::inner(p.C, X) + rho * std::max(out.lambda_max, 0.0);
    return out;
}

PenaltyEval eval_dual_penalized(const SdpProblem& p, double rho, const Vec& y) {
    if (y.size() != static_cast<std::size_t>(p.m)) throw InvalidInput("eval_dual_penalized: dimension mismatch");
    if (rho <= 0.0) throw InvalidInput("eval_dual_penalized: rho must be positive");
    SymMatrix G = apply_At(p, y);
    G.add_scaled(p.C, -1.0);
    EigenDecomp d = eig_sym(G);
    PenaltyEval out;
    out.lambda_max = d.lambda_max();
    out.top_vec.assign(d.vectors.vec(0), d.vectors.vec(0) + p.n);
    out.value = -vec_dot(p.b, y) + rho * std::max(out.lambda_max, 0.0);
    return out;
}

double maxcut_rho_dual(int n) {
    if (n < 1) throw InvalidInput("maxcut_rho_dual: n must be >= 1");
    return 2.0 * n + 2.0;
}

double maxcut_rho_primal(const SymMatrix& L) {
    const int n = L.order();
    double lmin = eig_sym(L).lambda_min();
    return 2.0 * (0.25 * L.trace() - 0.25 * n * std::min(0.0, lmin)) + 2.0;
}

double sos_sphere_rho(int k, double R_bar) {
    if (k < 1) throw InvalidInput("sos_sphere_rho: k must be >= 1");
    if (R_bar < 0.0) throw InvalidInput("sos_sphere_rho: R_bar must be nonnegative");
    double rho = 1.0;
    for (int i = 0; i < k; ++i) rho *= 1.0 + R_bar;
    return rho;
}

double rho_from_known(const KnownSolution& sol, PenaltySide side) {
    return side == PenaltySide::Primal ? 2.0 * sol.Z_star.trace() + 2.0
                                       : 2.0 * sol.X_star.trace() + 2.0;
}

}  // namespace sbsdp
