#include "sbsdp/bundle_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sbsdp/errors.hpp"
#include "sbsdp/penalty.hpp"

namespace sbsdp {

BundleModel init_model(const SymMatrix& M0, int r_p, int r_c, double rho) {
    if (r_p < 0 || r_c < 1) throw InvalidInput("init_model: need r_p >= 0 and r_c >= 1");
    if (r_p + r_c > M0.order()) throw InvalidInput("init_model: r_p + r_c exceeds matrix order");
    if (rho <= 0.0) throw InvalidInput("init_model: rho must be positive");
    BundleModel model;
    model.r_p = r_p;
    model.r_c = r_c;
    model.rho = rho;
    model.P = top_eigvecs(M0, r_p + r_c);
    model.W_bar = SymMatrix::identity(M0.order());
    model.W_bar.scale(1.0 / M0.order());
    return model;
}

namespace {

// rho * max{0, <W_bar,G>, lambda_max(P^T G P)} for the linear inner max.
double inner_max(const BundleModel& model, const SymMatrix& G) {
    double best = std::max(0.0, SymMatrix::inner(model.W_bar, G));
    if (model.r() > 0) {
        SymMatrix T = congruence(model.P, G);
        best = std::max(best, eig_sym(T).lambda_max());
    }
    return model.rho * best;
}

}  // namespace

double eval_model_primal(const BundleModel& model, const SdpProblem& p, const SymMatrix& X) {
    if (X.order() != p.n) throw InvalidInput("eval_model_primal: dimension mismatch");
    SymMatrix negX = X;
    negX.scale(-1.0);
    return SymMatrix::inner(p.C, X) + inner_max(model, negX);
}

double eval_model_dual(const BundleModel& model, const SdpProblem& p, const Vec& y) {
    SymMatrix G = apply_At(p, y);
    G.add_scaled(p.C, -1.0);
    return -vec_dot(p.b, y) + inner_max(model, G);
}

SymMatrix assemble_W(const BundleModel& model, double gamma, const SymMatrix& S) {
    if (S.order() != std::max(model.r(), 1))
        throw InvalidInput("assemble_W: S order does not match model rank");
    SymMatrix W = model.W_bar;
    W.scale(gamma);
    // P S P^T through S's eigen-decomposition: sum_k lambda_k (P q_k)(P q_k)^T
    const int r = model.r();
    EigenDecomp sd = eig_sym(S);
    for (int k = 0; k < r; ++k) {
        Vec u(model.P.dim, 0.0);
        for (int l = 0; l < r; ++l)
            kernels::axpy(sd.vectors.vec(k)[l], model.P.vec(l), u.data(), model.P.dim);
        W.add_outer(u.data(), sd.values[k]);
    }
    return W;
}

BundleModel update_model(const BundleModel& model, const SubqpSolution& sol, const Basis& V_new) {
    if (V_new.dim != model.W_bar.order()) throw InvalidInput("update_model: dimension mismatch");
    if (sol.S.order() != std::max(model.r(), 1)) throw InvalidInput("update_model: S order mismatch");

    const int r = model.r();
    EigenDecomp sd = eig_sym(sol.S);
    const int keep = std::min(model.r_p, r);

    // columns of P*Q1 (the kept top-r_p eigen-directions of S*)
    Basis PQ1(V_new.dim, keep);
    for (int k = 0; k < keep; ++k) {
        for (int l = 0; l < r; ++l)
            kernels::axpy(sd.vectors.vec(k)[l], model.P.vec(l), PQ1.vec(k), V_new.dim);
    }

    BundleModel next;
    next.r_p = model.r_p;
    next.r_c = model.r_c;
    next.rho = model.rho;

    if (keep == 0) {
        next.P = V_new;  // already orthonormal eigenvectors
    } else {
        Basis joined(V_new.dim, V_new.count + keep);
        std::copy(V_new.data.begin(), V_new.data.end(), joined.data.begin());
        std::copy(PQ1.data.begin(), PQ1.data.end(),
                  joined.data.begin() + static_cast<std::size_t>(V_new.count) * V_new.dim);
        next.P = orth(joined);
    }

    double tr_sigma2 = 0.0;
    for (int k = keep; k < r; ++k) tr_sigma2 += sd.values[k];
    const double denom = sol.gamma + tr_sigma2;
    if (denom <= 1e-12) {
        next.W_bar = model.W_bar;  // the vanished aggregate had zero weight
    } else {
        SymMatrix W = model.W_bar;
        W.scale(sol.gamma);
        for (int k = keep; k < r; ++k) {
            Vec u(V_new.dim, 0.0);
            for (int l = 0; l < r; ++l)
                kernels::axpy(sd.vectors.vec(k)[l], model.P.vec(l), u.data(), V_new.dim);
            W.add_outer(u.data(), sd.values[k]);
        }
        W.scale(1.0 / denom);
        next.W_bar = std::move(W);
    }
    return next;
}

double ProbeReport::worst() const {
    return std::max({worst_minorant, worst_subgradient, worst_model_subgradient});
}

namespace {

double rel_violation(double actual, double required) {
    // positive when `actual < required` beyond scale
    return std::max(0.0, required - actual) / (1.0 + std::abs(actual) + std::abs(required));
}

}  // namespace

ProbeReport model_invariant_probe(const BundleModel& model_next, const BundleModel& model_prev,
                                  const SdpProblem& p, double F_at_candidate,
                                  const SymMatrix& candidate, const SymMatrix& subgradient,
                                  double alpha, const SymMatrix& omega_prev, int points,
                                  std::uint64_t seed) {
    ProbeReport rep;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double model_prev_at_cand = eval_model_primal(model_prev, p, candidate);
    const double step = 1.0 + candidate.frob_norm();

    for (int k = 0; k <= points; ++k) {
        SymMatrix X = candidate;
        if (k > 0) {
            // random affine-feasible perturbation: project a random symmetric
            // direction onto null(A) through the Gram factorization
            SymMatrix D(p.n);
            for (int i = 0; i < p.n; ++i)
                for (int j = i; j < p.n; ++j) D.set(i, j, gauss(rng));
            Vec coef = p.gram().solve(apply_A(p, D));
            D.add_scaled(apply_At(p, coef), -1.0);
            double nrm = D.frob_norm();
            if (nrm > 0.0) X.add_scaled(D, step / nrm * (0.1 + 0.9 * (k % 5) / 4.0));
        }

        double F_X = eval_primal_penalized(p, model_next.rho, X).value;
        double model_X = eval_model_primal(model_next, p, X);
        rep.worst_minorant = std::max(rep.worst_minorant, rel_violation(F_X, model_X));

        SymMatrix diff = X;
        diff.add_scaled(candidate, -1.0);
        double lin_sub = F_at_candidate + SymMatrix::inner(subgradient, diff);
        rep.worst_subgradient = std::max(rep.worst_subgradient, rel_violation(model_X, lin_sub));

        SymMatrix s_dir = omega_prev;
        s_dir.add_scaled(candidate, -1.0);
        double lin_model = model_prev_at_cand + alpha * SymMatrix::inner(s_dir, diff);
        rep.worst_model_subgradient =
            std::max(rep.worst_model_subgradient, rel_violation(model_X, lin_model));
        ++rep.points;
    }
    return rep;
}

ProbeReport model_invariant_probe(const BundleModel& model_next, const BundleModel& model_prev,
                                  const SdpProblem& p, double F_at_candidate, const Vec& candidate,
                                  const Vec& subgradient, double alpha, const Vec& omega_prev,
                                  int points, std::uint64_t seed) {
    ProbeReport rep;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double model_prev_at_cand = eval_model_dual(model_prev, p, candidate);
    const double step = 1.0 + vec_norm(candidate);

    for (int k = 0; k <= points; ++k) {
        Vec y = candidate;
        if (k > 0) {
            Vec d(p.m);
            for (double& v : d) v = gauss(rng);
            double nrm = vec_norm(d);
            if (nrm > 0.0)
                kernels::axpy(step / nrm * (0.1 + 0.9 * (k % 5) / 4.0), d.data(), y.data(), p.m);
        }

        double F_y = eval_dual_penalized(p, model_next.rho, y).value;
        double model_y = eval_model_dual(model_next, p, y);
        rep.worst_minorant = std::max(rep.worst_minorant, rel_violation(F_y, model_y));

        Vec diff = y;
        kernels::axpy(-1.0, candidate.data(), diff.data(), p.m);
        double lin_sub = F_at_candidate + vec_dot(subgradient, diff);
        rep.worst_subgradient = std::max(rep.worst_subgradient, rel_violation(model_y, lin_sub));

        Vec s_dir = omega_prev;
        kernels::axpy(-1.0, candidate.data(), s_dir.data(), p.m);
        double lin_model = model_prev_at_cand + alpha * vec_dot(s_dir, diff);
        rep.worst_model_subgradient =
            std::max(rep.worst_model_subgradient, rel_violation(model_y, lin_model));
        ++rep.points;
    }
    return rep;
}

}  // namespace sbsdp
