#include "sbsdp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sbsdp/errors.hpp"
#include "sbsdp/subqp.hpp"
#include "sbsdp/sym_eig.hpp"

namespace sbsdp {

void SolverConfig::validate_against(int n) const {
    if (r_c < 1) throw InvalidInput("config: r_c must be >= 1");
    if (r_p < 0) throw InvalidInput("config: r_p must be >= 0");
    if (r_p + r_c > n) throw InvalidInput("config: r_p + r_c must not exceed n");
    if (rho.rho <= 0.0) throw InvalidInput("config: rho must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidInput("config: beta must be in (0,1)");
    if (!(m_l > 0.0 && m_l < beta)) throw InvalidInput("config: m_l must be in (0,beta)");
    if (!(m_r > beta && m_r < 1.0)) throw InvalidInput("config: m_r must be in (beta,1)");
    if (!(alpha_min > 0.0 && alpha_max > 0.0 && alpha_min <= alpha0 && alpha0 <= alpha_max))
        throw InvalidInput("config: need alpha_min <= alpha0 <= alpha_max, all positive");
    if (N_min < 1) throw InvalidInput("config: N_min must be >= 1");
    if (tol < 0.0) throw InvalidInput("config: tol must be nonnegative");
    if (max_iter < 1) throw InvalidInput("config: max_iter must be >= 1");
    if (stall_limit < 1) throw InvalidInput("config: stall_limit must be >= 1");
}

const char* step_name(StepType s) {
    switch (s) {
        case StepType::Descent: return "Descent";
        case StepType::Null: return "Null";
        case StepType::AffineCorrection: return "AffineCorrection";
    }
    return "?";
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIter: return "MaxIter";
        case SolveStatus::SubproblemStall: return "SubproblemStall";
    }
    return "?";
}

bool descent_test(double F_ref, double model_at_cand, double F_at_cand, double beta) {
    return beta * (F_ref - model_at_cand) <= F_ref - F_at_cand;
}

double adapt_alpha(double alpha, double predicted_drop, double actual_drop, int consecutive_nulls,
                   const SolverConfig& cfg) {
    if (cfg.m_l * predicted_drop >= actual_drop && consecutive_nulls >= cfg.N_min)
        return std::min(2.0 * alpha, cfg.alpha_max);
    if (cfg.m_r * predicted_drop <= actual_drop) return std::max(alpha / 2.0, cfg.alpha_min);
    return alpha;
}

std::array<double, 5> suboptimality(const SdpProblem& p, const SymMatrix& X, const Vec& y,
                                    const SymMatrix& Z) {
    std::array<double, 5> eta{};
    Vec ax = apply_A(p, X);
    kernels::axpy(-1.0, p.b.data(), ax.data(), p.m);
    eta[0] = vec_norm(ax) / (1.0 + vec_norm(p.b));
    eta[1] = std::abs(std::min(0.0, eig_sym(X).lambda_min()));
    SymMatrix R = apply_At(p, y);
    R.add_scaled(Z, 1.0);
    R.add_scaled(p.C, -1.0);
    eta[2] = R.frob_norm() / (1.0 + p.C.frob_norm());
    eta[3] = std::abs(std::min(0.0, eig_sym(Z).lambda_min()));
    double cx = SymMatrix::inner(p.C, X);
    double by = vec_dot(p.b, y);
    eta[4] = std::abs(cx - by) / (1.0 + std::abs(cx) + std::abs(by));
    return eta;
}

namespace {

double max_eta(const std::array<double, 5>& eta) {
    return *std::max_element(eta.begin(), eta.end());
}

bool objective_target_met(const SolverConfig& cfg, double objective) {
    if (!cfg.objective_target) return true;
    double t = *cfg.objective_target;
    return std::abs(objective - t) <= cfg.objective_gap_tol * std::max(1e-300, std::abs(t));
}

std::int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Top r eigenvectors of -M = bottom eigenvectors of M, in descending order
// of -M's spectrum.
Basis bottom_eigvecs(const EigenDecomp& d, int r) {
    const int n = d.vectors.dim;
    Basis B(n, r);
    for (int k = 0; k < r; ++k)
        std::copy(d.vectors.vec(n - 1 - k), d.vectors.vec(n - 1 - k) + n, B.vec(k));
    return B;
}

}  // namespace

SolveReport sbmp_solve(const SdpProblem& p, const SolverConfig& cfg, const SymMatrix& Omega0) {
    cfg.validate_against(p.n);
    if (Omega0.order() != p.n) throw InvalidInput("sbmp_solve: Omega0 order mismatch");
    const double rho = cfg.rho.rho;
    const std::int64_t t0 = now_ns();

    SolveReport rep;
    SymMatrix Omega = Omega0;

    SymMatrix negOmega = Omega;
    negOmega.scale(-1.0);
    BundleModel model = init_model(negOmega, cfg.r_p, cfg.r_c, rho);

    double F_ref = eval_primal_penalized(p, rho, Omega).value;
    bool omega_affine_feasible;
    {
        Vec res = apply_A(p, Omega);
        kernels::axpy(-1.0, p.b.data(), res.data(), p.m);
        omega_affine_feasible = vec_norm(res) <= 1e-13 * (1.0 + vec_norm(p.b));
    }

    double alpha = cfg.alpha0;
    int consecutive_nulls = 0;
    int consecutive_stalls = 0;
    rep.status = SolveStatus::MaxIter;

    for (int t = 0; t < cfg.max_iter; ++t) {
        auto [qp, yrec] = build_sbmp_subqp(p, model, Omega, alpha);
        SubqpSolution sol = solve_subqp(qp, cfg.subqp_tol, cfg.subqp_max_iter);
        if (sol.stalled) {
            if (++consecutive_stalls >= cfg.stall_limit) {
                rep.status = SolveStatus::SubproblemStall;
            }
        } else {
            consecutive_stalls = 0;
        }
        sol.W_star = assemble_W(model, sol.gamma, sol.S);
        sol.y_star = recover_y(yrec, sol.gamma, sol.S);

        SymMatrix cand = recover_primal_candidate(Omega, alpha, sol.W_star, sol.y_star, p);
        EigenDecomp cand_eig = eig_sym(cand);
        double F_cand = SymMatrix::inner(p.C, cand) +
                        rho * std::max(0.0, -cand_eig.lambda_min());
        double model_at_cand = eval_model_primal(model, p, cand);
        double predicted = F_ref - model_at_cand;
        double actual = F_ref - F_cand;

        StepType step;
        if (t == 0 && !omega_affine_feasible) {
            step = StepType::AffineCorrection;
        } else if (!sol.stalled && descent_test(F_ref, model_at_cand, F_cand, cfg.beta)) {
            step = StepType::Descent;
        } else {
            // a stalled subproblem's best iterate is treated as a null-step candidate
            step = StepType::Null;
        }

        const BundleModel model_prev = model;
        const SymMatrix omega_prev = Omega;
        if (step != StepType::Null) {
            Omega = cand;
            F_ref = F_cand;
            omega_affine_feasible = true;
        }
        if (step == StepType::Descent) consecutive_nulls = 0;
        if (step == StepType::Null) ++consecutive_nulls;

        Basis V_new = bottom_eigvecs(cand_eig, cfg.r_c);
        model = update_model(model, sol, V_new);

        if (step != StepType::AffineCorrection) {
            double alpha_next = adapt_alpha(alpha, predicted, actual, consecutive_nulls, cfg);
            // an increase consumes the null streak, keeping increases to at
            // most one per N_min consecutive nulls
            if (alpha_next > alpha) consecutive_nulls = 0;
            alpha = alpha_next;
        }

        if (cfg.invariant_probe) {
            SymMatrix g = p.C;  // subgradient of F at the candidate
            if (-cand_eig.lambda_min() > 0.0) {
                const double* v = cand_eig.vectors.vec(p.n - 1);
                g.add_outer(v, -rho);
            }
            ProbeReport pr = model_invariant_probe(model, model_prev, p, F_cand, cand, g, alpha,
                                                   omega_prev, cfg.probe_points,
                                                   cfg.seed + static_cast<std::uint64_t>(t));
            rep.worst_probe_violation = std::max(rep.worst_probe_violation, pr.worst());
        }

        IterRecord recd;
        recd.t = t;
        recd.objective = F_ref;
        recd.model_value = model_at_cand;
        recd.step = step;
        recd.alpha = alpha;
        recd.eta = suboptimality(p, Omega, sol.y_star, sol.W_star);
        recd.wall_ns = now_ns() - t0;
        rep.history.push_back(recd);
        rep.iterations = t + 1;

        rep.final_X = Omega;
        rep.final_y = sol.y_star;
        rep.final_W = sol.W_star;
        rep.final_Z = sol.W_star;
        rep.final_eta = recd.eta;
        rep.objective = F_ref;
        rep.linear_objective = SymMatrix::inner(p.C, Omega);

        if (rep.status == SolveStatus::SubproblemStall) break;
        if (max_eta(recd.eta) <= cfg.tol && objective_target_met(cfg, F_ref)) {
            rep.status = SolveStatus::Converged;
            break;
        }
    }
    return rep;
}

SolveReport sbmp_solve(const SdpProblem& p, const SolverConfig& cfg) {
    return sbmp_solve(p, cfg, SymMatrix::identity(p.n));
}

SolveReport sbmd_solve(const SdpProblem& p, const SolverConfig& cfg, const Vec& omega0) {
    cfg.validate_against(p.n);
    if (omega0.size() != static_cast<std::size_t>(p.m))
        throw InvalidInput("sbmd_solve: omega0 length mismatch");
    const double rho = cfg.rho.rho;
    const std::int64_t t0 = now_ns();

    SolveReport rep;
    Vec omega = omega0;

    SymMatrix G0 = apply_At(p, omega);
    G0.add_scaled(p.C, -1.0);
    BundleModel model = init_model(G0, cfg.r_p, cfg.r_c, rho);

    double F_ref = eval_dual_penalized(p, rho, omega).value;
    double alpha = cfg.alpha0;
    int consecutive_nulls = 0;
    int consecutive_stalls = 0;
    rep.status = SolveStatus::MaxIter;

    for (int t = 0; t < cfg.max_iter; ++t) {
        SubQp qp = build_sbmd_subqp(p, model, omega, alpha);
        SubqpSolution sol = solve_subqp(qp, cfg.subqp_tol, cfg.subqp_max_iter);
        if (sol.stalled) {
            if (++consecutive_stalls >= cfg.stall_limit) {
                rep.status = SolveStatus::SubproblemStall;
            }
        } else {
            consecutive_stalls = 0;
        }
        sol.W_star = assemble_W(model, sol.gamma, sol.S);

        // y*_{t+1} = omega + (1/alpha)(b - A(W*))
        Vec cand = omega;
        Vec aW = apply_A(p, sol.W_star);
        for (int i = 0; i < p.m; ++i) cand[i] += (p.b[i] - aW[i]) / alpha;

        PenaltyEval cand_eval = eval_dual_penalized(p, rho, cand);
        double F_cand = cand_eval.value;
        double model_at_cand = eval_model_dual(model, p, cand);
        double predicted = F_ref - model_at_cand;
        double actual = F_ref - F_cand;

        StepType step = (!sol.stalled && descent_test(F_ref, model_at_cand, F_cand, cfg.beta))
                            ? StepType::Descent
                            : StepType::Null;
        const BundleModel model_prev = model;
        const Vec omega_prev = omega;
        if (step == StepType::Descent) {
            omega = cand;
            F_ref = F_cand;
            consecutive_nulls = 0;
        } else {
            ++consecutive_nulls;
        }

        // top r_c eigenvectors of A*(y*) - C
        SymMatrix Gc = apply_At(p, cand);
        Gc.add_scaled(p.C, -1.0);
        EigenDecomp gc_eig = eig_sym(Gc);
        Basis V_new(p.n, cfg.r_c);
        for (int k = 0; k < cfg.r_c; ++k)
            std::copy(gc_eig.vectors.vec(k), gc_eig.vectors.vec(k) + p.n, V_new.vec(k));
        model = update_model(model, sol, V_new);

        {
            double alpha_next = adapt_alpha(alpha, predicted, actual, consecutive_nulls, cfg);
            if (alpha_next > alpha) consecutive_nulls = 0;
            alpha = alpha_next;
        }

        if (cfg.invariant_probe) {
            Vec g = p.b;  // subgradient of F_d at the candidate
            kernels::scal(-1.0, g.data(), p.m);
            if (cand_eval.lambda_max > 0.0) {
                SymMatrix vv(p.n);
                vv.add_outer(cand_eval.top_vec.data(), 1.0);
                Vec avv = apply_A(p, vv);
                kernels::axpy(rho, avv.data(), g.data(), p.m);
            }
            ProbeReport pr = model_invariant_probe(model, model_prev, p, F_cand, cand, g, alpha,
                                                   omega_prev, cfg.probe_points,
                                                   cfg.seed + static_cast<std::uint64_t>(t));
            rep.worst_probe_violation = std::max(rep.worst_probe_violation, pr.worst());
        }

        // stopping triple: X = W*, y = omega_{t+1}, Z = C - A*(omega_{t+1})
        SymMatrix Z = apply_At(p, omega);
        Z.scale(-1.0);
        Z.add_scaled(p.C, 1.0);

        IterRecord recd;
        recd.t = t;
        recd.objective = F_ref;
        recd.model_value = model_at_cand;
        recd.step = step;
        recd.alpha = alpha;
        recd.eta = suboptimality(p, sol.W_star, omega, Z);
        recd.wall_ns = now_ns() - t0;
        rep.history.push_back(recd);
        rep.iterations = t + 1;

        rep.final_X = sol.W_star;
        rep.final_y = omega;
        rep.final_W = sol.W_star;
        rep.final_Z = Z;
        rep.final_eta = recd.eta;
        rep.objective = F_ref;
        rep.linear_objective = vec_dot(p.b, omega);

        if (rep.status == SolveStatus::SubproblemStall) break;
        if (max_eta(recd.eta) <= cfg.tol && objective_target_met(cfg, F_ref)) {
            rep.status = SolveStatus::Converged;
            break;
        }
    }
    return rep;
}

SolveReport sbmd_solve(const SdpProblem& p, const SolverConfig& cfg) {
    return sbmd_solve(p, cfg, Vec(p.m, 0.0));
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string history_csv(const std::vector<IterRecord>& history, bool zero_wall_ns) {
    std::ostringstream out;
    out << "t,objective,model_value,step,alpha,eta1,eta2,eta3,eta4,eta5,wall_ns\n";
    for (const auto& r : history) {
        out << r.t << ',' << fmt_double(r.objective) << ',' << fmt_double(r.model_value) << ','
            << step_name(r.step) << ',' << fmt_double(r.alpha);
        for (double e : r.eta) out << ',' << fmt_double(e);
        out << ',' << (zero_wall_ns ? 0 : r.wall_ns) << '\n';
    }
    return out.str();
}

std::string history_jsonl(const std::vector<IterRecord>& history, bool zero_wall_ns) {
    std::ostringstream out;
    for (const auto& r : history) {
        out << "{\"t\":" << r.t << ",\"objective\":" << fmt_double(r.objective)
            << ",\"model_value\":" << fmt_double(r.model_value) << ",\"step\":\""
            << step_name(r.step) << "\",\"alpha\":" << fmt_double(r.alpha) << ",\"eta\":["
            << fmt_double(r.eta[0]) << ',' << fmt_double(r.eta[1]) << ',' << fmt_double(r.eta[2])
            << ',' << fmt_double(r.eta[3]) << ',' << fmt_double(r.eta[4]) << "],\"wall_ns\":"
            << (zero_wall_ns ? 0 : r.wall_ns) << "}\n";
    }
    return out.str();
}

}  // namespace sbsdp
