#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sbsdp/errors.hpp"
#include "sbsdp/generators.hpp"
#include "sbsdp/solver.hpp"
#include "support/helpers.hpp"

using namespace sbsdp;
using namespace sbsdp::testing;

namespace {

SolverConfig base_config(double rho) {
    SolverConfig cfg;
    cfg.rho = {rho, RhoSource::UserGiven};
    return cfg;
}

// min <I,X> s.t. <e1 e1^T, X> = 1, X PSD: optimum 1 at X* = e1 e1^T
SdpProblem two_by_two() {
    SymMatrix A1(2);
    A1.set(0, 0, 1.0);
    return SdpProblem(SymMatrix::identity(2), {A1}, Vec{1.0});
}

}  // namespace

TEST_CASE("descent_test") {
    CHECK(descent_test(10.0, 8.0, 8.5, 0.5));         // actual 1.5 >= 0.5*2
    CHECK_FALSE(descent_test(10.0, 8.0, 9.5, 0.5));   // actual 0.5 < 1.0
    CHECK(descent_test(10.0, 8.0, 9.0, 0.5));         // boundary counts as descent
}

TEST_CASE("adapt_alpha") {
    SolverConfig cfg = base_config(1.0);
    // m_l branch with enough consecutive nulls doubles alpha
    CHECK(adapt_alpha(1.0, 1.0, 0.0, 12, cfg) == 2.0);
    // m_r branch halves but clamps at alpha_min
    CHECK(adapt_alpha(1e-5, 1.0, 0.9, 0, cfg) == 1e-5);
    // neither branch: unchanged
    CHECK(adapt_alpha(1.0, 1.0, 0.5, 0, cfg) == 1.0);
    // cap at alpha_max
    CHECK(adapt_alpha(80.0, 1.0, 0.0, 10, cfg) == 100.0);
}

TEST_CASE("solver config validation") {
    SolverConfig cfg = base_config(1.0);
    cfg.r_c = 0;
    CHECK_THROWS_AS(cfg.validate_against(5), InvalidInput);
    cfg = base_config(1.0);
    cfg.m_l = 0.5;  // >= beta
    CHECK_THROWS_AS(cfg.validate_against(5), InvalidInput);
    cfg = base_config(-1.0);
    CHECK_THROWS_AS(cfg.validate_against(5), InvalidInput);
    cfg = base_config(1.0);
    cfg.r_p = 5;
    CHECK_THROWS_AS(cfg.validate_against(5), InvalidInput);
}

TEST_CASE("suboptimality") {
    GeneratedInstance inst = gen_random_sdp(8, 4, 3, 5);
    auto eta = suboptimality(inst.problem, inst.solution.X_star, inst.solution.y_star,
                             inst.solution.Z_star);
    for (double e : eta) CHECK(e <= 1e-10);

    // X = -I: eta2 = 1
    SymMatrix negI = SymMatrix::identity(8);
    negI.scale(-1.0);
    auto eta2 = suboptimality(inst.problem, negI, inst.solution.y_star, inst.solution.Z_star);
    CHECK(eta2[1] == doctest::Approx(1.0).epsilon(1e-12));

    // random triple matches direct recomputation from the definitions
    std::mt19937_64 rng(3);
    SymMatrix X = random_sym(8, rng);
    Vec y = random_vec(4, rng);
    SymMatrix Z = random_sym(8, rng);
    auto e = suboptimality(inst.problem, X, y, Z);
    const SdpProblem& p = inst.problem;
    Vec ax(4);
    for (int i = 0; i < 4; ++i) ax[i] = brute_trace_inner(p.A[i], X) - p.b[i];
    CHECK(e[0] == doctest::Approx(vec_norm(ax) / (1.0 + vec_norm(p.b))).epsilon(1e-12));
    double cx = brute_trace_inner(p.C, X);
    double by = vec_dot(p.b, y);
    CHECK(e[4] ==
          doctest::Approx(std::abs(cx - by) / (1.0 + std::abs(cx) + std::abs(by))).epsilon(1e-12));
}

TEST_CASE("sbmp on the 2x2 analytic instance") {
    SdpProblem p = two_by_two();
    SolverConfig cfg = base_config(4.0);
    cfg.r_c = 1;
    cfg.tol = 1e-8;
    cfg.max_iter = 200;
    SolveReport rep = sbmp_solve(p, cfg);
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(rep.linear_objective == doctest::Approx(1.0).epsilon(1e-6));

    // eta1 <= 1e-8 for every t >= 1 and monotone descent objective
    for (std::size_t k = 1; k < rep.history.size(); ++k) {
        CHECK(rep.history[k].eta[0] <= 1e-8);
        if (rep.history[k].step == StepType::Descent)
            CHECK(rep.history[k].objective <= rep.history[k - 1].objective + 1e-12);
    }
}

TEST_CASE("sbmd on the 2x2 analytic instance") {
    SdpProblem p = two_by_two();
    SolverConfig cfg = base_config(4.0);  // 2 tr(X*) + 2 = 4
    cfg.r_c = 1;
    cfg.tol = 1e-8;
    cfg.max_iter = 300;
    SolveReport rep = sbmd_solve(p, cfg);
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(rep.linear_objective == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& it : rep.history) {
        CHECK(it.eta[2] <= 1e-8);   // dual affine feasibility is structural
        CHECK(it.eta[1] <= 1e-9);   // lambda_min(W*) >= -1e-9
    }
}

TEST_CASE("sbmd solves the triangle Max-Cut relaxation to value 0") {
    Graph tri{3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}};
    SdpProblem p = maxcut_sdp(tri);
    SolverConfig cfg = base_config(maxcut_rho_dual(3));
    cfg.r_c = 2;
    cfg.tol = 1e-7;
    cfg.max_iter = 400;
    SolveReport rep = sbmd_solve(p, cfg);
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(std::abs(rep.linear_objective) <= 1e-6);
}

TEST_CASE("rank-condition pattern on a generated instance") {
    // rank_X = 17 of n = 20 -> sigma_p = 3: SBMP(0,3) converges fast
    GeneratedInstance inst = gen_random_sdp(20, 10, 17, 42);
    SolverConfig cfg = base_config(2.0 * inst.solution.Z_star.trace() + 2.0);
    cfg.r_c = 3;
    cfg.tol = 1e-6;
    cfg.max_iter = 250;
    SolveReport rep = sbmp_solve(inst.problem, cfg);
    CHECK(rep.status == SolveStatus::Converged);
    double fstar = SymMatrix::inner(inst.problem.C, inst.solution.X_star);
    CHECK(std::abs(rep.linear_objective - fstar) <= 1e-4 * (1.0 + std::abs(fstar)));

    // mirrored: rank_X = 3 -> sigma_d = 3: SBMD(0,3) converges
    GeneratedInstance inst2 = gen_random_sdp(20, 10, 3, 43);
    SolverConfig cfg2 = base_config(2.0 * inst2.solution.X_star.trace() + 2.0);
    cfg2.r_c = 3;
    cfg2.tol = 1e-6;
    cfg2.max_iter = 250;
    SolveReport rep2 = sbmd_solve(inst2.problem, cfg2);
    CHECK(rep2.status == SolveStatus::Converged);
    double dstar = vec_dot(inst2.problem.b, inst2.solution.y_star);
    CHECK(std::abs(rep2.linear_objective - dstar) <= 1e-4 * (1.0 + std::abs(dstar)));
}

TEST_CASE("sbmp leaves an infeasible start via the affine-correction step") {
    GeneratedInstance inst = gen_random_sdp(10, 5, 8, 7);
    SolverConfig cfg = base_config(2.0 * inst.solution.Z_star.trace() + 2.0);
    cfg.r_c = 2;
    cfg.max_iter = 5;
    cfg.tol = 0.0;  // force all iterations
    SolveReport rep = sbmp_solve(inst.problem, cfg);  // Omega0 = I is infeasible here
    REQUIRE(!rep.history.empty());
    CHECK(rep.history[0].step == StepType::AffineCorrection);
    for (std::size_t k = 1; k < rep.history.size(); ++k) CHECK(rep.history[k].eta[0] <= 1e-8);
}

TEST_CASE("history export formats") {
    IterRecord r;
    r.t = 0;
    r.objective = 1.5;
    r.model_value = 1.25;
    r.step = StepType::Descent;
    r.alpha = 2.0;
    r.eta = {0.125, 0.0, 0.25, 0.0, 0.5};
    r.wall_ns = 12345;
    std::string csv = history_csv({r}, true);
    CHECK(csv == "t,objective,model_value,step,alpha,eta1,eta2,eta3,eta4,eta5,wall_ns\n"
                 "0,1.5,1.25,Descent,2,0.125,0,0.25,0,0.5,0\n");
    std::string csv_t = history_csv({r}, false);
    CHECK(csv_t.find("12345") != std::string::npos);
    std::string jl = history_jsonl({r}, true);
    CHECK(jl.find("\"step\":\"Descent\"") != std::string::npos);
}

TEST_CASE("probe runs inside the solvers") {
    GeneratedInstance inst = gen_random_sdp(10, 5, 8, 21);
    SolverConfig cfg = base_config(2.0 * inst.solution.Z_star.trace() + 2.0);
    cfg.r_c = 2;
    cfg.tol = 1e-6;
    cfg.max_iter = 120;
    cfg.invariant_probe = true;
    cfg.probe_points = 8;
    SolveReport rep = sbmp_solve(inst.problem, cfg);
    CHECK(rep.worst_probe_violation <= 1e-8);

    GeneratedInstance inst2 = gen_random_sdp(10, 5, 2, 22);
    SolverConfig cfg2 = base_config(2.0 * inst2.solution.X_star.trace() + 2.0);
    cfg2.r_c = 2;
    cfg2.tol = 1e-6;
    cfg2.max_iter = 120;
    cfg2.invariant_probe = true;
    cfg2.probe_points = 8;
    SolveReport rep2 = sbmd_solve(inst2.problem, cfg2);
    CHECK(rep2.worst_probe_violation <= 1e-8);
}
