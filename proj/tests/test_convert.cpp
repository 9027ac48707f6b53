#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sbsdp/convert.hpp"
#include "sbsdp/errors.hpp"
#include "sbsdp/generators.hpp"
#include "support/helpers.hpp"

using namespace sbsdp;
using namespace sbsdp::testing;

TEST_CASE("svec/smat preserve the trace inner product") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        SymMatrix A = random_sym(5, rng), B = random_sym(5, rng);
        CHECK(vec_dot(svec(A), svec(B)) ==
              doctest::Approx(SymMatrix::inner(A, B)).epsilon(1e-12));
        SymMatrix back = smat(5, svec(A));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                CHECK(back(i, j) == doctest::Approx(A(i, j)).epsilon(1e-14));
    }
}

TEST_CASE("primal_to_dual: dimension count and data relations") {
    // n=2, m=1, A1=I: null-space dimension p = 3 - 1 = 2
    SdpProblem p(SymMatrix::diag({1.0, 2.0}), {SymMatrix::identity(2)}, Vec{2.0});
    Conversion conv = convert_primal_to_dual(p);
    CHECK(conv.nullspace_dim == 2);
    CHECK(conv.problem.m == 2);
    CHECK(conv.problem.n == 2);

    // X_p is the least-norm solution of tr(X) = 2, i.e. identity
    CHECK(conv.feasible_point(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(conv.feasible_point(0, 1) == doctest::Approx(0.0).epsilon(1e-12));

    // converted constraints are orthonormal and orthogonal to A
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(SymMatrix::inner(conv.problem.A[i], p.A[0])) <= 1e-12);
        CHECK(SymMatrix::inner(conv.problem.A[i], conv.problem.A[i]) ==
              doctest::Approx(1.0).epsilon(1e-12));
        // b'_i = -<N_i, C> with A'_i = -N_i
        CHECK(conv.problem.b[i] ==
              doctest::Approx(SymMatrix::inner(conv.problem.A[i], p.C)).epsilon(1e-12));
    }
    CHECK(conv.objective_offset ==
          doctest::Approx(SymMatrix::inner(p.C, conv.feasible_point)).epsilon(1e-12));
}

TEST_CASE("dual_to_primal: basis count, orthogonality, feasible point") {
    std::mt19937_64 rng(5);
    GeneratedInstance inst = gen_random_sdp(5, 4, 2, 77);
    Conversion conv = convert_dual_to_primal(inst.problem);
    CHECK(conv.nullspace_dim == 5 * 6 / 2 - 4);
    for (const auto& Gi : conv.problem.A)
        for (const auto& Aj : inst.problem.A)
            CHECK(std::abs(SymMatrix::inner(Gi, Aj)) <= 1e-12);
    // A(X_f) = b
    Vec ax = apply_A(inst.problem, conv.feasible_point);
    for (int i = 0; i < inst.problem.m; ++i)
        CHECK(ax[i] == doctest::Approx(inst.problem.b[i]).epsilon(1e-10));
    // h = G(C)
    for (int i = 0; i < conv.problem.m; ++i)
        CHECK(conv.problem.b[i] ==
              doctest::Approx(SymMatrix::inner(conv.problem.A[i], inst.problem.C)).epsilon(1e-12));
}

TEST_CASE("conversion error paths") {
    // fully determined: n=2, m=3 with an independent basis of S^2
    SymMatrix E11(2), E22(2), E12(2);
    E11.set(0, 0, 1.0);
    E22.set(1, 1, 1.0);
    E12.set(0, 1, 1.0);
    SdpProblem full(SymMatrix::identity(2), {E11, E22, E12}, Vec{1.0, 1.0, 0.0});
    CHECK_THROWS_AS(convert_primal_to_dual(full), DegenerateConversion);

    SymMatrix A1 = E11;
    SdpProblem dep(SymMatrix::identity(2), {A1, A1}, Vec{1.0, 1.0});
    CHECK_THROWS_AS(convert_primal_to_dual(dep), RankDeficient);
}
