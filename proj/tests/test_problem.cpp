#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "sbsdp/errors.hpp"
#include "sbsdp/generators.hpp"
#include "sbsdp/problem.hpp"
#include "sbsdp/problem_io.hpp"
#include "support/helpers.hpp"

using namespace sbsdp;
using namespace sbsdp::testing;

namespace {

std::string temp_path(const char* stem) {
    return std::string("sbsdp_test_") + stem;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("apply_A trivial cases") {
    // A1 = I, X = I (n=3) -> (3)
    SdpProblem p1(SymMatrix::identity(3), {SymMatrix::identity(3)}, Vec{0.0});
    CHECK(apply_A(p1, SymMatrix::identity(3))[0] == doctest::Approx(3.0).epsilon(1e-15));

    // A1 = e1 e1^T, X = diag(4,7) -> (4)
    SymMatrix A1(2);
    A1.set(0, 0, 1.0);
    SdpProblem p2(SymMatrix::identity(2), {A1}, Vec{0.0});
    CHECK(apply_A(p2, SymMatrix::diag({4.0, 7.0}))[0] == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("apply_A matches the brute-force double loop") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        SdpProblem p = random_problem(3, 2, rng);
        SymMatrix X = random_sym(3, rng);
        Vec out = apply_A(p, X);
        for (int i = 0; i < p.m; ++i)
            CHECK(out[i] == doctest::Approx(brute_trace_inner(p.A[i], X)).epsilon(1e-12));
    }
}

TEST_CASE("apply_At trivial cases and adjoint identity") {
    std::mt19937_64 rng(29);
    SdpProblem p = random_problem(5, 3, rng);

    SymMatrix zero = apply_At(p, Vec(3, 0.0));
    CHECK(zero.frob_norm() == 0.0);

    SdpProblem single(SymMatrix::identity(2), {SymMatrix::identity(2)}, Vec{0.0});
    SymMatrix twoI = apply_At(single, Vec{2.0});
    CHECK(twoI(0, 0) == 2.0);
    CHECK(twoI(0, 1) == 0.0);

    for (int trial = 0; trial < 100; ++trial) {
        Vec y = random_vec(3, rng);
        SymMatrix X = random_sym(5, rng);
        double lhs = SymMatrix::inner(apply_At(p, y), X);
        double rhs = vec_dot(y, apply_A(p, X));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs)));
    }

    CHECK_THROWS_AS(apply_A(p, SymMatrix::identity(4)), InvalidInput);
    CHECK_THROWS_AS(apply_At(p, Vec(2, 0.0)), InvalidInput);
}

TEST_CASE("apply_A of apply_At composition reproduces the Gram matrix") {
    std::mt19937_64 rng(31);
    SdpProblem p = random_problem(6, 4, rng);
    for (int i = 0; i < p.m; ++i) {
        Vec ei(p.m, 0.0);
        ei[i] = 1.0;
        Vec col = apply_A(p, apply_At(p, ei));
        for (int j = 0; j < p.m; ++j)
            CHECK(std::abs(col[j] - SymMatrix::inner(p.A[i], p.A[j])) <= 1e-10);
    }
}

TEST_CASE("validate: explicit trace row") {
    SdpProblem p(SymMatrix::identity(3), {SymMatrix::identity(3)}, Vec{7.0});
    ValidationReport rep = validate(p);
    CHECK(rep.independent);
    CHECK(rep.const_trace_primal);
    CHECK(rep.trace_k == doctest::Approx(7.0).epsilon(1e-12));
    CHECK_FALSE(rep.const_trace_dual);
}

TEST_CASE("validate: Max-Cut structure has constant primal trace k = n") {
    Graph tri{3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}};
    SdpProblem p = maxcut_sdp(tri);
    ValidationReport rep = validate(p);
    CHECK(rep.independent);
    CHECK(rep.const_trace_primal);
    CHECK(rep.trace_k == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("validate: duplicated constraint drops the Gram rank") {
    std::mt19937_64 rng(37);
    SymMatrix A1 = random_sym(4, rng);
    SdpProblem p(random_sym(4, rng), {A1, A1, random_sym(4, rng)}, Vec(3, 0.0));
    ValidationReport rep = validate(p);
    CHECK(rep.gram_rank == 2);
    CHECK_FALSE(rep.independent);
    CHECK_THROWS_AS(p.gram(), RankDeficient);
}

TEST_CASE("json round trip with and without solution") {
    std::mt19937_64 rng(41);
    GeneratedInstance inst = gen_random_sdp(5, 3, 2, 99);
    const std::string path = temp_path("roundtrip.json");

    write_json(inst.problem, path, &inst.solution);
    std::optional<KnownSolution> sol;
    SdpProblem p2 = read_json(path, sol);
    REQUIRE(sol.has_value());
    CHECK(p2.n == inst.problem.n);
    CHECK(p2.m == inst.problem.m);
    for (int i = 0; i < p2.n; ++i)
        for (int j = 0; j < p2.n; ++j) CHECK(p2.C(i, j) == inst.problem.C(i, j));
    for (int k = 0; k < p2.m; ++k) CHECK(p2.b[k] == inst.problem.b[k]);
    CHECK(sol->rank_X == 2);
    for (int i = 0; i < p2.n; ++i)
        for (int j = 0; j < p2.n; ++j) CHECK(sol->X_star(i, j) == inst.solution.X_star(i, j));

    // byte-stable re-serialization
    std::string first = read_text(path);
    write_json(p2, path, &*sol);
    CHECK(read_text(path) == first);

    std::remove(path.c_str());
}

TEST_CASE("json error paths") {
    const std::string path = temp_path("bad.json");
    write_text(path, "{\"n\": 2, \"m\": 1, \"C\": [1.0, 0.0");  // truncated
    CHECK_THROWS_AS(read_json(path), InvalidInput);
    write_text(path, "{\"schema_version\":1,\"n\":0,\"m\":1,\"C\":[],\"A\":[[]],\"b\":[0.0]}");
    CHECK_THROWS_AS(read_json(path), InvalidInput);
    write_text(path, "{\"schema_version\":1,\"n\":2,\"m\":1,\"C\":[1.0,0.0,1.0],\"A\":[[1.0,0.0]],\"b\":[1.0]}");
    CHECK_THROWS_AS(read_json(path), InvalidInput);  // wrong triangle length
    std::remove(path.c_str());
}

TEST_CASE("sdpa: minimal file maps to (-F0, F_i, c) and round-trips") {
    const std::string path = temp_path("mini.dat-s");
    write_text(path,
               "\" minimal single-block file\n"
               "1\n"
               "1\n"
               "2\n"
               "1.5\n"
               "0 1 1 1 -1.0\n"
               "0 1 1 2 0.25\n"
               "1 1 1 1 1.0\n"
               "1 1 2 2 2.0\n");
    SdpProblem p = read_sdpa(path);
    CHECK(p.n == 2);
    CHECK(p.m == 1);
    CHECK(p.b[0] == 1.5);
    CHECK(p.C(0, 0) == 1.0);   // -F0
    CHECK(p.C(0, 1) == -0.25);
    CHECK(p.A[0](0, 0) == 1.0);
    CHECK(p.A[0](1, 1) == 2.0);

    const std::string jpath = temp_path("mini.json");
    write_json(p, jpath);
    SdpProblem p2 = read_json(jpath);
    CHECK(p2.n == p.n);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(p2.C(i, j) == p.C(i, j));
            CHECK(p2.A[0](i, j) == p.A[0](i, j));
        }
    std::remove(path.c_str());
    std::remove(jpath.c_str());
}

TEST_CASE("sdpa: rejected dialects") {
    const std::string path = temp_path("rej.dat-s");
    write_text(path, "1\n2\n2 2\n1.0\n1 1 1 1 1.0\n");
    CHECK_THROWS_AS(read_sdpa(path), UnsupportedFormat);  // nblocks = 2
    write_text(path, "1\n1\n-3\n1.0\n1 1 1 1 1.0\n");
    CHECK_THROWS_AS(read_sdpa(path), UnsupportedFormat);  // LP block
    write_text(path, "1\n1\n2\n1.0\n1 1 2 1 1.0\n");
    CHECK_THROWS_AS(read_sdpa(path), InvalidInput);  // lower-triangle entry
    try {
        read_sdpa(path);
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
    write_text(path, "1\n1\n2\n1.0\n1 1 1 1 1.0\n1 1 1 1 2.0\n");
    CHECK_THROWS_AS(read_sdpa(path), InvalidInput);  // duplicate entry
    std::remove(path.c_str());
}
