#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = SBSDP_CLI_PATH;

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("sbsdp_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
    std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("generate + solve: converged run exits 0 and writes outputs") {
    Sandbox sb;
    CHECK(run("generate --kind random --n 12 --m 6 --rank 9 --seed 5 --out " +
              sb.path("inst.json")) == 0);
    CHECK(fs::exists(sb.path("inst.json.manifest.json")));

    int rc = run("solve --alg sbmp --input " + sb.path("inst.json") +
                 " --rho-mode from-solution --rc 3 --tol 1e-6 --max-iter 200 --out " +
                 sb.path("rep.json") + " --history " + sb.path("h.csv"));
    CHECK(rc == 0);
    json rep = load_json(sb.path("rep.json"));
    CHECK(rep["status"] == "Converged");
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["config"]["r_c"] == 3);

    std::string head;
    std::getline(std::ifstream(sb.path("h.csv")) >> std::ws, head);
    CHECK(head == "t,objective,model_value,step,alpha,eta1,eta2,eta3,eta4,eta5,wall_ns");
}

TEST_CASE("solve: --rc 0 is a usage error") {
    Sandbox sb;
    REQUIRE(run("generate --kind random --n 8 --m 4 --rank 6 --seed 1 --out " +
                sb.path("inst.json")) == 0);
    CHECK(run("solve --alg sbmp --input " + sb.path("inst.json") + " --rho 4 --rc 0 --out " +
              sb.path("rep.json")) == 1);
}

TEST_CASE("solve: identical invocations give byte-identical history") {
    Sandbox sb;
    REQUIRE(run("generate --kind random --n 10 --m 5 --rank 7 --seed 3 --out " +
                sb.path("inst.json")) == 0);
    std::string base = "solve --alg sbmd --input " + sb.path("inst.json") +
                       " --rho-mode from-solution --rc 3 --tol 1e-5 --max-iter 150";
    REQUIRE(run(base + " --out " + sb.path("a.json") + " --history " + sb.path("a.csv")) == 0);
    REQUIRE(run(base + " --out " + sb.path("b.json") + " --history " + sb.path("b.csv")) == 0);
    CHECK(slurp(sb.path("a.csv")) == slurp(sb.path("b.csv")));
    CHECK(slurp(sb.path("a.json")) == slurp(sb.path("b.json")));
}

TEST_CASE("solve: MaxIter exit code is 2") {
    Sandbox sb;
    REQUIRE(run("generate --kind random --n 12 --m 6 --rank 3 --seed 2 --out " +
                sb.path("inst.json")) == 0);
    // starve the primal method on a low-rank-primal instance
    int rc = run("solve --alg sbmp --input " + sb.path("inst.json") +
                 " --rho-mode from-solution --rc 1 --tol 1e-9 --max-iter 10 --out " +
                 sb.path("rep.json"));
    CHECK(rc == 2);
    CHECK(load_json(sb.path("rep.json"))["status"] == "MaxIter");
}

TEST_CASE("generate maxcut from an edge list and solve via sdpa-independent path") {
    Sandbox sb;
    {
        std::ofstream g(sb.path("g.txt"));
        g << "3 3\n1 2 1\n1 3 1\n2 3 1\n";
    }
    REQUIRE(run("generate --kind maxcut --graph " + sb.path("g.txt") + " --out " +
                sb.path("mc.json")) == 0);
    json inst = load_json(sb.path("mc.json"));
    CHECK(inst["n"] == 3);
    CHECK(inst["m"] == 3);
    int rc = run("solve --alg sbmd --input " + sb.path("mc.json") +
                 " --rho-mode maxcut-dual --rc 2 --tol 1e-7 --max-iter 300 --out " +
                 sb.path("mc.rep.json"));
    CHECK(rc == 0);
}

TEST_CASE("convert records the null-space dimension in the manifest") {
    Sandbox sb;
    REQUIRE(run("generate --kind random --n 6 --m 4 --rank 4 --seed 9 --out " +
                sb.path("inst.json")) == 0);
    REQUIRE(run("convert --direction p2d --input " + sb.path("inst.json") + " --out " +
                sb.path("conv.json")) == 0);
    json manifest = load_json(sb.path("conv.json.manifest.json"));
    CHECK(manifest["nullspace_dim"] == 6 * 7 / 2 - 4);
    CHECK(manifest["command"] == "convert");

    // rank-deficient input fails with exit 1
    json inst = load_json(sb.path("inst.json"));
    inst["A"][1] = inst["A"][0];
    std::ofstream(sb.path("bad.json")) << inst.dump(2);
    CHECK(run("convert --direction p2d --input " + sb.path("bad.json") + " --out " +
              sb.path("x.json")) == 1);
}

TEST_CASE("report summarizes histories") {
    Sandbox sb;
    REQUIRE(run("generate --kind random --n 10 --m 5 --rank 7 --seed 4 --out " +
                sb.path("inst.json")) == 0);
    REQUIRE(run("solve --alg sbmp --input " + sb.path("inst.json") +
                " --rho-mode from-solution --rc 3 --tol 1e-6 --max-iter 200 --out " +
                sb.path("rep.json") + " --history " + sb.path("h.csv")) == 0);
    CHECK(run("report --histories " + sb.path("h.csv") + " --reference -5.0 --out " +
              sb.path("table.txt")) == 0);
    std::string table = slurp(sb.path("table.txt"));
    CHECK(table.find("Semi Feasi.") != std::string::npos);
    CHECK(table.find("Cost Opt.") != std::string::npos);
    // one header + one data row
    CHECK(std::count(table.begin(), table.end(), '\n') == 2);

    CHECK(run("report --histories " + sb.path("missing.csv")) == 1);
}

TEST_CASE("solve accepts sdpa input") {
    Sandbox sb;
    {
        std::ofstream f(sb.path("p.dat-s"));
        f << "1\n1\n2\n1.0\n0 1 1 1 -1.0\n0 1 2 2 -1.0\n1 1 1 1 1.0\n";
    }
    // maps to C = I, A1 = e1e1^T, b = 1: the 2x2 analytic instance
    int rc = run("solve --alg sbmp --input " + sb.path("p.dat-s") +
                 " --format sdpa --rho 4 --rc 1 --tol 1e-7 --max-iter 200 --out " +
                 sb.path("rep.json"));
    CHECK(rc == 0);
    json rep = load_json(sb.path("rep.json"));
    CHECK(std::abs(rep["linear_objective"].get<double>() - 1.0) <= 1e-5);
}

TEST_CASE("parallel multi-input solve writes per-input outputs") {
    Sandbox sb;
    REQUIRE(run("generate --kind random --n 10 --m 5 --rank 7 --seed 11 --out " +
                sb.path("a.json")) == 0);
    REQUIRE(run("generate --kind random --n 10 --m 5 --rank 7 --seed 12 --out " +
                sb.path("b.json")) == 0);
    int rc = run("solve --alg sbmp --input " + sb.path("a.json") + " " + sb.path("b.json") +
                 " --rho-mode from-solution --rc 3 --tol 1e-6 --max-iter 200 --jobs 2 --out-dir " +
                 sb.path("runs"));
    CHECK(rc == 0);
    CHECK(fs::exists(sb.path("runs") + "/a.report.json"));
    CHECK(fs::exists(sb.path("runs") + "/b.history.csv"));
}
