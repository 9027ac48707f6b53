// Batch front end: solve, generate, convert, report.
//
// Exit codes: 0 converged / success, 1 input or usage error, 2 iteration
// limit reached, 3 subproblem stall.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbsdp/convert.hpp"
#include "sbsdp/errors.hpp"
#include "sbsdp/generators.hpp"
#include "sbsdp/penalty.hpp"
#include "sbsdp/problem_io.hpp"
#include "sbsdp/solver.hpp"

using namespace sbsdp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

std::string fnv1a_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

void write_manifest(const std::string& primary_output, const std::string& command,
                    const std::vector<std::string>& argv_echo, const json& config_snapshot,
                    std::uint64_t seed, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, const json& extra = json::object()) {
    json m;
    m["schema_version"] = kSchemaVersion;
    m["command"] = command;
    m["argv"] = argv_echo;
    m["config"] = config_snapshot;
    m["seed"] = seed;
    json ins = json::array();
    for (const auto& path : inputs) ins.push_back({{"path", path}, {"fnv1a64", fnv1a_hex(path)}});
    m["inputs"] = ins;
    m["outputs"] = outputs;
    m["timestamp"] = iso_timestamp();
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    write_file_atomic(primary_output + ".manifest.json", m.dump(2) + "\n");
}

json upper_triangle_json(const SymMatrix& M) {
    json arr = json::array();
    for (int i = 0; i < M.order(); ++i)
        for (int j = i; j < M.order(); ++j) arr.push_back(M(i, j));
    return arr;
}

struct SolveArgs {
    std::string alg = "sbmp";
    std::vector<std::string> inputs;
    std::string format = "json";
    std::string out;
    std::string out_dir;
    std::string history;
    std::string history_jsonl;
    std::string config_file;
    std::string rho_mode;
    double rho = 0.0;
    bool timing = false;
    int jobs = 1;
    SolverConfig cfg;
};

json config_snapshot(const SolverConfig& cfg, const std::string& alg) {
    json c;
    c["alg"] = alg;
    c["r_p"] = cfg.r_p;
    c["r_c"] = cfg.r_c;
    c["rho"] = cfg.rho.rho;
    c["alpha0"] = cfg.alpha0;
    c["beta"] = cfg.beta;
    c["m_l"] = cfg.m_l;
    c["m_r"] = cfg.m_r;
    c["alpha_min"] = cfg.alpha_min;
    c["alpha_max"] = cfg.alpha_max;
    c["N_min"] = cfg.N_min;
    c["tol"] = cfg.tol;
    c["max_iter"] = cfg.max_iter;
    c["seed"] = cfg.seed;
    c["subqp_tol"] = cfg.subqp_tol;
    c["subqp_max_iter"] = cfg.subqp_max_iter;
    c["stall_limit"] = cfg.stall_limit;
    return c;
}

int status_exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return 0;
        case SolveStatus::MaxIter: return 2;
        case SolveStatus::SubproblemStall: return 3;
    }
    return 1;
}

struct OneSolveOutput {
    int exit_code = 1;
    std::string report_path;
};

OneSolveOutput run_one_solve(const SolveArgs& args, const std::string& input,
                             const std::string& out_path, const std::string& history_path,
                             const std::string& jsonl_path,
                             const std::vector<std::string>& argv_echo) {
    std::optional<KnownSolution> sol;
    SdpProblem problem = args.format == "sdpa" ? read_sdpa(input) : read_json(input, sol);

    SolverConfig cfg = args.cfg;
    if (args.rho > 0.0) {
        cfg.rho = {args.rho, RhoSource::UserGiven};
    } else if (args.rho_mode == "maxcut-dual") {
        cfg.rho = {maxcut_rho_dual(problem.n), RhoSource::MaxCutDual};
    } else if (args.rho_mode == "maxcut-primal") {
        SymMatrix L = problem.C;
        L.scale(4.0);  // Max-Cut convention C = L/4
        cfg.rho = {maxcut_rho_primal(L), RhoSource::MaxCutPrimal};
    } else if (args.rho_mode == "from-solution") {
        if (!sol) throw InvalidInput("--rho-mode from-solution requires a stored solution");
        cfg.rho = {rho_from_known(*sol, args.alg == "sbmp" ? PenaltySide::Primal
                                                           : PenaltySide::Dual),
                   RhoSource::FromKnownSolution};
    } else {
        throw InvalidInput("either --rho or --rho-mode is required");
    }

    SolveReport rep =
        args.alg == "sbmp" ? sbmp_solve(problem, cfg) : sbmd_solve(problem, cfg);

    const bool zero_ns = !args.timing;
    std::vector<std::string> outputs;
    if (!history_path.empty()) {
        write_file_atomic(history_path, history_csv(rep.history, zero_ns));
        outputs.push_back(history_path);
    }
    if (!jsonl_path.empty()) {
        write_file_atomic(jsonl_path, history_jsonl(rep.history, zero_ns));
        outputs.push_back(jsonl_path);
    }

    json r;
    r["schema_version"] = kSchemaVersion;
    r["algorithm"] = args.alg;
    r["status"] = status_name(rep.status);
    r["iterations"] = rep.iterations;
    r["objective"] = rep.objective;
    r["linear_objective"] = rep.linear_objective;
    r["final_eta"] = rep.final_eta;
    r["wall_ns"] = zero_ns ? 0 : (rep.history.empty() ? 0 : rep.history.back().wall_ns);
    r["config"] = config_snapshot(cfg, args.alg);
    json solution;
    if (rep.final_X) solution["X"] = upper_triangle_json(*rep.final_X);
    solution["y"] = rep.final_y;
    if (rep.final_W) solution["W"] = upper_triangle_json(*rep.final_W);
    if (rep.final_Z) solution["Z"] = upper_triangle_json(*rep.final_Z);
    r["solution"] = solution;
    write_file_atomic(out_path, r.dump(2) + "\n");
    outputs.insert(outputs.begin(), out_path);

    write_manifest(out_path, "solve", argv_echo, config_snapshot(cfg, args.alg), cfg.seed,
                   {input}, outputs);
    return {status_exit_code(rep.status), out_path};
}

void apply_config_file(CLI::App* cmd, SolverConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config parse error: ") + e.what());
    }
    auto maybe = [&](const char* key, auto& field, const char* flag) {
        if (j.contains(key) && cmd->count(flag) == 0)
            field = j[key].get<std::decay_t<decltype(field)>>();
    };
    maybe("r_p", cfg.r_p, "--rp");
    maybe("r_c", cfg.r_c, "--rc");
    maybe("alpha0", cfg.alpha0, "--alpha0");
    maybe("beta", cfg.beta, "--beta");
    maybe("m_l", cfg.m_l, "--ml");
    maybe("m_r", cfg.m_r, "--mr");
    maybe("alpha_min", cfg.alpha_min, "--alpha-min");
    maybe("alpha_max", cfg.alpha_max, "--alpha-max");
    maybe("N_min", cfg.N_min, "--nmin");
    maybe("tol", cfg.tol, "--tol");
    maybe("max_iter", cfg.max_iter, "--max-iter");
    maybe("seed", cfg.seed, "--seed");
    maybe("subqp_tol", cfg.subqp_tol, "--subqp-tol");
    maybe("subqp_max_iter", cfg.subqp_max_iter, "--subqp-max-iter");
    maybe("stall_limit", cfg.stall_limit, "--stall-limit");
}

int cmd_solve(const SolveArgs& args_in, CLI::App* cmd,
              const std::vector<std::string>& argv_echo) {
    SolveArgs args = args_in;
    if (!args.config_file.empty()) apply_config_file(cmd, args.cfg, args.config_file);

    if (args.inputs.empty()) throw InvalidInput("at least one --input is required");
    if (args.inputs.size() == 1) {
        std::string out = args.out.empty() ? args.inputs[0] + ".report.json" : args.out;
        return run_one_solve(args, args.inputs[0], out, args.history, args.history_jsonl,
                             argv_echo)
            .exit_code;
    }

    if (args.out_dir.empty())
        throw InvalidInput("multiple inputs require --out-dir");
    fs::create_directories(args.out_dir);
    std::vector<int> codes(args.inputs.size(), 1);
    std::vector<std::string> errors(args.inputs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= args.inputs.size()) return;
            const std::string stem = fs::path(args.inputs[i]).stem().string();
            const std::string base = (fs::path(args.out_dir) / stem).string();
            try {
                codes[i] = run_one_solve(args, args.inputs[i], base + ".report.json",
                                         base + ".history.csv",
                                         args.history_jsonl.empty() ? "" : base + ".history.jsonl",
                                         argv_echo)
                               .exit_code;
            } catch (const std::exception& e) {
                errors[i] = e.what();
                codes[i] = 1;
            }
        }
    };
    int jobs = std::max(1, args.jobs);
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    int worst = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (!errors[i].empty()) std::cerr << args.inputs[i] << ": " << errors[i] << "\n";
        worst = std::max(worst, codes[i]);
    }
    return worst;
}

int cmd_generate(const std::string& kind, int n, int m, int rank, std::uint64_t seed,
                 const std::string& graph_path, const std::string& out,
                 const std::vector<std::string>& argv_echo) {
    json extra;
    std::vector<std::string> inputs;
    if (kind == "random") {
        GeneratedInstance inst = gen_random_sdp(n, m, rank, seed);
        write_json(inst.problem, out, &inst.solution);
        extra["sigma_p"] = inst.sigma_p;
        extra["sigma_d"] = inst.sigma_d;
    } else if (kind == "maxcut") {
        if (graph_path.empty()) throw InvalidInput("--graph is required for --kind maxcut");
        Graph g = read_graph(graph_path);
        write_json(maxcut_sdp(g), out);
        inputs.push_back(graph_path);
    } else {
        throw InvalidInput("unknown --kind: " + kind);
    }
    json cfg{{"kind", kind}, {"n", n}, {"m", m}, {"rank", rank}};
    write_manifest(out, "generate", argv_echo, cfg, seed, inputs, {out}, extra);
    return 0;
}

int cmd_convert(const std::string& direction, const std::string& input, const std::string& out,
                const std::vector<std::string>& argv_echo) {
    SdpProblem p = read_json(input);
    Conversion conv = direction == "p2d" ? convert_primal_to_dual(p) : convert_dual_to_primal(p);
    write_json(conv.problem, out);
    json extra;
    extra["direction"] = direction;
    extra["nullspace_dim"] = conv.nullspace_dim;
    extra["objective_offset"] = conv.objective_offset;
    write_manifest(out, "convert", argv_echo, json{{"direction", direction}}, 0, {input}, {out},
                   extra);
    return 0;
}

struct HistoryTail {
    int iterations = 0;
    double objective = 0.0;
    std::array<double, 5> eta{};
    std::int64_t wall_ns = 0;
};

HistoryTail read_history_tail(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line.rfind("t,objective,model_value,step,alpha,eta1", 0) != 0)
        throw InvalidInput("not a history csv: " + path);
    HistoryTail tail;
    bool any = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 11) throw InvalidInput("malformed history row in " + path);
        tail.iterations = std::stoi(fields[0]) + 1;
        tail.objective = std::stod(fields[1]);
        for (int k = 0; k < 5; ++k) tail.eta[k] = std::stod(fields[5 + k]);
        tail.wall_ns = std::stoll(fields[10]);
        any = true;
    }
    if (!any) throw InvalidInput("empty history: " + path);
    return tail;
}

int cmd_report(const std::vector<std::string>& histories, const std::string& out,
               bool have_reference, double reference,
               const std::vector<std::string>& argv_echo) {
    std::ostringstream table;
    table << std::left << std::setw(28) << "run" << std::right << std::setw(7) << "iters"
          << std::setw(13) << "Semi Feasi." << std::setw(14) << "Affine Feasi." << std::setw(12)
          << "Dual Gap" << std::setw(12) << "Cost Opt." << std::setw(11) << "time [s]" << "\n";
    for (const auto& path : histories) {
        HistoryTail t = read_history_tail(path);
        double semi = std::max(t.eta[1], t.eta[3]);
        double affine = std::max(t.eta[0], t.eta[2]);
        table << std::left << std::setw(28) << fs::path(path).stem().string() << std::right
              << std::setw(7) << t.iterations;
        table << std::setw(13) << std::scientific << std::setprecision(2) << semi << std::setw(14)
              << affine << std::setw(12) << t.eta[4];
        if (have_reference) {
            table << std::setw(12) << (t.objective - reference) / reference;
        } else {
            table << std::setw(12) << "-";
        }
        table << std::setw(11) << std::fixed << std::setprecision(3)
              << static_cast<double>(t.wall_ns) * 1e-9 << "\n";
    }
    if (out.empty()) {
        std::cout << table.str();
    } else {
        write_file_atomic(out, table.str());
        write_manifest(out, "report", argv_echo,
                       json{{"reference", have_reference ? json(reference) : json()}}, 0,
                       histories, {out});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> argv_echo(argv, argv + argc);
    CLI::App app{"spectral bundle solver suite for primal and dual SDPs"};
    app.require_subcommand(1);

    // solve
    SolveArgs s;
    CLI::App* solve = app.add_subcommand("solve", "run the primal or dual bundle method");
    solve->add_option("--alg", s.alg)->check(CLI::IsMember({"sbmp", "sbmd"}));
    solve->add_option("--input", s.inputs)->required();
    solve->add_option("--format", s.format)->check(CLI::IsMember({"json", "sdpa"}));
    solve->add_option("--rp", s.cfg.r_p)->check(CLI::NonNegativeNumber);
    solve->add_option("--rc", s.cfg.r_c)->check(CLI::PositiveNumber);
    solve->add_option("--rho", s.rho);
    solve->add_option("--rho-mode", s.rho_mode)
        ->check(CLI::IsMember({"maxcut-dual", "maxcut-primal", "from-solution"}));
    solve->add_option("--tol", s.cfg.tol);
    solve->add_option("--max-iter", s.cfg.max_iter);
    solve->add_option("--alpha0", s.cfg.alpha0);
    solve->add_option("--beta", s.cfg.beta);
    solve->add_option("--ml", s.cfg.m_l);
    solve->add_option("--mr", s.cfg.m_r);
    solve->add_option("--alpha-min", s.cfg.alpha_min);
    solve->add_option("--alpha-max", s.cfg.alpha_max);
    solve->add_option("--nmin", s.cfg.N_min);
    solve->add_option("--seed", s.cfg.seed);
    solve->add_option("--subqp-tol", s.cfg.subqp_tol);
    solve->add_option("--subqp-max-iter", s.cfg.subqp_max_iter);
    solve->add_option("--stall-limit", s.cfg.stall_limit);
    solve->add_option("--history", s.history);
    solve->add_option("--history-jsonl", s.history_jsonl);
    solve->add_option("--out", s.out);
    solve->add_option("--out-dir", s.out_dir);
    solve->add_option("--config", s.config_file);
    solve->add_option("--jobs", s.jobs)->check(CLI::PositiveNumber);
    solve->add_flag("--timing", s.timing, "emit measured wall_ns (not byte-reproducible)");

    // generate
    std::string g_kind = "random", g_graph, g_out;
    int g_n = 10, g_m = 5, g_rank = 2;
    std::uint64_t g_seed = 0;
    CLI::App* generate = app.add_subcommand("generate", "construct SDP instances");
    generate->add_option("--kind", g_kind)->check(CLI::IsMember({"random", "maxcut"}));
    generate->add_option("--n", g_n);
    generate->add_option("--m", g_m);
    generate->add_option("--rank", g_rank);
    generate->add_option("--seed", g_seed);
    generate->add_option("--graph", g_graph);
    generate->add_option("--out", g_out)->required();

    // convert
    std::string c_direction, c_input, c_out;
    CLI::App* convert = app.add_subcommand("convert", "rewrite a problem on the other side");
    convert->add_option("--direction", c_direction)
        ->required()
        ->check(CLI::IsMember({"p2d", "d2p"}));
    convert->add_option("--input", c_input)->required();
    convert->add_option("--out", c_out)->required();

    // report
    std::vector<std::string> r_histories;
    std::string r_out;
    double r_reference = 0.0;
    CLI::App* report = app.add_subcommand("report", "summarize convergence histories");
    CLI::Option* ropt = report->add_option("--histories", r_histories);
    ropt->required();
    CLI::Option* refopt = report->add_option("--reference", r_reference);
    report->add_option("--out", r_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (*solve) return cmd_solve(s, solve, argv_echo);
        if (*generate) return cmd_generate(g_kind, g_n, g_m, g_rank, g_seed, g_graph, g_out,
                                           argv_echo);
        if (*convert) return cmd_convert(c_direction, c_input, c_out, argv_echo);
        if (*report)
            return cmd_report(r_histories, r_out, refopt->count() > 0, r_reference, argv_echo);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
