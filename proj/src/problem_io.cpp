#include "sbsdp/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sbsdp/errors.hpp"

namespace sbsdp {

using nlohmann::json;

namespace {

json upper_triangle(const SymMatrix& M) {
    json arr = json::array();
    for (int i = 0; i < M.order(); ++i)
        for (int j = i; j < M.order(); ++j) arr.push_back(M(i, j));
    return arr;
}

SymMatrix from_upper_triangle(int n, const json& arr, const char* what) {
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(n) * (n + 1) / 2)
        throw InvalidInput(std::string("json: bad upper triangle for ") + what);
    SymMatrix M(n);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            if (!arr[k].is_number()) throw InvalidInput(std::string("json: non-numeric entry in ") + what);
            M.set(i, j, arr[k].get<double>());
            ++k;
        }
    return M;
}

Vec json_vec(const json& arr, std::size_t len, const char* what) {
    if (!arr.is_array() || arr.size() != len)
        throw InvalidInput(std::string("json: bad vector length for ") + what);
    Vec v(len);
    for (std::size_t i = 0; i < len; ++i) {
        if (!arr[i].is_number()) throw InvalidInput(std::string("json: non-numeric entry in ") + what);
        v[i] = arr[i].get<double>();
    }
    return v;
}

json instance_to_json(const SdpProblem& p, const KnownSolution* sol) {
    json j;
    j["schema_version"] = 1;
    j["n"] = p.n;
    j["m"] = p.m;
    j["C"] = upper_triangle(p.C);
    json amats = json::array();
    for (const auto& Ai : p.A) amats.push_back(upper_triangle(Ai));
    j["A"] = amats;
    j["b"] = p.b;
    if (sol) {
        json s;
        s["X"] = upper_triangle(sol->X_star);
        s["y"] = sol->y_star;
        s["Z"] = upper_triangle(sol->Z_star);
        s["rank_X"] = sol->rank_X;
        s["rank_Z"] = sol->rank_Z;
        j["solution"] = s;
    }
    return j;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw InvalidInput("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw InvalidInput("rename failed: " + path);
}

void write_json(const SdpProblem& p, const std::string& path, const KnownSolution* solution) {
    write_file_atomic(path, instance_to_json(p, solution).dump(2) + "\n");
}

SdpProblem read_json(const std::string& path, std::optional<KnownSolution>& solution_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput("json parse error in " + path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("m") || !j.contains("C") ||
        !j.contains("A") || !j.contains("b"))
        throw InvalidInput("json: missing required fields in " + path);
    if (!j["n"].is_number_integer() || !j["m"].is_number_integer())
        throw InvalidInput("json: n and m must be integers");
    const int n = j["n"].get<int>();
    const int m = j["m"].get<int>();
    if (n < 1) throw InvalidInput("json: n must be >= 1");
    if (m < 1) throw InvalidInput("json: m must be >= 1");
    SymMatrix C = from_upper_triangle(n, j["C"], "C");
    if (!j["A"].is_array() || j["A"].size() != static_cast<std::size_t>(m))
        throw InvalidInput("json: A must list m matrices");
    std::vector<SymMatrix> A;
    A.reserve(m);
    for (int i = 0; i < m; ++i) A.push_back(from_upper_triangle(n, j["A"][i], "A"));
    Vec b = json_vec(j["b"], m, "b");

    solution_out.reset();
    if (j.contains("solution")) {
        const json& s = j["solution"];
        KnownSolution ks;
        ks.X_star = from_upper_triangle(n, s.at("X"), "solution.X");
        ks.y_star = json_vec(s.at("y"), m, "solution.y");
        ks.Z_star = from_upper_triangle(n, s.at("Z"), "solution.Z");
        ks.rank_X = s.at("rank_X").get<int>();
        ks.rank_Z = s.at("rank_Z").get<int>();
        solution_out = std::move(ks);
    }
    return SdpProblem(std::move(C), std::move(A), std::move(b));
}

SdpProblem read_json(const std::string& path) {
    std::optional<KnownSolution> ignored;
    return read_json(path, ignored);
}

namespace {

bool is_comment(const std::string& line) {
    for (char c : line) {
        if (c == ' ' || c == '\t') continue;
        return c == '*' || c == '"';
    }
    return true;  // blank
}

// Numeric tokens of a header line; SDPA allows ',', '(', ')', '{', '}' as
// separators.
std::vector<double> header_numbers(std::string line) {
    for (char& c : line)
        if (c == ',' || c == '(' || c == ')' || c == '{' || c == '}') c = ' ';
    std::vector<double> out;
    std::istringstream ss(line);
    double v;
    while (ss >> v) out.push_back(v);
    return out;
}

}  // namespace

SdpProblem read_sdpa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open: " + path);

    std::string line;
    int lineno = 0;
    auto next_data_line = [&](const char* what) {
        while (std::getline(in, line)) {
            ++lineno;
            if (!is_comment(line)) return;
        }
        throw InvalidInput(std::string("sdpa: unexpected end of file, expected ") + what);
    };

    next_data_line("constraint count");
    auto h = header_numbers(line);
    if (h.empty()) throw InvalidInput("sdpa: bad constraint count at line " + std::to_string(lineno));
    const int m = static_cast<int>(h[0]);
    if (m < 1) throw InvalidInput("sdpa: constraint count must be >= 1");

    next_data_line("block count");
    h = header_numbers(line);
    if (h.empty()) throw InvalidInput("sdpa: bad block count at line " + std::to_string(lineno));
    const int nblocks = static_cast<int>(h[0]);
    if (nblocks != 1) throw UnsupportedFormat("sdpa: only single-block files are supported");

    next_data_line("block sizes");
    h = header_numbers(line);
    if (h.size() != 1) throw InvalidInput("sdpa: expected one block size at line " + std::to_string(lineno));
    if (h[0] < 0) throw UnsupportedFormat("sdpa: diagonal/LP blocks (negative size) are not supported");
    const int n = static_cast<int>(h[0]);
    if (n < 1) throw InvalidInput("sdpa: block size must be >= 1");

    next_data_line("objective vector");
    h = header_numbers(line);
    if (h.size() != static_cast<std::size_t>(m))
        throw InvalidInput("sdpa: objective vector length mismatch at line " + std::to_string(lineno));
    Vec b(h.begin(), h.end());

    SymMatrix F0(n);
    std::vector<SymMatrix> F(m, SymMatrix(n));
    std::vector<std::vector<bool>> seen(m + 1, std::vector<bool>(static_cast<std::size_t>(n) * n, false));

    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment(line)) continue;
        std::istringstream ss(line);
        int matno, blkno, i, j;
        double value;
        if (!(ss >> matno >> blkno >> i >> j >> value)) {
            throw InvalidInput("sdpa: malformed entry at line " + std::to_string(lineno));
        }
        std::string rest;
        if (ss >> rest) throw InvalidInput("sdpa: trailing tokens at line " + std::to_string(lineno));
        if (matno < 0 || matno > m)
            throw InvalidInput("sdpa: matrix index out of range at line " + std::to_string(lineno));
        if (blkno != 1)
            throw InvalidInput("sdpa: block index out of range at line " + std::to_string(lineno));
        if (i < 1 || j < 1 || i > n || j > n)
            throw InvalidInput("sdpa: entry index out of range at line " + std::to_string(lineno));
        if (i > j)
            throw InvalidInput("sdpa: lower-triangle entry (i > j) at line " + std::to_string(lineno));
        std::size_t flat = static_cast<std::size_t>(i - 1) * n + (j - 1);
        if (seen[matno][flat])
            throw InvalidInput("sdpa: duplicate entry at line " + std::to_string(lineno));
        seen[matno][flat] = true;
        if (matno == 0)
            F0.set(i - 1, j - 1, value);
        else
            F[matno - 1].set(i - 1, j - 1, value);
    }

    // (C, A_i, b) = (-F0, F_i, c): the artifact primal is the file's dual side.
    F0.scale(-1.0);
    return SdpProblem(std::move(F0), std::move(F), std::move(b));
}

}  // namespace sbsdp
