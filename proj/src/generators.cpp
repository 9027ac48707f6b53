#include "sbsdp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "sbsdp/errors.hpp"
#include "sbsdp/sym_eig.hpp"

namespace sbsdp {

GeneratedInstance gen_random_sdp(int n, int m, int r, std::uint64_t seed) {
    if (n < 2 || r < 1 || r >= n) throw InvalidInput("gen_random_sdp: need 1 <= r < n");
    if (m < 1) throw InvalidInput("gen_random_sdp: need m >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.5, 1.5);

    // random orthogonal eigenbasis from a Gaussian symmetric matrix,
    // eigenvalue scales in [0.5, 1.5] so conditioning stays controlled
    SymMatrix Gsym(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) Gsym.set(i, j, gauss(rng));
    EigenDecomp basis = eig_sym(Gsym);
    Vec scales(n);
    for (double& v : scales) v = unif(rng);
    std::sort(scales.begin(), scales.end(), std::greater<double>());

    SymMatrix X_star(n);
    for (int k = 0; k < r; ++k) X_star.add_outer(basis.vectors.vec(k), scales[k]);
    SymMatrix Z_star(n);
    for (int k = r; k < n; ++k) Z_star.add_outer(basis.vectors.vec(k), scales[k]);

    std::vector<SymMatrix> A;
    A.reserve(m);
    for (int i = 0; i < m; ++i) {
        SymMatrix Ai(n);
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) Ai.set(a, b, gauss(rng));
        double shift = Ai.trace() / n;
        for (int a = 0; a < n; ++a) Ai.set(a, a, Ai(a, a) - shift);
        A.push_back(std::move(Ai));
    }

    Vec y_star(m);
    for (double& v : y_star) v = gauss(rng);

    SymMatrix C = Z_star;
    for (int i = 0; i < m; ++i) C.add_scaled(A[i], y_star[i]);

    GeneratedInstance out;
    out.seed = seed;
    out.solution.X_star = X_star;
    out.solution.y_star = y_star;
    out.solution.Z_star = Z_star;
    out.solution.rank_X = r;
    out.solution.rank_Z = n - r;
    out.sigma_p = n - r;
    out.sigma_d = r;
    Vec b(m);
    for (int i = 0; i < m; ++i) b[i] = SymMatrix::inner(A[i], X_star);
    out.problem = SdpProblem(std::move(C), std::move(A), std::move(b));
    return out;
}

SymMatrix laplacian(const Graph& g) {
    if (g.n < 1) throw InvalidInput("laplacian: empty graph");
    SymMatrix L(g.n);
    for (const auto& e : g.edges) {
        L.set(e.i, e.j, L(e.i, e.j) - e.w);
        L.set(e.i, e.i, L(e.i, e.i) + e.w);
        L.set(e.j, e.j, L(e.j, e.j) + e.w);
    }
    return L;
}

SdpProblem maxcut_sdp(const Graph& g) {
    for (const auto& e : g.edges) {
        if (e.i < 0 || e.j < 0 || e.i >= g.n || e.j >= g.n || e.i >= e.j)
            throw InvalidInput("maxcut_sdp: invalid edge");
        if (!std::isfinite(e.w)) throw InvalidInput("maxcut_sdp: non-finite weight");
    }
    SymMatrix C = laplacian(g);
    C.scale(0.25);
    std::vector<SymMatrix> A;
    A.reserve(g.n);
    for (int i = 0; i < g.n; ++i) {
        SymMatrix Ai(g.n);
        Ai.set(i, i, 1.0);
        A.push_back(std::move(Ai));
    }
    return SdpProblem(std::move(C), std::move(A), Vec(g.n, 1.0));
}

Graph read_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open: " + path);
    std::string line;
    int lineno = 0;
    auto next_line = [&]() {
        while (std::getline(in, line)) {
            ++lineno;
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
            if (!blank) return true;
        }
        return false;
    };
    if (!next_line()) throw InvalidInput("graph: empty file");
    std::istringstream head(line);
    int n, m_edges;
    if (!(head >> n >> m_edges) || n < 1 || m_edges < 0)
        throw InvalidInput("graph: bad header at line " + std::to_string(lineno));

    Graph g;
    g.n = n;
    std::set<std::pair<int, int>> seen;
    for (int k = 0; k < m_edges; ++k) {
        if (!next_line()) throw InvalidInput("graph: fewer edges than declared");
        std::istringstream ss(line);
        int i, j;
        double w;
        if (!(ss >> i >> j >> w))
            throw InvalidInput("graph: bad edge at line " + std::to_string(lineno));
        if (i < 1 || j < 1 || i > n || j > n)
            throw InvalidInput("graph: vertex out of range at line " + std::to_string(lineno));
        if (i == j) throw InvalidInput("graph: self-loop at line " + std::to_string(lineno));
        if (!std::isfinite(w))
            throw InvalidInput("graph: non-finite weight at line " + std::to_string(lineno));
        int a = std::min(i, j) - 1;
        int b = std::max(i, j) - 1;
        if (!seen.insert({a, b}).second)
            throw InvalidInput("graph: duplicate edge at line " + std::to_string(lineno));
        g.edges.push_back({a, b, w});
    }
    return g;
}

Graph random_graph(int n, double edge_prob, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("random_graph: n must be >= 1");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
        throw InvalidInput("random_graph: edge_prob must be in [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Graph g;
    g.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double toss = unif(rng);
            double w = unif(rng);
            if (toss < edge_prob) g.edges.push_back({i, j, w == 0.0 ? 1.0 : w});
        }
    return g;
}

}  // namespace sbsdp
