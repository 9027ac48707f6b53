#pragma once

#include <cstdint>
#include <string>

#include "sbsdp/problem.hpp"

namespace sbsdp {

struct GeneratedInstance {
    SdpProblem problem;
    KnownSolution solution;
    int sigma_p = 0;  // n - rank_X
    int sigma_d = 0;  // n - rank_Z
    std::uint64_t seed = 0;
};

/// Random SDP with known optimal triple, satisfying strict complementarity
/// (rank_X = r, rank_Z = n - r) and constant dual trace (tr(A_i) = 0).
/// Deterministic in (n, m, r, seed).
GeneratedInstance gen_random_sdp(int n, int m, int r, std::uint64_t seed);

struct Graph {
    int n = 0;
    struct Edge {
        int i;  // 0-based, i < j
        int j;
        double w;
    };
    std::vector<Edge> edges;
};

/// Max-Cut relaxation: C = L/4, A_i = e_i e_i^T, b = 1.
SdpProblem maxcut_sdp(const Graph& g);

/// Weighted graph Laplacian.
SymMatrix laplacian(const Graph& g);

/// Gset-style edge list: first line "n m_edges", then "i j w" (1-based).
Graph read_graph(const std::string& path);

/// Erdos-Renyi-style random weighted graph (uniform weights in (0,1]),
/// deterministic in seed.
Graph random_graph(int n, double edge_prob, std::uint64_t seed);

}  // namespace sbsdp
