#pragma once

// Long-run projected-gradient oracle for the (gamma, S) cone QP. Uses its own
// dense algebra, its own Jacobi eigensolver, and its own budget projection,
// independent of the library solver.

#include <algorithm>
#include <cmath>
#include <vector>

#include "sbsdp/subqp.hpp"
#include "support/mini_eig.hpp"

namespace sbsdp::testing {

struct DenseQp {
    int r;
    double rho;
    std::vector<double> M;  // (1+r^2)^2 row-major full quadratic block
    std::vector<double> m;  // 1+r^2
};

inline DenseQp densify(const sbsdp::SubQp& q) {
    const int rr = q.r * q.r;
    const int d = 1 + rr;
    DenseQp out{q.r, q.rho, std::vector<double>(static_cast<std::size_t>(d) * d, 0.0),
                std::vector<double>(d)};
    out.M[0] = q.M11;
    for (int k = 0; k < rr; ++k) {
        out.M[static_cast<std::size_t>(k + 1)] = q.M12[k];
        out.M[static_cast<std::size_t>(k + 1) * d] = q.M12[k];
    }
    for (int k = 0; k < rr; ++k)
        for (int l = 0; l < rr; ++l) {
            double v = (k == l) ? q.m22_diag : 0.0;
            double acc = 0.0;
            for (int i = 0; i < q.bq; ++i)
                acc += q.B[static_cast<std::size_t>(k) * q.bq + i] *
                       q.B[static_cast<std::size_t>(l) * q.bq + i];
            out.M[static_cast<std::size_t>(k + 1) * d + (l + 1)] = v + q.m22_sign * acc;
        }
    out.m[0] = q.m1;
    for (int k = 0; k < rr; ++k) out.m[k + 1] = q.m2[k];
    return out;
}

inline double dense_objective(const DenseQp& q, const std::vector<double>& v) {
    const int d = static_cast<int>(v.size());
    double quad = 0.0;
    for (int i = 0; i < d; ++i) {
        double row = 0.0;
        for (int j = 0; j < d; ++j) row += q.M[static_cast<std::size_t>(i) * d + j] * v[j];
        quad += v[i] * row;
    }
    double lin = 0.0;
    for (int i = 0; i < d; ++i) lin += q.m[i] * v[i];
    return quad + lin;
}

// projection of (gamma, vec(S)) onto {gamma >= 0, S PSD, gamma + tr(S) <= rho}
inline void oracle_project(std::vector<double>& v, int r, double rho) {
    std::vector<double> S(static_cast<std::size_t>(r) * r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            S[static_cast<std::size_t>(j) * r + i] = v[1 + i * r + j];  // row-major -> col-major
    MiniEig e = jacobi_eig(S, r);

    std::vector<double> z(static_cast<std::size_t>(r) + 1);
    z[0] = v[0];
    for (int k = 0; k < r; ++k) z[k + 1] = e.values[k];
    for (double& x : z) x = std::max(0.0, x);
    double sum = 0.0;
    for (double x : z) sum += x;
    if (sum > rho) {
        std::vector<double> sorted = z;
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        double acc = 0.0, tau = 0.0;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            acc += sorted[i];
            double cand = (acc - rho) / static_cast<double>(i + 1);
            if (cand < sorted[i]) tau = cand;
        }
        for (double& x : z) x = std::max(0.0, x - tau);
    }

    v[0] = z[0];
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            double acc = 0.0;
            for (int k = 0; k < r; ++k)
                acc += z[k + 1] * e.vectors[static_cast<std::size_t>(k) * r + i] *
                       e.vectors[static_cast<std::size_t>(k) * r + j];
            v[1 + i * r + j] = acc;
        }
}

/// Plain projected gradient, capped at max_iter, early exit on exact
/// stagnation of the iterate.
inline double pg_oracle_objective(const sbsdp::SubQp& q, long max_iter = 1000000) {
    DenseQp d = densify(q);
    const int dim = 1 + q.r * q.r;
    MiniEig me = jacobi_eig([&] {
        std::vector<double> colmajor(static_cast<std::size_t>(dim) * dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                colmajor[static_cast<std::size_t>(j) * dim + i] =
                    d.M[static_cast<std::size_t>(i) * dim + j];
        return colmajor;
    }(), dim);
    double lmax = 0.0;
    for (double v : me.values) lmax = std::max(lmax, std::abs(v));
    const double step = 1.0 / std::max(2.0 * lmax * 1.01, 1e-12);

    std::vector<double> v(dim, 0.0);
    for (long it = 0; it < max_iter; ++it) {
        std::vector<double> g(dim);
        for (int i = 0; i < dim; ++i) {
            double row = 0.0;
            for (int j = 0; j < dim; ++j) row += d.M[static_cast<std::size_t>(i) * dim + j] * v[j];
            g[i] = 2.0 * row + d.m[i];
        }
        std::vector<double> next = v;
        for (int i = 0; i < dim; ++i) next[i] -= step * g[i];
        oracle_project(next, q.r, q.rho);
        double move = 0.0;
        for (int i = 0; i < dim; ++i) move += (next[i] - v[i]) * (next[i] - v[i]);
        v = std::move(next);
        if (std::sqrt(move) <= 1e-15) break;
    }
    return dense_objective(d, v);
}

}  // namespace sbsdp::testing
