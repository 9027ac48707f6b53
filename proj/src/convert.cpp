#include "sbsdp/convert.hpp"

#include <cmath>

#include <lapacke.h>

#include "sbsdp/errors.hpp"

namespace sbsdp {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

Vec svec(const SymMatrix& M) {
    const int n = M.order();
    Vec v(static_cast<std::size_t>(n) * (n + 1) / 2);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        v[k++] = M(i, i);
        for (int j = i + 1; j < n; ++j) v[k++] = kSqrt2 * M(i, j);
    }
    return v;
}

SymMatrix smat(int n, const Vec& v) {
    if (v.size() != static_cast<std::size_t>(n) * (n + 1) / 2)
        throw InvalidInput("smat: length mismatch");
    SymMatrix M(n);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        M.set(i, i, v[k++]);
        for (int j = i + 1; j < n; ++j) M.set(i, j, v[k++] / kSqrt2);
    }
    return M;
}

namespace {

// Orthonormal basis (trace inner product) of the orthogonal complement of
// span{A_i} in S^n, via the SVD of the m x d svec matrix.
std::vector<SymMatrix> nullspace_basis(const SdpProblem& p) {
    const int n = p.n;
    const int m = p.m;
    const int d = n * (n + 1) / 2;

    // rows of R are svec(A_i); column-major m x d for LAPACK
    Vec R(static_cast<std::size_t>(m) * d);
    for (int i = 0; i < m; ++i) {
        Vec s = svec(p.A[i]);
        for (int j = 0; j < d; ++j) R[static_cast<std::size_t>(j) * m + i] = s[j];
    }
    const int kmin = std::min(m, d);
    Vec sv(kmin);
    Vec u(static_cast<std::size_t>(m) * m);
    Vec vt(static_cast<std::size_t>(d) * d);
    lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', m, d, R.data(), m, sv.data(),
                                     u.data(), m, vt.data(), d);
    if (info != 0) throw InvalidInput("nullspace_basis: LAPACK dgesdd failed");

    const double tol = 1e-12 * std::max(1.0, sv[0]) * std::max(m, d);
    int rank = 0;
    for (int i = 0; i < kmin; ++i)
        if (sv[i] > tol) ++rank;
    if (rank < m) throw RankDeficient("constraint matrices are linearly dependent");

    const int pdim = d - rank;
    if (pdim == 0)
        throw DegenerateConversion("constraints fully determine S^n (m = n(n+1)/2)");

    std::vector<SymMatrix> basis;
    basis.reserve(pdim);
    for (int k = 0; k < pdim; ++k) {
        // row (rank + k) of V^T, i.e. v-column for a zero singular value
        Vec col(d);
        for (int j = 0; j < d; ++j)
            col[j] = vt[static_cast<std::size_t>(j) * d + (rank + k)];
        basis.push_back(smat(n, col));
    }
    return basis;
}

SymMatrix least_norm_feasible(const SdpProblem& p) {
    Vec c = p.gram().solve(p.b);
    return apply_At(p, c);
}

}  // namespace

Conversion convert_primal_to_dual(const SdpProblem& p) {
    std::vector<SymMatrix> N = nullspace_basis(p);
    SymMatrix Xp = least_norm_feasible(p);

    const int pdim = static_cast<int>(N.size());
    Vec b_new(pdim);
    for (int i = 0; i < pdim; ++i) b_new[i] = -SymMatrix::inner(N[i], p.C);
    std::vector<SymMatrix> A_new;
    A_new.reserve(pdim);
    for (auto& Ni : N) {
        Ni.scale(-1.0);
        A_new.push_back(std::move(Ni));
    }

    Conversion out;
    out.objective_offset = SymMatrix::inner(p.C, Xp);
    out.feasible_point = Xp;
    out.nullspace_dim = pdim;
    out.problem = SdpProblem(std::move(Xp), std::move(A_new), std::move(b_new));
    return out;
}

Conversion convert_dual_to_primal(const SdpProblem& p) {
    std::vector<SymMatrix> G = nullspace_basis(p);
    SymMatrix Xf = least_norm_feasible(p);

    const int l = static_cast<int>(G.size());
    Vec h(l);
    for (int i = 0; i < l; ++i) h[i] = SymMatrix::inner(G[i], p.C);

    Conversion out;
    out.objective_offset = SymMatrix::inner(p.C, Xf);
    out.feasible_point = Xf;
    out.nullspace_dim = l;
    out.problem = SdpProblem(std::move(Xf), std::move(G), std::move(h));
    return out;
}

}  // namespace sbsdp
