#include "sbsdp/problem.hpp"

#include <cmath>

#include <lapacke.h>

#include "sbsdp/errors.hpp"
#include "sbsdp/sym_eig.hpp"

namespace sbsdp {

Vec GramChol::solve(const Vec& rhs) const {
    Vec x = rhs;
    solve_multi(x, 1);
    return x;
}

void GramChol::solve_multi(Vec& rhs, int nrhs) const {
    lapack_int info =
        LAPACKE_dpotrs(LAPACK_COL_MAJOR, 'L', m_, nrhs, l_.data(), m_, rhs.data(), m_);
    if (info != 0) throw RankDeficient("GramChol::solve failed");
}

Vec GramChol::solve_lower(const Vec& rhs) const {
    Vec x = rhs;
    solve_lower_multi(x, 1);
    return x;
}

void GramChol::solve_lower_multi(Vec& rhs, int nrhs) const {
    // forward substitution, column-major lower factor
    for (int c = 0; c < nrhs; ++c) {
        double* x = rhs.data() + static_cast<std::size_t>(c) * m_;
        for (int j = 0; j < m_; ++j) {
            x[j] /= l_[static_cast<std::size_t>(j) * m_ + j];
            kernels::axpy(-x[j], l_.data() + static_cast<std::size_t>(j) * m_ + j + 1, x + j + 1,
                          m_ - j - 1);
        }
    }
}

Vec GramChol::apply(const Vec& x) const {
    // Q33 = L L^T
    Vec t(m_, 0.0);
    for (int j = 0; j < m_; ++j) {
        double s = 0.0;
        for (int i = j; i < m_; ++i) s += l_[static_cast<std::size_t>(j) * m_ + i] * x[i];
        t[j] = s;
    }
    Vec y(m_, 0.0);
    for (int j = 0; j < m_; ++j)
        kernels::axpy(t[j], l_.data() + static_cast<std::size_t>(j) * m_ + j, y.data() + j, m_ - j);
    return y;
}

SdpProblem::SdpProblem(SymMatrix C_, std::vector<SymMatrix> A_, Vec b_)
    : C(std::move(C_)), A(std::move(A_)), b(std::move(b_)) {
    n = C.order();
    m = static_cast<int>(A.size());
    if (b.size() != static_cast<std::size_t>(m))
        throw InvalidInput("SdpProblem: b length does not match constraint count");
    if (m < 1) throw InvalidInput("SdpProblem: at least one constraint required");
    for (const auto& Ai : A)
        if (Ai.order() != n) throw InvalidInput("SdpProblem: constraint order mismatch");
    if (!C.all_finite() || !vec_all_finite(b))
        throw InvalidInput("SdpProblem: non-finite data");
    for (const auto& Ai : A)
        if (!Ai.all_finite()) throw InvalidInput("SdpProblem: non-finite data");
}

const GramChol& SdpProblem::gram() const {
    auto cache = gram_cache_;
    std::call_once(cache->once, [&] {
        try {
            Vec g(static_cast<std::size_t>(m) * m);
            for (int i = 0; i < m; ++i)
                for (int j = i; j < m; ++j) {
                    double v = SymMatrix::inner(A[i], A[j]);
                    g[static_cast<std::size_t>(j) * m + i] = v;
                    g[static_cast<std::size_t>(i) * m + j] = v;
                }
            lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', m, g.data(), m);
            if (info != 0)
                throw RankDeficient("Q33 Gram matrix is not positive definite");
            double dmin = g[0], dmax = g[0];
            for (int i = 1; i < m; ++i) {
                double d = g[static_cast<std::size_t>(i) * m + i];
                dmin = std::min(dmin, d);
                dmax = std::max(dmax, d);
            }
            if (!(dmin > 0.0) || dmin * dmin <= 1e-14 * dmax * dmax)
                throw RankDeficient("Q33 Gram matrix is numerically singular");
            cache->chol = std::make_shared<const GramChol>(std::move(g), m);
        } catch (...) {
            cache->error = std::current_exception();
        }
    });
    if (cache->error) std::rethrow_exception(cache->error);
    return *cache->chol;
}

Vec apply_A(const SdpProblem& p, const SymMatrix& X) {
    if (X.order() != p.n) throw InvalidInput("apply_A: dimension mismatch");
    Vec out(p.m);
    for (int i = 0; i < p.m; ++i) out[i] = SymMatrix::inner(p.A[i], X);
    return out;
}

SymMatrix apply_At(const SdpProblem& p, const Vec& y) {
    if (y.size() != static_cast<std::size_t>(p.m)) throw InvalidInput("apply_At: dimension mismatch");
    SymMatrix M(p.n);
    for (int i = 0; i < p.m; ++i) M.add_scaled(p.A[i], y[i]);
    return M;
}

ValidationReport validate(const SdpProblem& p) {
    ValidationReport rep;

    SymMatrix gram(p.m);
    for (int i = 0; i < p.m; ++i)
        for (int j = i; j < p.m; ++j) gram.set(i, j, SymMatrix::inner(p.A[i], p.A[j]));
    EigenDecomp ed = eig_sym(gram);
    rep.gram_min_eig = ed.lambda_min();
    const double tol = 1e-12 * std::max(1.0, ed.lambda_max());
    rep.gram_rank = 0;
    for (double v : ed.values)
        if (v > tol) ++rep.gram_rank;
    rep.independent = (rep.gram_rank == p.m);

    // Constant primal trace: identity in span{A_i}. Solve Q33 c = A(I) in the
    // eigenbasis (tolerant to rank deficiency), then check A*(c) == I.
    Vec aI = apply_A(p, SymMatrix::identity(p.n));
    Vec c(p.m, 0.0);
    for (int k = 0; k < p.m; ++k) {
        if (ed.values[k] <= tol) continue;
        double coef = kernels::dot(ed.vectors.vec(k), aI.data(), p.m) / ed.values[k];
        kernels::axpy(coef, ed.vectors.vec(k), c.data(), p.m);
    }
    SymMatrix recon = apply_At(p, c);
    recon.add_scaled(SymMatrix::identity(p.n), -1.0);
    if (recon.frob_norm() <= 1e-8 * std::sqrt(static_cast<double>(p.n))) {
        rep.const_trace_primal = true;
        rep.trace_k = vec_dot(c, p.b);
    }

    rep.const_trace_dual = true;
    for (const auto& Ai : p.A) {
        if (std::abs(Ai.trace()) > 1e-10 * (1.0 + Ai.frob_norm())) {
            rep.const_trace_dual = false;
            break;
        }
    }
    return rep;
}

}  // namespace sbsdp
