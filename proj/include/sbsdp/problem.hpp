#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "sbsdp/dense.hpp"

namespace sbsdp {

/// Cholesky factor of the m x m constraint Gram matrix Q33 with
/// Q33(i,j) = <A_i, A_j>. Built once per problem and shared.
class GramChol {
public:
    GramChol(Vec lower, int m) : l_(std::move(lower)), m_(m) {}
    int order() const { return m_; }
    /// Solves Q33 x = rhs.
    Vec solve(const Vec& rhs) const;
    /// In-place multi-RHS solve; rhs holds nrhs column-major columns.
    void solve_multi(Vec& rhs, int nrhs) const;
    /// Solves L x = rhs (forward substitution with the lower factor).
    Vec solve_lower(const Vec& rhs) const;
    /// In-place multi-RHS forward substitution.
    void solve_lower_multi(Vec& rhs, int nrhs) const;
    /// y = Q33 x
    Vec apply(const Vec& x) const;

private:
    Vec l_;  // m x m column-major, lower triangle holds the factor
    int m_;
};

/// Data (C, A_1..A_m, b) of the primal/dual SDP pair, immutable after
/// construction. The Gram factorization is built lazily under a lock and
/// shared by all users of the problem.
struct SdpProblem {
    int n = 0;
    int m = 0;
    SymMatrix C;
    std::vector<SymMatrix> A;
    Vec b;

    SdpProblem() = default;
    SdpProblem(SymMatrix C_, std::vector<SymMatrix> A_, Vec b_);

    /// Cached factorization of Q33; throws RankDeficient if Q33 is singular.
    const GramChol& gram() const;

private:
    struct GramCache {
        std::once_flag once;
        std::shared_ptr<const GramChol> chol;
        std::exception_ptr error;
    };
    std::shared_ptr<GramCache> gram_cache_ = std::make_shared<GramCache>();
};

/// A(X) = [<A_1,X>, ..., <A_m,X>]
Vec apply_A(const SdpProblem& p, const SymMatrix& X);
/// A*(y) = sum_i y_i A_i
SymMatrix apply_At(const SdpProblem& p, const Vec& y);

struct ValidationReport {
    int gram_rank = 0;
    double gram_min_eig = 0.0;
    bool independent = false;
    /// A(X)=b forces tr(X) = trace_k (identity lies in span{A_i}).
    bool const_trace_primal = false;
    double trace_k = 0.0;
    /// tr(A_i) = 0 for all i, so the dual slack has constant trace tr(C).
    bool const_trace_dual = false;
};

ValidationReport validate(const SdpProblem& p);

/// Optimal triple attached to generated instances.
struct KnownSolution {
    SymMatrix X_star;
    Vec y_star;
    SymMatrix Z_star;
    int rank_X = 0;
    int rank_Z = 0;
};

}  // namespace sbsdp
