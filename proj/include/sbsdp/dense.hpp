#pragma once

#include <cstddef>
#include <vector>

#include "sbsdp/kernels.hpp"

namespace sbsdp {

using Vec = std::vector<double>;

double vec_dot(const Vec& x, const Vec& y);
double vec_norm(const Vec& x);
bool vec_all_finite(const Vec& x);

/// Dense symmetric matrix, full row-major storage. entries(i,j) == entries(j,i)
/// holds exactly: construction either checks it or mirrors the upper triangle,
/// and every mutation goes through set()/elementwise ops that preserve it.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n);  // zero matrix, n >= 1

    /// Wraps full row-major data; throws InvalidInput unless exactly symmetric.
    static SymMatrix from_full(int n, Vec data);
    /// Mirrors the upper triangle of (possibly asymmetric) full data.
    static SymMatrix from_upper_of(int n, const Vec& data);
    static SymMatrix identity(int n);
    static SymMatrix diag(const Vec& d);

    int order() const { return n_; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    void set(int i, int j, double v);  // sets (i,j) and (j,i)

    const double* data() const { return a_.data(); }
    std::size_t size() const { return a_.size(); }

    double trace() const;
    double frob_norm() const;
    bool all_finite() const;

    void scale(double c) { kernels::scal(c, a_.data(), a_.size()); }
    /// *this += c * other
    void add_scaled(const SymMatrix& other, double c);
    /// rank-one update *this += c * v v^T (v of length n)
    void add_outer(const double* v, double c);

    /// Trace inner product <A, B> = sum_ij A_ij B_ij.
    static double inner(const SymMatrix& A, const SymMatrix& B);

    /// y = M x
    Vec apply(const Vec& x) const;

private:
    int n_ = 0;
    Vec a_;
};

/// A list of vectors in R^dim; row k of `data` is vector k. When the vectors
/// are the columns of a paper-level n x r block, this buffer is exactly that
/// block in column-major order.
struct Basis {
    int dim = 0;
    int count = 0;
    Vec data;

    Basis() = default;
    Basis(int dim_, int count_) : dim(dim_), count(count_), data(static_cast<std::size_t>(dim_) * count_, 0.0) {}

    double* vec(int k) { return data.data() + static_cast<std::size_t>(k) * dim; }
    const double* vec(int k) const { return data.data() + static_cast<std::size_t>(k) * dim; }

    /// Gram deviation max_ij |<v_i, v_j> - delta_ij|.
    double orthonormality_error() const;
    bool all_finite() const;
};

/// T = B^T M B in the column-block reading (T_kl = <b_k, M b_l>), r x r symmetric.
SymMatrix congruence(const Basis& B, const SymMatrix& M);

/// M += c * B diag(w) B^T (sum of weighted outer products of the basis vectors).
void accumulate_outer(SymMatrix& M, const Basis& B, const Vec& w, double c);

}  // namespace sbsdp
