#include "sbsdp/dense.hpp"

#include <cmath>
#include <utility>

#include "sbsdp/errors.hpp"

namespace sbsdp {

double vec_dot(const Vec& x, const Vec& y) {
    return kernels::dot(x.data(), y.data(), x.size());
}

double vec_norm(const Vec& x) {
    return std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
}

bool vec_all_finite(const Vec& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

SymMatrix::SymMatrix(int n) : n_(n) {
    if (n < 1) throw InvalidInput("SymMatrix: order must be >= 1");
    a_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

SymMatrix SymMatrix::from_full(int n, Vec data) {
    if (n < 1) throw InvalidInput("SymMatrix: order must be >= 1");
    if (data.size() != static_cast<std::size_t>(n) * n)
        throw InvalidInput("SymMatrix: data size does not match order");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (data[static_cast<std::size_t>(i) * n + j] != data[static_cast<std::size_t>(j) * n + i])
                throw InvalidInput("SymMatrix: input not symmetric");
    SymMatrix M(n);
    M.a_ = std::move(data);
    return M;
}

SymMatrix SymMatrix::from_upper_of(int n, const Vec& data) {
    if (n < 1) throw InvalidInput("SymMatrix: order must be >= 1");
    if (data.size() != static_cast<std::size_t>(n) * n)
        throw InvalidInput("SymMatrix: data size does not match order");
    SymMatrix M(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = data[static_cast<std::size_t>(i) * n + j];
            M.a_[static_cast<std::size_t>(i) * n + j] = v;
            M.a_[static_cast<std::size_t>(j) * n + i] = v;
        }
    return M;
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix M(n);
    for (int i = 0; i < n; ++i) M.a_[static_cast<std::size_t>(i) * n + i] = 1.0;
    return M;
}

SymMatrix SymMatrix::diag(const Vec& d) {
    SymMatrix M(static_cast<int>(d.size()));
    for (int i = 0; i < M.n_; ++i) M.a_[static_cast<std::size_t>(i) * M.n_ + i] = d[i];
    return M;
}

void SymMatrix::set(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * n_ + j] = v;
    a_[static_cast<std::size_t>(j) * n_ + i] = v;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += a_[static_cast<std::size_t>(i) * n_ + i];
    return t;
}

double SymMatrix::frob_norm() const {
    return std::sqrt(kernels::dot(a_.data(), a_.data(), a_.size()));
}

bool SymMatrix::all_finite() const {
    return vec_all_finite(a_);
}

void SymMatrix::add_scaled(const SymMatrix& other, double c) {
    if (other.n_ != n_) throw InvalidInput("SymMatrix::add_scaled: order mismatch");
    kernels::axpy(c, other.a_.data(), a_.data(), a_.size());
}

void SymMatrix::add_outer(const double* v, double c) {
    for (int i = 0; i < n_; ++i) {
        for (int j = i; j < n_; ++j) {
            double upd = c * v[i] * v[j];
            a_[static_cast<std::size_t>(i) * n_ + j] += upd;
            if (j != i) a_[static_cast<std::size_t>(j) * n_ + i] += upd;
        }
    }
}

double SymMatrix::inner(const SymMatrix& A, const SymMatrix& B) {
    if (A.n_ != B.n_) throw InvalidInput("SymMatrix::inner: order mismatch");
    return kernels::dot(A.a_.data(), B.a_.data(), A.a_.size());
}

Vec SymMatrix::apply(const Vec& x) const {
    if (x.size() != static_cast<std::size_t>(n_)) throw InvalidInput("SymMatrix::apply: size mismatch");
    Vec y(n_);
    for (int i = 0; i < n_; ++i)
        y[i] = kernels::dot(a_.data() + static_cast<std::size_t>(i) * n_, x.data(), n_);
    return y;
}

double Basis::orthonormality_error() const {
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        for (int j = i; j < count; ++j) {
            double g = kernels::dot(vec(i), vec(j), dim);
            double dev = std::abs(g - (i == j ? 1.0 : 0.0));
            if (dev > worst) worst = dev;
        }
    }
    return worst;
}

bool Basis::all_finite() const {
    return vec_all_finite(data);
}

SymMatrix congruence(const Basis& B, const SymMatrix& M) {
    if (B.dim != M.order()) throw InvalidInput("congruence: dimension mismatch");
    const int r = B.count;
    // Y rows: y_k = M b_k
    Basis Y(B.dim, r);
    for (int k = 0; k < r; ++k) {
        Vec yk = M.apply(Vec(B.vec(k), B.vec(k) + B.dim));
        std::copy(yk.begin(), yk.end(), Y.vec(k));
    }
    SymMatrix T(r);
    for (int k = 0; k < r; ++k)
        for (int l = k; l < r; ++l)
            T.set(k, l, kernels::dot(B.vec(k), Y.vec(l), B.dim));
    return T;
}

void accumulate_outer(SymMatrix& M, const Basis& B, const Vec& w, double c) {
    if (B.dim != M.order() || w.size() != static_cast<std::size_t>(B.count))
        throw InvalidInput("accumulate_outer: dimension mismatch");
    for (int k = 0; k < B.count; ++k) M.add_outer(B.vec(k), c * w[k]);
}

}  // namespace sbsdp
