#include "sbsdp/subqp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>

#include <lapacke.h>

#include "sbsdp/errors.hpp"

namespace sbsdp {

namespace {

Vec flatten(const SymMatrix& S) {
    return Vec(S.data(), S.data() + S.size());
}

SymMatrix unflatten(int r, const Vec& v) {
    // symmetric by construction of every producer; mirror the upper triangle
    return SymMatrix::from_upper_of(r, v);
}

}  // namespace

Vec SubQp::apply_M22(const Vec& s) const {
    Vec out(s.size(), 0.0);
    if (m22_diag != 0.0) kernels::axpy(m22_diag, s.data(), out.data(), s.size());
    if (bq > 0) {
        Vec t(bq, 0.0);
        const std::size_t rr = s.size();
        for (std::size_t k = 0; k < rr; ++k)
            if (s[k] != 0.0) kernels::axpy(s[k], B.data() + k * bq, t.data(), bq);
        for (std::size_t k = 0; k < rr; ++k)
            out[k] += m22_sign * kernels::dot(B.data() + k * bq, t.data(), bq);
    }
    return out;
}

Vec SubQp::M22_dense() const {
    const std::size_t rr = static_cast<std::size_t>(r) * r;
    Vec dense(rr * rr, 0.0);
    for (std::size_t k = 0; k < rr; ++k) dense[k * rr + k] = m22_diag;
    for (std::size_t k = 0; k < rr; ++k)
        for (std::size_t l = 0; l < rr; ++l)
            dense[k * rr + l] +=
                m22_sign * kernels::dot(B.data() + k * bq, B.data() + l * bq, bq);
    return dense;
}

double SubQp::objective(double gamma, const Vec& vecS) const {
    double quad = gamma * gamma * M11 + 2.0 * gamma * vec_dot(M12, vecS);
    quad += m22_diag * vec_dot(vecS, vecS);
    if (bq > 0) {
        Vec t(bq, 0.0);
        for (std::size_t k = 0; k < vecS.size(); ++k)
            if (vecS[k] != 0.0) kernels::axpy(vecS[k], B.data() + k * bq, t.data(), bq);
        quad += m22_sign * vec_dot(t, t);
    }
    return quad + m1 * gamma + vec_dot(m2, vecS);
}

std::pair<SubQp, YRecovery> build_sbmp_subqp(const SdpProblem& p, const BundleModel& model,
                                             const SymMatrix& Omega, double alpha) {
    if (Omega.order() != p.n) throw InvalidInput("build_sbmp_subqp: dimension mismatch");
    if (alpha <= 0.0) throw InvalidInput("build_sbmp_subqp: alpha must be positive");
    const GramChol& gram = p.gram();

    const int r = model.r();
    const int rr = r * r;
    const int m = p.m;

    const double Q11 = SymMatrix::inner(model.W_bar, model.W_bar);
    Vec Q12 = flatten(congruence(model.P, model.W_bar));
    Vec Q13 = apply_A(p, model.W_bar);

    // Q23^T, m x r^2 column-major: column k holds (P^T A_i P)_k over i
    Vec Q23t(static_cast<std::size_t>(m) * rr);
    for (int i = 0; i < m; ++i) {
        Vec ai = flatten(congruence(model.P, p.A[i]));
        for (int k = 0; k < rr; ++k) Q23t[static_cast<std::size_t>(k) * m + i] = ai[k];
    }

    Vec aOmega = apply_A(p, Omega);
    Vec aC = apply_A(p, p.C);
    const double q1 =
        -2.0 * SymMatrix::inner(model.W_bar, p.C) + 2.0 * alpha * SymMatrix::inner(model.W_bar, Omega);
    Vec q2 = flatten(congruence(model.P, Omega));
    kernels::scal(2.0 * alpha, q2.data(), q2.size());
    {
        Vec cP = flatten(congruence(model.P, p.C));
        kernels::axpy(-2.0, cP.data(), q2.data(), q2.size());
    }
    Vec q3(m);
    for (int i = 0; i < m; ++i) q3[i] = -(2.0 * alpha * (p.b[i] - aOmega[i]) + 2.0 * aC[i]);

    YRecovery rec;
    rec.m = m;
    rec.r = r;
    rec.q3 = q3;
    rec.Q13 = Q13;
    rec.Q23t = Q23t;
    {
        Vec rhs(m);
        for (int i = 0; i < m; ++i) rhs[i] = -0.5 * q3[i];
        rec.u0 = gram.solve(rhs);
    }
    rec.u1 = gram.solve(Q13);
    rec.U2 = Q23t;
    gram.solve_multi(rec.U2, rr);

    SubQp q;
    q.r = r;
    q.rho = model.rho;
    q.M11 = Q11 - vec_dot(Q13, rec.u1);
    q.M12.resize(rr);
    q.m2.resize(rr);
    for (int k = 0; k < rr; ++k) {
        const double* col = Q23t.data() + static_cast<std::size_t>(k) * m;
        q.M12[k] = Q12[k] - kernels::dot(rec.u1.data(), col, m);
        q.m2[k] = q2[k] + 2.0 * kernels::dot(rec.u0.data(), col, m);
    }
    q.m1 = q1 + 2.0 * vec_dot(Q13, rec.u0);
    // M22 = I - (L^{-1} Q23^T)^T (L^{-1} Q23^T)
    q.m22_diag = 1.0;
    q.m22_sign = -1.0;
    q.bq = m;
    q.B = Q23t;
    gram.solve_lower_multi(q.B, rr);

    // constant so that (objective + constant)/(2 alpha) equals the master
    // objective at (W(gamma,S), y(gamma,S)); fixed by matching at the origin.
    {
        SymMatrix R = apply_At(p, rec.u0);  // W=0, y=u0: residual W - C + A*(y)
        R.add_scaled(p.C, -1.0);
        double master0 = -SymMatrix::inner(p.C, Omega);
        for (int i = 0; i < m; ++i) master0 -= (p.b[i] - aOmega[i]) * rec.u0[i];
        master0 += SymMatrix::inner(R, R) / (2.0 * alpha);
        q.constant = 2.0 * alpha * master0;
    }
    return {std::move(q), std::move(rec)};
}

SubQp build_sbmd_subqp(const SdpProblem& p, const BundleModel& model, const Vec& omega,
                       double alpha) {
    if (omega.size() != static_cast<std::size_t>(p.m))
        throw InvalidInput("build_sbmd_subqp: dimension mismatch");
    if (alpha <= 0.0) throw InvalidInput("build_sbmd_subqp: alpha must be positive");

    const int r = model.r();
    const int rr = r * r;
    const int m = p.m;

    Vec aW = apply_A(p, model.W_bar);

    SubQp q;
    q.r = r;
    q.rho = model.rho;
    q.M11 = vec_dot(aW, aW);
    q.M12 = flatten(congruence(model.P, apply_At(p, aW)));
    q.m22_diag = 0.0;
    q.m22_sign = 1.0;
    q.bq = m;
    q.B.resize(static_cast<std::size_t>(m) * rr);
    for (int i = 0; i < m; ++i) {
        Vec ai = flatten(congruence(model.P, p.A[i]));
        for (int k = 0; k < rr; ++k) q.B[static_cast<std::size_t>(k) * m + i] = ai[k];
    }

    // H = -2 A*(b) + 2 alpha (C - A*(omega))
    SymMatrix H = apply_At(p, p.b);
    H.scale(-2.0);
    {
        SymMatrix G = apply_At(p, omega);
        G.scale(-1.0);
        G.add_scaled(p.C, 1.0);
        H.add_scaled(G, 2.0 * alpha);
    }
    q.m1 = SymMatrix::inner(H, model.W_bar);
    q.m2 = flatten(congruence(model.P, H));
    q.constant = 2.0 * alpha * vec_dot(p.b, omega) + vec_dot(p.b, p.b);
    return q;
}

namespace {

// Symmetric 2x2 eigen pair, analytic.
void eig2(double a, double b, double c, double lam[2], double v0[2], double v1[2]) {
    const double tr = a + c;
    const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
    lam[0] = 0.5 * (tr + disc);
    lam[1] = 0.5 * (tr - disc);
    if (std::abs(b) > 0.0) {
        double t0[2] = {lam[0] - c, b};
        double n0 = std::hypot(t0[0], t0[1]);
        v0[0] = t0[0] / n0;
        v0[1] = t0[1] / n0;
        v1[0] = -v0[1];
        v1[1] = v0[0];
    } else if (a >= c) {
        v0[0] = 1.0; v0[1] = 0.0; v1[0] = 0.0; v1[1] = 1.0;
    } else {
        v0[0] = 0.0; v0[1] = 1.0; v1[0] = 1.0; v1[1] = 0.0;
    }
}

}  // namespace

R1Solution solve_r1(double M11, double M12, double M22, double m1, double m2, double rho) {
    if (rho <= 0.0) throw InvalidInput("solve_r1: rho must be positive");
    const double scale = std::max({1.0, std::abs(M11), std::abs(M22), std::abs(M12)});
    double lam[2], v0[2], v1[2];
    eig2(M11, M12, M22, lam, v0, v1);
    if (lam[1] < -1e-9 * scale) throw InvalidInput("solve_r1: quadratic block is not PSD");

    auto f = [&](double g, double s) {
        return g * (M11 * g + M12 * s) + s * (M12 * g + M22 * s) + m1 * g + m2 * s;
    };

    // unconstrained minimizer -M^dagger m / 2, valid when it is stationary
    {
        const double tol = 1e-14 * std::max(std::abs(lam[0]), 1.0);
        double g = 0.0, s = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double* v = (k == 0) ? v0 : v1;
            if (std::abs(lam[k]) <= tol) continue;
            double coef = -(v[0] * m1 + v[1] * m2) / (2.0 * lam[k]);
            g += coef * v[0];
            s += coef * v[1];
        }
        double res0 = 2.0 * (M11 * g + M12 * s) + m1;
        double res1 = 2.0 * (M12 * g + M22 * s) + m2;
        bool stationary = std::hypot(res0, res1) <= 1e-12 * (1.0 + std::hypot(m1, m2));
        if (stationary && g >= 0.0 && s >= 0.0 && g + s <= rho) return {g, s, f(g, s)};
    }

    // segment minimizers, ties kept in order v1, v2, v3
    auto segment_1d = [&](double quad, double lin) {
        // argmin quad*t^2 + lin*t over [0, rho]
        if (quad > 0.0) return std::clamp(-lin / (2.0 * quad), 0.0, rho);
        if (lin > 0.0) return 0.0;
        if (lin < 0.0) return rho;
        return 0.0;
    };
    const double g1 = segment_1d(M11, m1);               // (g, 0)
    const double s2 = segment_1d(M22, m2);               // (0, s)
    double g3;                                           // (g, rho - g)
    {
        const double denom = 2.0 * M11 + 2.0 * M22 - 4.0 * M12;
        if (denom > 0.0) {
            const double phi = (2.0 * rho * M22 - 2.0 * rho * M12 - m1 + m2) / denom;
            g3 = std::clamp(phi, 0.0, rho);
        } else {
            const double slope = 2.0 * rho * M12 - 2.0 * rho * M22 + m1 - m2;
            g3 = slope > 0.0 ? 0.0 : (slope < 0.0 ? rho : 0.0);
        }
    }

    R1Solution best{g1, 0.0, f(g1, 0.0)};
    if (double f2 = f(0.0, s2); f2 < best.objective) best = {0.0, s2, f2};
    if (double f3 = f(g3, rho - g3); f3 < best.objective) best = {g3, rho - g3, f3};
    return best;
}

namespace {

// Projection of z onto {z >= 0, sum(z) <= rho}: clip, then water-fill onto the
// simplex when the clipped sum still exceeds the budget.
void project_budget(Vec& z, double rho) {
    double sum = 0.0;
    for (double& v : z) {
        if (v < 0.0) v = 0.0;
        sum += v;
    }
    if (sum <= rho) return;
    Vec sorted = z;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double acc = 0.0, tau = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        acc += sorted[i];
        double cand = (acc - rho) / static_cast<double>(i + 1);
        if (cand < sorted[i]) {
            tau = cand;
            k = static_cast<int>(i + 1);
        }
    }
    (void)k;
    for (double& v : z) v = std::max(0.0, v - tau);
}

struct ConeIterate {
    double gamma = 0.0;
    Vec S;  // r x r flattened, symmetric
};

// Active-face KKT polish. Guesses the optimal face from the current iterate
// (kept eigenvectors of S, gamma sign, budget activity), solves the
// equality-constrained QP restricted to that face, and proposes the result.
// The caller accepts it only when the projected-gradient residual verifies.
//
// In the reduced face coordinates the S-block Hessian is
// m22_diag * I + m22_sign * (BU)^T (BU) with BU of size bq x d, so for the
// primal-style structure (diag 1, sign -1) the stationarity solve goes
// through the bq x bq capacitance I - (BU)(BU)^T (Woodbury); otherwise a
// dense reduced system is factored, which is cheap for small models.
bool face_polish(const SubQp& q, const ConeIterate& v, ConeIterate& out) {
    const int r = q.r;
    const std::size_t rr = static_cast<std::size_t>(r) * r;

    EigenDecomp sd = eig_sym(SymMatrix::from_upper_of(r, v.S));
    double tr_S = 0.0;
    for (double lam : sd.values) tr_S += lam;
    const double scale = std::max({1.0, q.rho, sd.values.empty() ? 0.0 : sd.values[0], v.gamma});

    int k = 0;
    while (k < r && sd.values[k] > 1e-9 * scale) ++k;
    const bool gamma_free = v.gamma > 1e-9 * scale;
    const bool tight = v.gamma + tr_S >= q.rho - 1e-7 * scale;

    const int d = k * (k + 1) / 2;
    const double sq2 = std::sqrt(2.0);
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(d);
    for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) pairs.push_back({a, b});

    // reduced congruence Q+^T mat(T) Q+ in vech coordinates (sqrt(2)-scaled
    // off-diagonals so the face basis is orthonormal)
    Vec Y(static_cast<std::size_t>(k) * r);
    auto reduce = [&](const double* Tflat, Vec& out_red) {
        for (int a = 0; a < k; ++a) {
            const double* qa = sd.vectors.vec(a);
            for (int i = 0; i < r; ++i)
                Y[static_cast<std::size_t>(a) * r + i] =
                    kernels::dot(Tflat + static_cast<std::size_t>(i) * r, qa, r);
        }
        out_red.assign(d, 0.0);
        for (int idx = 0; idx < d; ++idx) {
            auto [a, b] = pairs[idx];
            double acc = kernels::dot(sd.vectors.vec(a), Y.data() + static_cast<std::size_t>(b) * r, r);
            out_red[idx] = (a == b) ? acc : sq2 * acc;
        }
    };

    Vec c_S;  // reduced m2
    reduce(q.m2.data(), c_S);
    Vec h_gS;  // reduced M12
    if (gamma_free) reduce(q.M12.data(), h_gS);
    Vec a_vec(d, 0.0);  // reduced trace row
    for (int idx = 0; idx < d; ++idx)
        if (pairs[idx].first == pairs[idx].second) a_vec[idx] = 1.0;

    // BU: bq x d, column-major like B
    Vec BU;
    if (q.bq > 0) {
        BU.assign(static_cast<std::size_t>(q.bq) * d, 0.0);
        Vec Ti(rr), red;
        for (int i = 0; i < q.bq; ++i) {
            for (std::size_t kk = 0; kk < rr; ++kk) Ti[kk] = q.B[kk * q.bq + i];
            reduce(Ti.data(), red);
            for (int j = 0; j < d; ++j) BU[static_cast<std::size_t>(j) * q.bq + i] = red[j];
        }
    }

    double gamma = 0.0, tau = 0.0;
    Vec z(d, 0.0);
    bool solved = false;

    // fast path for the primal-style structure M22 = I - B^T B: stationarity
    // through the bq x bq capacitance I - (BU)(BU)^T, with gamma and the
    // budget multiplier as scalar borders
    if (q.m22_diag == 1.0 && q.m22_sign == -1.0 && q.bq > 0 && d > 0) {
        do {
            Vec cap(static_cast<std::size_t>(q.bq) * q.bq, 0.0);
            for (int i = 0; i < q.bq; ++i) cap[static_cast<std::size_t>(i) * q.bq + i] = 1.0;
            for (int j = 0; j < d; ++j) {
                const double* col = BU.data() + static_cast<std::size_t>(j) * q.bq;
                for (int i = 0; i < q.bq; ++i)
                    kernels::axpy(-col[i], col, cap.data() + static_cast<std::size_t>(i) * q.bq,
                                  q.bq);
            }
            std::vector<lapack_int> ipiv(q.bq);
            if (LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', q.bq, cap.data(), q.bq, ipiv.data()) != 0)
                break;
            auto wsolve = [&](const Vec& rhs, Vec& x) {
                Vec bu(q.bq, 0.0);
                for (int i = 0; i < q.bq; ++i) {
                    double acc = 0.0;
                    for (int j = 0; j < d; ++j)
                        acc += BU[static_cast<std::size_t>(j) * q.bq + i] * rhs[j];
                    bu[i] = acc;
                }
                if (LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', q.bq, 1, cap.data(), q.bq, ipiv.data(),
                                   bu.data(), q.bq) != 0)
                    return false;
                x = rhs;
                for (int j = 0; j < d; ++j)
                    x[j] += kernels::dot(BU.data() + static_cast<std::size_t>(j) * q.bq,
                                         bu.data(), q.bq);
                return true;
            };

            Vec X0(d, 0.0), X1, X2;
            Vec rhs(d);
            for (int j = 0; j < d; ++j) rhs[j] = -0.5 * c_S[j];
            if (!wsolve(rhs, X0)) break;
            if (tight) {
                for (int j = 0; j < d; ++j) rhs[j] = -0.5 * a_vec[j];
                X1.assign(d, 0.0);
                if (!wsolve(rhs, X1)) break;
            }
            if (gamma_free) {
                for (int j = 0; j < d; ++j) rhs[j] = -h_gS[j];
                X2.assign(d, 0.0);
                if (!wsolve(rhs, X2)) break;
            }

            bool scalars_ok = true;
            if (!gamma_free && tight) {
                double denom = vec_dot(a_vec, X1);
                if (std::abs(denom) < 1e-12) scalars_ok = false;
                else tau = (q.rho - vec_dot(a_vec, X0)) / denom;
            } else if (gamma_free && !tight) {
                double a11 = 2.0 * q.M11 + 2.0 * vec_dot(h_gS, X2);
                if (std::abs(a11) < 1e-12) scalars_ok = false;
                else gamma = -(q.m1 + 2.0 * vec_dot(h_gS, X0)) / a11;
            } else if (gamma_free && tight) {
                double a11 = 2.0 * q.M11 + 2.0 * vec_dot(h_gS, X2);
                double a12 = 1.0 + 2.0 * vec_dot(h_gS, X1);
                double a21 = 1.0 + vec_dot(a_vec, X2);
                double a22 = vec_dot(a_vec, X1);
                double b1 = -(q.m1 + 2.0 * vec_dot(h_gS, X0));
                double b2 = q.rho - vec_dot(a_vec, X0);
                double det = a11 * a22 - a12 * a21;
                if (std::abs(det) < 1e-12 * (1.0 + std::abs(a11) + std::abs(a22)))
                    scalars_ok = false;
                else {
                    gamma = (b1 * a22 - a12 * b2) / det;
                    tau = (a11 * b2 - b1 * a21) / det;
                }
            }
            if (!scalars_ok) break;

            z = X0;
            if (gamma_free) kernels::axpy(gamma, X2.data(), z.data(), d);
            if (tight) kernels::axpy(tau, X1.data(), z.data(), d);
            solved = true;
        } while (false);
    }

    // general path: full bordered KKT system solved by minimum norm, which
    // tolerates the gamma <-> S flat direction of constant-trace models and
    // rank-deficient reduced Hessians
    if (!solved) {
        if (d > 900) return false;
        const int g_off = gamma_free ? 1 : 0;
        const int dim = g_off + d + (tight ? 1 : 0);
        if (dim == 0) return false;
        Vec K(static_cast<std::size_t>(dim) * dim, 0.0);
        Vec rhs(dim, 0.0);
        auto at = [&](int i, int j) -> double& {
            return K[static_cast<std::size_t>(j) * dim + i];
        };
        if (gamma_free) {
            at(0, 0) = 2.0 * q.M11;
            for (int j = 0; j < d; ++j) {
                at(0, g_off + j) = 2.0 * h_gS[j];
                at(g_off + j, 0) = 2.0 * h_gS[j];
            }
            rhs[0] = -q.m1;
        }
        for (int a = 0; a < d; ++a) {
            at(g_off + a, g_off + a) += 2.0 * q.m22_diag;
            rhs[g_off + a] = -c_S[a];
        }
        if (q.bq > 0) {
            for (int a = 0; a < d; ++a)
                for (int b = a; b < d; ++b) {
                    double gval = 2.0 * q.m22_sign *
                                  kernels::dot(BU.data() + static_cast<std::size_t>(a) * q.bq,
                                               BU.data() + static_cast<std::size_t>(b) * q.bq,
                                               q.bq);
                    at(g_off + a, g_off + b) += gval;
                    if (a != b) at(g_off + b, g_off + a) += gval;
                }
        }
        if (tight) {
            const int tcol = g_off + d;
            if (gamma_free) {
                at(0, tcol) = 1.0;
                at(tcol, 0) = 1.0;
            }
            for (int a = 0; a < d; ++a) {
                at(g_off + a, tcol) = a_vec[a];
                at(tcol, g_off + a) = a_vec[a];
            }
            rhs[tcol] = q.rho;
        }
        Vec K_copy = K;
        Vec rhs_copy = rhs;
        Vec sv(dim);
        lapack_int rank = 0;
        if (LAPACKE_dgelsd(LAPACK_COL_MAJOR, dim, dim, 1, K.data(), dim, rhs.data(), dim,
                           sv.data(), 1e-12, &rank) != 0)
            return false;
        if (std::getenv("SBSDP_DEBUG_POLISH")) {
            double worst = 0.0;
            for (int i = 0; i < dim; ++i) {
                double acc = 0.0;
                for (int j = 0; j < dim; ++j)
                    acc += K_copy[static_cast<std::size_t>(j) * dim + i] * rhs[j];
                worst = std::max(worst, std::abs(acc - rhs_copy[i]));
            }
            std::fprintf(stderr,
                         "    dense kkt: k=%d d=%d dim=%d rank=%d gamma_free=%d tight=%d sys_resid=%.2e\n",
                         k, d, dim, (int)rank, (int)gamma_free, (int)tight, worst);
        }
        if (gamma_free) gamma = rhs[0];
        for (int a = 0; a < d; ++a) z[a] = rhs[g_off + a];
        solved = true;
    }
    if (!solved) return false;

    out.gamma = gamma_free ? gamma : 0.0;
    Vec Sacc(rr, 0.0);
    for (int idx = 0; idx < d; ++idx) {
        auto [a, b] = pairs[idx];
        double zv = z[idx];
        if (zv == 0.0) continue;
        const double* qa = sd.vectors.vec(a);
        const double* qb = sd.vectors.vec(b);
        const double coef = (a == b) ? zv : zv / sq2;
        for (int i = 0; i < r; ++i) {
            if (a == b) {
                kernels::axpy(coef * qa[i], qa, Sacc.data() + static_cast<std::size_t>(i) * r, r);
            } else {
                kernels::axpy(coef * qa[i], qb, Sacc.data() + static_cast<std::size_t>(i) * r, r);
                kernels::axpy(coef * qb[i], qa, Sacc.data() + static_cast<std::size_t>(i) * r, r);
            }
        }
    }
    out.S = std::move(Sacc);
    return true;
}

// Projection onto {gamma >= 0, S PSD, gamma + tr(S) <= rho} through the
// eigen-decomposition of S.
ConeIterate project_cone(int r, double gamma, const Vec& S, double rho) {
    EigenDecomp d = eig_sym(unflatten(r, S));
    Vec z(static_cast<std::size_t>(r) + 1);
    z[0] = gamma;
    for (int k = 0; k < r; ++k) z[k + 1] = d.values[k];
    project_budget(z, rho);
    SymMatrix Sp(r);
    for (int k = 0; k < r; ++k)
        if (z[k + 1] != 0.0) Sp.add_outer(d.vectors.vec(k), z[k + 1]);
    return {z[0], flatten(Sp)};
}

}  // namespace

SubqpSolution solve_subqp(const SubQp& q, double tol, int max_iter) {
    if (q.r < 1) throw InvalidInput("solve_subqp: r must be >= 1");
    if (tol < 0.0) throw InvalidInput("solve_subqp: tol must be nonnegative");

    SubqpSolution out;
    if (q.r == 1) {
        double M22 = q.m22_diag;
        if (q.bq > 0) M22 += q.m22_sign * kernels::dot(q.B.data(), q.B.data(), q.bq);
        R1Solution r1 = solve_r1(q.M11, q.M12[0], M22, q.m1, q.m2[0], q.rho);
        out.gamma = r1.gamma;
        out.S = SymMatrix::diag({r1.s});
        out.kkt_residual = 0.0;
        out.iterations = 0;
        return out;
    }

    const int r = q.r;
    const std::size_t rr = static_cast<std::size_t>(r) * r;

    auto grad = [&](const ConeIterate& v, double& gg, Vec& gS) {
        gg = 2.0 * (q.M11 * v.gamma + vec_dot(q.M12, v.S)) + q.m1;
        gS = q.apply_M22(v.S);
        kernels::scal(2.0, gS.data(), rr);
        kernels::axpy(2.0 * v.gamma, q.M12.data(), gS.data(), rr);
        kernels::axpy(1.0, q.m2.data(), gS.data(), rr);
    };
    auto fval = [&](const ConeIterate& v) { return q.objective(v.gamma, v.S); };

    // Lipschitz constant of the gradient: 2 * lambda_max(M) by power iteration.
    double L;
    {
        double pg = 1.0;
        Vec pS(rr, 1.0);
        double lam = 0.0;
        for (int it = 0; it < 60; ++it) {
            double norm = std::sqrt(pg * pg + vec_dot(pS, pS));
            if (norm == 0.0) break;
            pg /= norm;
            kernels::scal(1.0 / norm, pS.data(), rr);
            double ng = q.M11 * pg + vec_dot(q.M12, pS);
            Vec nS = q.apply_M22(pS);
            kernels::axpy(pg, q.M12.data(), nS.data(), rr);
            lam = pg * ng + vec_dot(pS, nS);
            pg = ng;
            pS = std::move(nS);
        }
        L = std::max(2.0 * 1.05 * std::abs(lam), 1e-12);
    }
    const double step = 1.0 / L;
    const double m_norm = std::sqrt(q.m1 * q.m1 + vec_dot(q.m2, q.m2));
    const double stop = tol * (1.0 + m_norm);

    auto pg_step = [&](const ConeIterate& v, double sz) {
        double gg;
        Vec gS;
        grad(v, gg, gS);
        Vec S = v.S;
        kernels::axpy(-sz, gS.data(), S.data(), rr);
        return project_cone(r, v.gamma - sz * gg, S, q.rho);
    };
    auto residual_at = [&](const ConeIterate& v) {
        ConeIterate w = pg_step(v, 1.0);  // unit-step projected-gradient map
        double dg = v.gamma - w.gamma;
        Vec dS = v.S;
        kernels::axpy(-1.0, w.S.data(), dS.data(), rr);
        return std::sqrt(dg * dg + vec_dot(dS, dS));
    };

    ConeIterate v{0.0, Vec(rr, 0.0)};
    double f_v = fval(v);
    ConeIterate w = v;
    double t_mom = 1.0;
    out.stalled = true;
    out.iterations = max_iter;

    // face polish is attempted on a geometric schedule once the iterate has
    // had a chance to localize the active face
    int next_polish = std::getenv("SBSDP_NO_POLISH") ? (1 << 30) : 10;
    double stagnation_ref = std::numeric_limits<double>::infinity();
    const bool polish_debug = std::getenv("SBSDP_DEBUG_POLISH") != nullptr;
    // The face basis is only as accurate as the iterate it came from, so the
    // solve is iterated: each round re-derives the face from the previous
    // polished point, converging the basis quadratically.
    auto try_polish = [&](int it) -> bool {
        ConeIterate base = v;
        double best_res = std::numeric_limits<double>::infinity();
        for (int round = 0; round < 30; ++round) {
            ConeIterate polished;
            if (!face_polish(q, base, polished)) {
                if (polish_debug) std::fprintf(stderr, "  polish@%d/%d: face solve failed\n", it, round);
                return false;
            }
            polished = project_cone(r, polished.gamma, polished.S, q.rho);
            double res = residual_at(polished);
            if (polish_debug)
                std::fprintf(stderr, "  polish@%d/%d: res=%.2e stop=%.2e f=%.6e f_v=%.6e\n", it,
                             round, res, stop, fval(polished), f_v);
            if (res <= stop && fval(polished) <= f_v + 1e-12 * (1.0 + std::abs(f_v))) {
                v = std::move(polished);
                out.stalled = false;
                out.iterations = it;
                out.kkt_residual = res;
                return true;
            }
            if (res >= 0.7 * best_res) return false;  // not contracting
            best_res = res;
            // a single projected-gradient step re-injects face directions the
            // polished point cannot represent (its S-span is the guessed face)
            base = pg_step(polished, step);
        }
        return false;
    };

    for (int it = 1; it <= max_iter; ++it) {
        ConeIterate cand = pg_step(w, step);
        double f_cand = fval(cand);
        if (f_cand > f_v) {
            // momentum overshoot: restart from the last monotone iterate
            t_mom = 1.0;
            cand = pg_step(v, step);
            f_cand = fval(cand);
        }
        ConeIterate v_prev = std::move(v);
        v = std::move(cand);
        f_v = f_cand;

        double res = residual_at(v);
        if (res <= stop) {
            out.stalled = false;
            out.iterations = it;
            out.kkt_residual = res;
            break;
        }
        out.kkt_residual = res;

        // numerical-floor stagnation: give up early rather than burning the
        // full budget, the caller treats the iterate as a null-step candidate
        if (it % 250 == 0) {
            if (res >= 0.995 * stagnation_ref) {
                out.iterations = it;
                break;
            }
            stagnation_ref = res;
        }

        if (it >= next_polish) {
            next_polish = it + std::max(15, it);
            if (try_polish(it)) break;
        }

        double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
        double mix = (t_mom - 1.0) / t_new;
        w.gamma = v.gamma + mix * (v.gamma - v_prev.gamma);
        w.S = v.S;
        kernels::scal(1.0 + mix, w.S.data(), rr);
        kernels::axpy(-mix, v_prev.S.data(), w.S.data(), rr);
        t_mom = t_new;
    }

    out.gamma = v.gamma;
    out.S = unflatten(r, v.S);
    return out;
}

Vec recover_y(const YRecovery& rec, double gamma, const SymMatrix& S) {
    if (S.order() != std::max(rec.r, 1)) throw InvalidInput("recover_y: S order mismatch");
    Vec y = rec.u0;
    kernels::axpy(-gamma, rec.u1.data(), y.data(), rec.m);
    Vec s = flatten(S);
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s[k] != 0.0)
            kernels::axpy(-s[k], rec.U2.data() + k * rec.m, y.data(), rec.m);
    return y;
}

SymMatrix recover_primal_candidate(const SymMatrix& Omega, double alpha, const SymMatrix& W_star,
                                   const Vec& y_star, const SdpProblem& p) {
    if (Omega.order() != p.n || W_star.order() != p.n)
        throw InvalidInput("recover_primal_candidate: dimension mismatch");
    SymMatrix D = W_star;
    D.add_scaled(p.C, -1.0);
    D.add_scaled(apply_At(p, y_star), 1.0);
    SymMatrix X = Omega;
    X.add_scaled(D, 1.0 / alpha);
    return X;
}

}  // namespace sbsdp
