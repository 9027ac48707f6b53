#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "sbsdp/bundle_model.hpp"
#include "sbsdp/penalty.hpp"
#include "sbsdp/problem.hpp"

namespace sbsdp {

struct SolverConfig {
    int r_p = 0;
    int r_c = 1;
    PenaltyConfig rho;
    double alpha0 = 1.0;
    double beta = 0.4;
    double m_l = 0.001;
    double m_r = 0.7;
    double alpha_min = 1e-5;
    double alpha_max = 100.0;
    int N_min = 10;
    double tol = 1e-5;
    int max_iter = 500;
    std::uint64_t seed = 0;

    // inner subproblem
    double subqp_tol = 1e-8;
    int subqp_max_iter = 10000;
    int stall_limit = 50;

    // optional per-iteration diagnostics
    bool invariant_probe = false;
    int probe_points = 12;

    // optional benchmark stop: additionally require the relative objective
    // gap to a known optimal value before declaring convergence
    std::optional<double> objective_target;
    double objective_gap_tol = 1e-6;

    /// Throws InvalidInput when a field violates its contract (n is the
    /// problem order, for the r_p + r_c <= n check).
    void validate_against(int n) const;
};

enum class StepType { Descent, Null, AffineCorrection };
const char* step_name(StepType s);

struct IterRecord {
    int t = 0;
    double objective = 0.0;    // F(Omega_{t+1}) resp. F_d(omega_{t+1})
    double model_value = 0.0;  // model at the candidate
    StepType step = StepType::Null;
    double alpha = 0.0;
    std::array<double, 5> eta{};
    std::int64_t wall_ns = 0;
};

enum class SolveStatus { Converged, MaxIter, SubproblemStall };
const char* status_name(SolveStatus s);

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIter;
    int iterations = 0;
    double objective = 0.0;         // final penalized objective
    double linear_objective = 0.0;  // <C, X> (primal) resp. b^T y (dual)
    std::array<double, 5> final_eta{};
    std::optional<SymMatrix> final_X;
    Vec final_y;
    std::optional<SymMatrix> final_W;
    std::optional<SymMatrix> final_Z;
    std::vector<IterRecord> history;
    double worst_probe_violation = 0.0;  // populated when cfg.invariant_probe
};

/// Boundary convention: equality counts as descent.
bool descent_test(double F_ref, double model_at_cand, double F_at_cand, double beta);

/// Doubles alpha after N_min consecutive nulls with a badly optimistic model,
/// halves it when the model tracks well; clamped to [alpha_min, alpha_max].
double adapt_alpha(double alpha, double predicted_drop, double actual_drop, int consecutive_nulls,
                   const SolverConfig& cfg);

/// eta_1..eta_5 scaled residuals for the triple (X, y, Z). The PSD violations
/// eta_2 and eta_4 are reported as magnitudes so max{eta} <= tol is monotone.
std::array<double, 5> suboptimality(const SdpProblem& p, const SymMatrix& X, const Vec& y,
                                    const SymMatrix& Z);

/// Primal-side bundle loop; default start Omega0 = I.
SolveReport sbmp_solve(const SdpProblem& p, const SolverConfig& cfg, const SymMatrix& Omega0);
SolveReport sbmp_solve(const SdpProblem& p, const SolverConfig& cfg);

/// Dual-side bundle loop; default start omega0 = 0.
SolveReport sbmd_solve(const SdpProblem& p, const SolverConfig& cfg, const Vec& omega0);
SolveReport sbmd_solve(const SdpProblem& p, const SolverConfig& cfg);

/// History as CSV (header + one row per IterRecord) or JSON lines.
/// zero_wall_ns replaces the timing column with zeros for byte-reproducible
/// output.
std::string history_csv(const std::vector<IterRecord>& history, bool zero_wall_ns);
std::string history_jsonl(const std::vector<IterRecord>& history, bool zero_wall_ns);

}  // namespace sbsdp
