#ifndef FLATLAS_FLAT_GENERIC_HPP
#define FLATLAS_FLAT_GENERIC_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flatlas/accessibility.hpp"
#include "flatlas/geometry.hpp"
#include "flatlas/numeric.hpp"

namespace flatlas {

/// Flat-output candidate for the generic route: n-1 first integrals of f_k.
struct FlatOutputCandidate {
    int k = 0;  // distinguished control index, 1-based
    std::vector<Expr> psi;
};

struct FirstIntegralReport {
    std::vector<bool> integral_ok;  // L_{f_k} psi_i = 0, per component
    std::size_t dpsi0_rank = 0;     // rank of Dpsi0 at the point
    bool independent = false;       // rank = n-1
    std::vector<std::string> notes;

    bool passed() const {
        if (!independent) return false;
        for (bool ok : integral_ok)
            if (!ok) return false;
        return true;
    }
};

/// Checks L_{f_k} psi_i = 0 symbolically (sampled zero test) and the rank of
/// Dpsi0 at the point. Independence failure is reported separately from
/// integral failure.
FirstIntegralReport verify_first_integrals(const ControlAffineSystem& sys, int k,
                                           const std::vector<Expr>& psi, const PointMap& point,
                                           const Sampler& sampler);

/// psi1_i = L_{f0} psi_i + sum_{j != k} u_j L_{f_j} psi_i; structurally free
/// of u_k (residual dependence means the first-integral check was unsound
/// and raises logic_error).
std::vector<Expr> build_psi1(const ControlAffineSystem& sys, int k, const std::vector<Expr>& psi);

/// Table extension with the derivative symbols of the non-distinguished
/// inputs (u_j -> u_j_d1 for j != k).
struct PsiChain {
    std::shared_ptr<const SymbolTable> table;  // system table + u-dot symbols
    std::vector<SymbolId> udot;                // aligned with u_hat order
    std::vector<SymbolId> uhat;                // control symbols, k removed
    std::vector<Expr> psi0, psi1, psi2;
};

PsiChain build_psi_chain(const ControlAffineSystem& sys, int k, const std::vector<Expr>& psi);

struct MNReport {
    std::size_t M_rank = 0, M_size = 0;
    std::size_t N_rank = 0, N_size = 0;
    bool M_full_rank = false;
    bool N_invertible = false;
    bool bracket_block_matches = false;  // d psi2 / d u_k = -L_{[g,f_k]} psi0
    bool bracket_block_nonzero = false;  // at the point (the Eq-(15)-style term)
};

/// Ranks of M (Jacobian of (psi0, psi1) in (x, u_hat)) and the full square
/// N at the point; the point binds x, u and the u-dot entries (missing
/// u-dot values default to 0).
MNReport check_M_N_invertibility(const ControlAffineSystem& sys, int k,
                                 const std::vector<Expr>& psi, const PointMap& point,
                                 const Sampler& sampler);

/// Symbolic recovery of (x, u) from flat-output jet symbols y_i, y_i_d1,
/// y_i_d2 by linear triangular elimination. Partial results are returned
/// when some unknown resists linear elimination.
struct SymbolicRecovery {
    std::shared_ptr<const SymbolTable> table;  // system + u-dots + y jets
    std::vector<SymbolId> y;                   // y_1..y_{n-1}
    std::map<SymbolId, Expr> solved;           // unknown -> expression in y jets
    bool complete = false;
    std::vector<std::string> notes;
};

SymbolicRecovery recover_symbolic(const ControlAffineSystem& sys, int k,
                                  const std::vector<Expr>& psi, const Sampler& sampler);

/// Numeric trajectory recovery from a flat-output signal: solves
/// (psi0, psi1, psi2) = (z, zdot, zddot) per sample by damped Newton with
/// continuation along the trajectory.
struct RecoveredTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> x;       // N x n
    std::vector<std::vector<double>> u;       // N x m (u_k included at slot k-1)
    std::vector<double> newton_residuals;
    bool ok = false;
    std::string error;
};

/// z given symbolically in the time symbol (derivatives exact).
RecoveredTrajectory recover_inputs_numeric(const ControlAffineSystem& sys, int k,
                                           const std::vector<Expr>& psi,
                                           const std::vector<Expr>& z_of_t, SymbolId t_symbol,
                                           const SymbolTable& signal_table, double t0, double t1,
                                           double dt, const std::vector<double>& initial_guess);

/// z given as samples on a uniform grid (derivatives by 4th-order stencils).
RecoveredTrajectory recover_inputs_numeric_sampled(const ControlAffineSystem& sys, int k,
                                                   const std::vector<Expr>& psi, double t0,
                                                   double dt,
                                                   const std::vector<std::vector<double>>& z_samples,
                                                   const std::vector<double>& initial_guess);

struct RoundTripResult {
    RecoveredTrajectory recovered;
    Trajectory simulated;
    double z_residual = 0.0;  // max |psi(x_sim) - z| over the grid
    bool ok = false;
    std::string error;
};

/// Full verification round trip: recover (x,u) from z(t), forward-simulate
/// under the recovered inputs from the recovered initial state, compare the
/// simulated flat output against the prescription.
RoundTripResult generic_round_trip(const ControlAffineSystem& sys, int k,
                                   const std::vector<Expr>& psi, const std::vector<Expr>& z_of_t,
                                   SymbolId t_symbol, const SymbolTable& signal_table, double t0,
                                   double t1, double dt, const std::vector<double>& initial_guess);

struct FeedbackLinearizationReport {
    bool G0_involutive = false;
    bool G1_involutive = false;
    std::size_t G1_rank_at_point = 0;
    std::size_t required_rank = 0;
    bool passed = false;
};

/// Static feedback linearizability of the (2n-2)-dimensional extended
/// system with state (x, u_hat): G0 involutive, G1 involutive of rank 2n-2
/// at the point.
FeedbackLinearizationReport feedback_linearization_check(const ControlAffineSystem& sys, int k,
                                                         const PointMap& point,
                                                         const Sampler& sampler);

struct IntegralSearchResult {
    std::vector<Expr> symbolic;  // up to n-1 independent first integrals
    bool used_numeric_fallback = false;
    std::optional<FlowBoxIntegrals> numeric;
    std::vector<std::string> notes;
};

/// Polynomial-ansatz search for first integrals of f_k (total degree up to
/// degree_bound), falling back to numeric flow-box integrals when fewer
/// than n-1 independent symbolic solutions exist within the bound.
IntegralSearchResult search_first_integrals(const ControlAffineSystem& sys, int k,
                                            const PointMap& point, int degree_bound,
                                            const Sampler& sampler);

}  // namespace flatlas

#endif  // FLATLAS_FLAT_GENERIC_HPP
