#ifndef FLATLAS_GEOMETRY_HPP
#define FLATLAS_GEOMETRY_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flatlas/expr.hpp"
#include "flatlas/rank.hpp"
#include "flatlas/sampling.hpp"
#include "flatlas/symbol_table.hpp"

namespace flatlas {

/// Ordered coordinate symbols of a frame (state frame or extended jet frame).
using Frame = std::vector<SymbolId>;

/// Vector field over a declared frame: one expression per coordinate.
struct VectorField {
    Frame frame;
    std::vector<Expr> components;

    VectorField() = default;
    VectorField(Frame f, std::vector<Expr> comps);

    std::size_t dim() const { return frame.size(); }
    bool same_frame(const VectorField& o) const { return frame == o.frame; }
    bool is_zero() const;
};

VectorField zero_field(const Frame& f);
VectorField coordinate_field(const Frame& f, std::size_t axis);
VectorField add(const VectorField& a, const VectorField& b);
VectorField scale(const Expr& s, const VectorField& a);

/// Lie derivative of a scalar along a field: sum_j (dh/dx_j) f_j.
Expr lie_derivative(const VectorField& f, const Expr& h);

/// Lie bracket [a,b] = (db/dx) a - (da/dx) b over the common frame.
VectorField lie_bracket(const VectorField& a, const VectorField& b);

/// Iterated adjoint: ad^0_eta gamma = gamma, ad^k_eta gamma = [eta, ad^{k-1}].
VectorField ad_power(const VectorField& eta, const VectorField& gamma, int k);

/// Control-affine system: drift f0 plus m control fields over the state
/// frame, m <= n-1. Control symbols live in the table but not in the frame.
struct ControlAffineSystem {
    std::string name;
    std::shared_ptr<const SymbolTable> table;
    Frame state_frame;
    std::vector<SymbolId> control_symbols;
    VectorField drift;
    std::vector<VectorField> controls;

    std::size_t n() const { return state_frame.size(); }
    std::size_t m() const { return controls.size(); }
};

ControlAffineSystem make_system(std::string name, std::vector<std::string> state_names,
                                std::vector<std::string> control_names,
                                const std::vector<std::string>& drift_exprs,
                                const std::vector<std::vector<std::string>>& control_exprs);

/// g(x,u) = f0 + sum_i u_i f_i with caller-supplied u entries (symbols or
/// constants).
VectorField system_field_g(const ControlAffineSystem& sys, const std::vector<Expr>& u);

/// Symbolic control inputs u_1..u_m of the system.
std::vector<Expr> symbolic_inputs(const ControlAffineSystem& sys);

/// Matrix whose columns are vector fields over a common frame.
struct FieldMatrix {
    Frame frame;
    std::vector<VectorField> columns;

    FieldMatrix() = default;
    explicit FieldMatrix(Frame f) : frame(std::move(f)) {}
    FieldMatrix(Frame f, std::vector<VectorField> cols);

    std::size_t rows() const { return frame.size(); }
    std::size_t cols() const { return columns.size(); }
    void push_column(VectorField v);
};

/// G = (f1 ... fm).
FieldMatrix control_matrix(const ControlAffineSystem& sys);

/// Wronskian-type controllability matrix (G, -ad_g G, ..., (-1)^k ad_g^k G).
FieldMatrix wronskian_matrix(const ControlAffineSystem& sys, const std::vector<Expr>& u, int k);

/// Exact rank of the matrix evaluated at a point (all symbols bound).
/// Throws EvalError when evaluation fails at the point.
std::size_t rank_at_point(const FieldMatrix& m, const PointMap& point);

/// Max rank over deterministic pseudo-random sample points; failed
/// evaluations are skipped and resampled. Throws when all samples fail.
std::size_t generic_rank(const FieldMatrix& m, const Sampler& sampler);

/// Max rank over a caller-supplied sampling scheme; also reports whether all
/// successful samples agreed (constant-rank evidence).
struct SampledRank {
    std::size_t max_rank = 0;
    bool constant = true;
    int samples_used = 0;
};
SampledRank sampled_rank(const FieldMatrix& m, const PointScheme& scheme);

/// Finite generating set of vector fields over a common frame.
struct Distribution {
    Frame frame;
    std::vector<VectorField> generators;

    Distribution() = default;
    Distribution(Frame f, std::vector<VectorField> gens);

    FieldMatrix matrix() const;
};

enum class InvolutivityVerdict { Involutive, NotInvolutive, Indeterminate };

struct InvolutivityResult {
    InvolutivityVerdict verdict = InvolutivityVerdict::Indeterminate;
    // witness bracket when not involutive: indices into the selected basis
    // of `generators` and the offending bracket field
    std::optional<std::pair<std::size_t, std::size_t>> witness_pair;
    std::optional<VectorField> witness_bracket;
    std::vector<std::size_t> basis;  // generator indices of the selected basis
    std::string note;
};

/// Involutivity test. With a point, a constant-rank precondition is checked
/// first (rank at the point must equal the generic rank, otherwise the
/// verdict is Indeterminate). Basis selection pivots columns with
/// smallest-total-degree-first tie-breaking; rank-0 input is vacuously
/// involutive.
InvolutivityResult is_involutive(const Distribution& d, const std::optional<PointMap>& point,
                                 const Sampler& sampler);

/// Involutivity over an arbitrary sampling scheme (used by the degenerate
/// pipeline to test near a working point with jets sampled).
InvolutivityResult is_involutive_sampled(const Distribution& d, const PointScheme& scheme,
                                         const Sampler& sampler);

struct ClosureResult {
    Distribution distribution;
    bool closed = false;
    int steps = 0;
    std::size_t rank = 0;
};

/// Adjoin pairwise brackets until the generic rank stabilizes or the step
/// budget runs out (flagged via closed = false).
ClosureResult involutive_closure(const Distribution& d, int max_steps, const Sampler& sampler);

}  // namespace flatlas

#endif  // FLATLAS_GEOMETRY_HPP
