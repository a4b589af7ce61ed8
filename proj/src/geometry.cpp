#include "flatlas/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "flatlas/parse.hpp"

namespace flatlas {

VectorField::VectorField(Frame f, std::vector<Expr> comps)
    : frame(std::move(f)), components(std::move(comps)) {
    if (frame.size() != components.size())
        throw std::invalid_argument("VectorField: component count does not match frame dimension");
}

bool VectorField::is_zero() const {
    for (const auto& c : components)
        if (!canonical(c).is_zero()) return false;
    return true;
}

VectorField zero_field(const Frame& f) {
    return VectorField(f, std::vector<Expr>(f.size(), Expr::integer(0)));
}

VectorField coordinate_field(const Frame& f, std::size_t axis) {
    VectorField v = zero_field(f);
    v.components.at(axis) = Expr::integer(1);
    return v;
}

VectorField add(const VectorField& a, const VectorField& b) {
    if (!a.same_frame(b)) throw std::invalid_argument("vector field frame mismatch");
    std::vector<Expr> comps;
    comps.reserve(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        comps.push_back(a.components[i] + b.components[i]);
    return VectorField(a.frame, std::move(comps));
}

VectorField scale(const Expr& s, const VectorField& a) {
    std::vector<Expr> comps;
    comps.reserve(a.dim());
    for (const auto& c : a.components) comps.push_back(s * c);
    return VectorField(a.frame, std::move(comps));
}

Expr lie_derivative(const VectorField& f, const Expr& h) {
    std::vector<Expr> terms;
    terms.reserve(f.dim());
    for (std::size_t j = 0; j < f.dim(); ++j)
        terms.push_back(differentiate(h, f.frame[j]) * f.components[j]);
    return Expr::sum(std::move(terms));
}

VectorField lie_bracket(const VectorField& a, const VectorField& b) {
    if (!a.same_frame(b)) throw std::invalid_argument("lie_bracket: frame mismatch");
    const std::size_t n = a.dim();
    std::vector<Expr> comps;
    comps.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Expr> terms;
        terms.reserve(2 * n);
        for (std::size_t j = 0; j < n; ++j) {
            terms.push_back(differentiate(b.components[i], a.frame[j]) * a.components[j]);
            terms.push_back(Expr::integer(-1) * differentiate(a.components[i], a.frame[j]) *
                            b.components[j]);
        }
        comps.push_back(Expr::sum(std::move(terms)));
    }
    return VectorField(a.frame, std::move(comps));
}

VectorField ad_power(const VectorField& eta, const VectorField& gamma, int k) {
    if (k < 0) throw std::invalid_argument("ad_power: negative order");
    VectorField acc = gamma;
    for (int i = 0; i < k; ++i) acc = lie_bracket(eta, acc);
    return acc;
}

ControlAffineSystem make_system(std::string name, std::vector<std::string> state_names,
                                std::vector<std::string> control_names,
                                const std::vector<std::string>& drift_exprs,
                                const std::vector<std::vector<std::string>>& control_exprs) {
    if (state_names.size() < 2) throw std::invalid_argument("system needs at least 2 states");
    if (control_names.empty()) throw std::invalid_argument("system needs at least 1 control");
    if (control_names.size() > state_names.size() - 1)
        throw std::invalid_argument("system needs m <= n-1 controls");
    SymbolTable table;
    Frame frame;
    for (const auto& s : state_names) frame.push_back(table.add(s));
    std::vector<SymbolId> ctrl_syms;
    for (const auto& u : control_names) ctrl_syms.push_back(table.add(u));
    if (drift_exprs.size() != state_names.size())
        throw std::invalid_argument("drift dimension mismatch");
    if (control_exprs.size() != control_names.size())
        throw std::invalid_argument("control field count mismatch");

    auto parse_field = [&](const std::vector<std::string>& texts) {
        std::vector<Expr> comps;
        comps.reserve(texts.size());
        for (const auto& t : texts) comps.push_back(parse_expr(t, table));
        return VectorField(frame, std::move(comps));
    };

    ControlAffineSystem sys;
    sys.name = std::move(name);
    sys.state_frame = frame;
    sys.control_symbols = std::move(ctrl_syms);
    sys.drift = parse_field(drift_exprs);
    for (const auto& ce : control_exprs) {
        if (ce.size() != state_names.size())
            throw std::invalid_argument("control field dimension mismatch");
        sys.controls.push_back(parse_field(ce));
    }
    sys.table = std::make_shared<const SymbolTable>(std::move(table));
    return sys;
}

std::vector<Expr> symbolic_inputs(const ControlAffineSystem& sys) {
    std::vector<Expr> u;
    u.reserve(sys.m());
    for (SymbolId s : sys.control_symbols) u.push_back(Expr::variable(s));
    return u;
}

VectorField system_field_g(const ControlAffineSystem& sys, const std::vector<Expr>& u) {
    if (u.size() != sys.m()) throw std::invalid_argument("system_field_g: input arity mismatch");
    VectorField g = sys.drift;
    for (std::size_t i = 0; i < u.size(); ++i) g = add(g, scale(u[i], sys.controls[i]));
    return g;
}

FieldMatrix::FieldMatrix(Frame f, std::vector<VectorField> cols) : frame(std::move(f)) {
    for (auto& c : cols) push_column(std::move(c));
}

void FieldMatrix::push_column(VectorField v) {
    if (v.frame != frame) throw std::invalid_argument("FieldMatrix: column frame mismatch");
    columns.push_back(std::move(v));
}

FieldMatrix control_matrix(const ControlAffineSystem& sys) {
    return FieldMatrix(sys.state_frame, sys.controls);
}

FieldMatrix wronskian_matrix(const ControlAffineSystem& sys, const std::vector<Expr>& u, int k) {
    if (k < 0) throw std::invalid_argument("wronskian_matrix: negative order");
    const VectorField g = system_field_g(sys, u);
    FieldMatrix out(sys.state_frame);
    std::vector<VectorField> block = sys.controls;
    int sign = 1;
    for (int j = 0; j <= k; ++j) {
        for (const auto& col : block) out.push_column(sign > 0 ? col : scale(Expr::integer(-1), col));
        if (j < k) {
            for (auto& col : block) col = lie_bracket(g, col);
            sign = -sign;
        }
    }
    return out;
}

std::size_t rank_at_point(const FieldMatrix& m, const PointMap& point) {
    QMatrix q(m.rows(), m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c)
        for (std::size_t r = 0; r < m.rows(); ++r)
            q.at(r, c) = evaluate(m.columns[c].components[r], point);
    return bareiss_rank(q);
}

namespace {

std::set<SymbolId> matrix_symbols(const FieldMatrix& m) {
    std::set<SymbolId> syms;
    for (const auto& col : m.columns)
        for (const auto& e : col.components) collect_symbols(e, syms);
    return syms;
}

}  // namespace

SampledRank sampled_rank(const FieldMatrix& m, const PointScheme& scheme) {
    SampledRank out;
    if (m.cols() == 0) {
        out.samples_used = kNumSamples;
        return out;
    }
    const std::set<SymbolId> syms = matrix_symbols(m);
    std::optional<std::size_t> first_rank;
    for (int attempt = 0; attempt < kMaxSampleAttempts && out.samples_used < kNumSamples;
         ++attempt) {
        PointMap pt = scheme(syms, attempt);
        try {
            const std::size_t r = rank_at_point(m, pt);
            if (!first_rank) first_rank = r;
            if (r != *first_rank) out.constant = false;
            out.max_rank = std::max(out.max_rank, r);
            ++out.samples_used;
        } catch (const EvalError&) {
            // skip and resample
        }
    }
    if (out.samples_used == 0)
        throw EvalError(EvalErrorKind::Domain, "all rank sample points failed evaluation");
    return out;
}

std::size_t generic_rank(const FieldMatrix& m, const Sampler& sampler) {
    return sampled_rank(m, generic_scheme(sampler)).max_rank;
}

Distribution::Distribution(Frame f, std::vector<VectorField> gens)
    : frame(std::move(f)), generators(std::move(gens)) {
    if (generators.empty()) throw std::invalid_argument("Distribution: empty generator list");
    for (const auto& g : generators)
        if (g.frame != frame) throw std::invalid_argument("Distribution: generator frame mismatch");
}

FieldMatrix Distribution::matrix() const { return FieldMatrix(frame, generators); }

namespace {

long field_degree(const VectorField& v) {
    long d = 0;
    for (const auto& c : v.components) d = std::max(d, total_degree(c));
    return d;
}

std::size_t field_size(const VectorField& v) {
    std::size_t s = 0;
    for (const auto& c : v.components) s += node_count(c);
    return s;
}

// Greedy basis: generators ordered smallest-total-degree first, kept when
// they raise the rank under the given scheme.
std::vector<std::size_t> select_basis(const Distribution& d, const PointScheme& scheme,
                                      std::size_t target_rank) {
    std::vector<std::size_t> order(d.generators.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const long da = field_degree(d.generators[a]), db = field_degree(d.generators[b]);
        if (da != db) return da < db;
        return field_size(d.generators[a]) < field_size(d.generators[b]);
    });
    std::vector<std::size_t> basis;
    FieldMatrix acc(d.frame);
    std::size_t rank = 0;
    for (std::size_t idx : order) {
        if (rank == target_rank) break;
        FieldMatrix trial = acc;
        trial.push_column(d.generators[idx]);
        const std::size_t r = sampled_rank(trial, scheme).max_rank;
        if (r > rank) {
            rank = r;
            acc = std::move(trial);
            basis.push_back(idx);
        }
    }
    return basis;
}

InvolutivityResult involutivity_impl(const Distribution& d, const PointScheme& scheme,
                                     std::size_t rank) {
    InvolutivityResult res;
    if (rank == 0) {
        res.verdict = InvolutivityVerdict::Involutive;
        res.note = "rank 0: vacuously involutive";
        return res;
    }
    res.basis = select_basis(d, scheme, rank);
    FieldMatrix basis_matrix(d.frame);
    for (std::size_t idx : res.basis) basis_matrix.push_column(d.generators[idx]);
    for (std::size_t i = 0; i < res.basis.size(); ++i) {
        for (std::size_t j = i + 1; j < res.basis.size(); ++j) {
            // witness reported in original generator order
            const std::size_t a = std::min(res.basis[i], res.basis[j]);
            const std::size_t b = std::max(res.basis[i], res.basis[j]);
            VectorField br = lie_bracket(d.generators[a], d.generators[b]);
            if (br.is_zero()) continue;
            FieldMatrix trial = basis_matrix;
            trial.push_column(br);
            if (sampled_rank(trial, scheme).max_rank > rank) {
                res.verdict = InvolutivityVerdict::NotInvolutive;
                res.witness_pair = {a, b};
                res.witness_bracket = std::move(br);
                return res;
            }
        }
    }
    res.verdict = InvolutivityVerdict::Involutive;
    return res;
}

}  // namespace

InvolutivityResult is_involutive(const Distribution& d, const std::optional<PointMap>& point,
                                 const Sampler& sampler) {
    const PointScheme generic = generic_scheme(sampler);
    const std::size_t grank = sampled_rank(d.matrix(), generic).max_rank;
    if (!point) return involutivity_impl(d, generic, grank);

    std::size_t prank;
    try {
        prank = rank_at_point(d.matrix(), *point);
    } catch (const EvalError& e) {
        InvolutivityResult res;
        res.note = std::string("evaluation failed at point: ") + e.what();
        return res;
    }
    if (prank != grank) {
        InvolutivityResult res;
        res.verdict = InvolutivityVerdict::Indeterminate;
        res.note = "rank at point (" + std::to_string(prank) + ") differs from generic rank (" +
                   std::to_string(grank) + "): constant-rank precondition fails";
        return res;
    }
    // constant rank at the point: membership tested near the point, with
    // unbound symbols sampled
    const PointScheme near = near_point_scheme(sampler, *point, Rational(1, 4));
    return involutivity_impl(d, near, prank);
}

InvolutivityResult is_involutive_sampled(const Distribution& d, const PointScheme& scheme,
                                         const Sampler&) {
    return involutivity_impl(d, scheme, sampled_rank(d.matrix(), scheme).max_rank);
}

ClosureResult involutive_closure(const Distribution& d, int max_steps, const Sampler& sampler) {
    if (max_steps < 1) throw std::invalid_argument("involutive_closure: max_steps must be >= 1");
    const PointScheme scheme = generic_scheme(sampler);
    ClosureResult out;
    out.distribution = d;
    out.rank = sampled_rank(d.matrix(), scheme).max_rank;
    for (int step = 0; step < max_steps; ++step) {
        auto& gens = out.distribution.generators;
        FieldMatrix m = out.distribution.matrix();
        std::vector<VectorField> added;
        for (std::size_t i = 0; i < gens.size(); ++i) {
            for (std::size_t j = i + 1; j < gens.size(); ++j) {
                VectorField br = lie_bracket(gens[i], gens[j]);
                if (br.is_zero()) continue;
                FieldMatrix trial = m;
                trial.push_column(br);
                const std::size_t r = sampled_rank(trial, scheme).max_rank;
                if (r > out.rank) {
                    out.rank = r;
                    m = std::move(trial);
                    added.push_back(std::move(br));
                }
            }
        }
        ++out.steps;
        if (added.empty()) {
            out.closed = true;
            return out;
        }
        for (auto& a : added) gens.push_back(std::move(a));
        if (out.rank == d.frame.size()) {
            out.closed = true;
            return out;
        }
    }
    // budget exhausted before stabilization
    out.closed = false;
    return out;
}

}  // namespace flatlas
