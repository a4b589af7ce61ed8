#include "flatlas/flat_generic.hpp"

#include <algorithm>
#include <cmath>

#include "flatlas/poly.hpp"

namespace flatlas {

namespace {

void require_valid_k(const ControlAffineSystem& sys, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > sys.m())
        throw std::invalid_argument("control index k out of range");
}

void require_states_only(const ControlAffineSystem& sys, const std::vector<Expr>& psi) {
    std::set<SymbolId> state_set(sys.state_frame.begin(), sys.state_frame.end());
    for (const auto& p : psi)
        for (SymbolId s : free_symbols(p))
            if (!state_set.count(s))
                throw std::invalid_argument("psi components must depend on states only");
}

// Jacobian rows of a scalar family with respect to given symbols.
QMatrix jacobian_at(const std::vector<Expr>& funcs, const std::vector<SymbolId>& vars,
                    const PointMap& point) {
    QMatrix m(funcs.size(), vars.size());
    for (std::size_t i = 0; i < funcs.size(); ++i)
        for (std::size_t j = 0; j < vars.size(); ++j)
            m.at(i, j) = evaluate(differentiate(funcs[i], vars[j]), point);
    return m;
}

}  // namespace

FirstIntegralReport verify_first_integrals(const ControlAffineSystem& sys, int k,
                                           const std::vector<Expr>& psi, const PointMap& point,
                                           const Sampler& sampler) {
    require_valid_k(sys, k);
    if (psi.size() != sys.n() - 1)
        throw std::invalid_argument("psi must have n-1 components");
    require_states_only(sys, psi);

    FirstIntegralReport rep;
    const VectorField& fk = sys.controls[static_cast<std::size_t>(k - 1)];
    for (const auto& p : psi) rep.integral_ok.push_back(is_zero_expr(lie_derivative(fk, p), sampler));

    try {
        rep.dpsi0_rank = bareiss_rank(jacobian_at(psi, sys.state_frame, point));
    } catch (const EvalError& e) {
        rep.notes.push_back(std::string("Dpsi0 evaluation failed at point: ") + e.what());
    }
    rep.independent = rep.dpsi0_rank == sys.n() - 1;
    if (!rep.independent)
        rep.notes.push_back("independence failure: rank Dpsi0 = " + std::to_string(rep.dpsi0_rank) +
                            " < " + std::to_string(sys.n() - 1));
    return rep;
}

std::vector<Expr> build_psi1(const ControlAffineSystem& sys, int k, const std::vector<Expr>& psi) {
    require_valid_k(sys, k);
    const SymbolId uk = sys.control_symbols[static_cast<std::size_t>(k - 1)];
    std::vector<Expr> psi1;
    psi1.reserve(psi.size());
    for (const auto& p : psi) {
        std::vector<Expr> terms{lie_derivative(sys.drift, p)};
        for (std::size_t j = 0; j < sys.m(); ++j) {
            if (static_cast<int>(j) + 1 == k) continue;
            terms.push_back(Expr::variable(sys.control_symbols[j]) *
                            lie_derivative(sys.controls[j], p));
        }
        Expr e = Expr::sum(std::move(terms));
        if (depends_on(e, uk))
            throw std::logic_error(
                "build_psi1: residual u_k dependence; first-integral check was unsound");
        psi1.push_back(std::move(e));
    }
    return psi1;
}

PsiChain build_psi_chain(const ControlAffineSystem& sys, int k, const std::vector<Expr>& psi) {
    require_valid_k(sys, k);
    PsiChain chain;
    chain.psi0 = psi;
    chain.psi1 = build_psi1(sys, k, psi);

    std::vector<std::string> udot_names;
    for (std::size_t j = 0; j < sys.m(); ++j) {
        if (static_cast<int>(j) + 1 == k) continue;
        chain.uhat.push_back(sys.control_symbols[j]);
        udot_names.push_back(SymbolTable::jet_name(sys.table->name(sys.control_symbols[j]), 1));
    }
    auto table = std::make_shared<SymbolTable>(sys.table->extended(udot_names));
    for (const auto& n : udot_names) chain.udot.push_back(*table->find(n));
    chain.table = table;

    // psi2 = L_g psi1 (u_k symbolic) + sum_{j != k} (d psi1 / d u_j) u_j_dot
    const VectorField g = system_field_g(sys, symbolic_inputs(sys));
    for (const auto& p1 : chain.psi1) {
        std::vector<Expr> terms{lie_derivative(g, p1)};
        for (std::size_t j = 0; j < chain.uhat.size(); ++j)
            terms.push_back(differentiate(p1, chain.uhat[j]) * Expr::variable(chain.udot[j]));
        chain.psi2.push_back(Expr::sum(std::move(terms)));
    }
    return chain;
}

MNReport check_M_N_invertibility(const ControlAffineSystem& sys, int k,
                                 const std::vector<Expr>& psi, const PointMap& point,
                                 const Sampler& sampler) {
    const PsiChain chain = build_psi_chain(sys, k, psi);
    const std::size_t n = sys.n();
    const SymbolId uk = sys.control_symbols[static_cast<std::size_t>(k - 1)];

    PointMap pt = point;
    for (SymbolId ud : chain.udot) pt.emplace(ud, Rational(0));

    MNReport rep;
    // M: rows (psi0, psi1), columns (x, u_hat)
    std::vector<Expr> m_rows = chain.psi0;
    m_rows.insert(m_rows.end(), chain.psi1.begin(), chain.psi1.end());
    std::vector<SymbolId> m_cols = sys.state_frame;
    m_cols.insert(m_cols.end(), chain.uhat.begin(), chain.uhat.end());
    rep.M_size = 2 * n - 2;
    rep.M_rank = bareiss_rank(jacobian_at(m_rows, m_cols, pt));
    rep.M_full_rank = rep.M_rank == rep.M_size;

    // N: rows (psi0, psi1, psi2), columns (x, u_hat, u_k, u_hat_dot)
    std::vector<Expr> n_rows = m_rows;
    n_rows.insert(n_rows.end(), chain.psi2.begin(), chain.psi2.end());
    std::vector<SymbolId> n_cols = m_cols;
    n_cols.push_back(uk);
    n_cols.insert(n_cols.end(), chain.udot.begin(), chain.udot.end());
    rep.N_size = 3 * (n - 1);
    rep.N_rank = bareiss_rank(jacobian_at(n_rows, n_cols, pt));
    rep.N_invertible = rep.N_rank == rep.N_size;

    // d psi2 / d u_k block against -L_{[g,f_k]} psi0 (symbolic), and its
    // nonvanishing at the point
    const VectorField g = system_field_g(sys, symbolic_inputs(sys));
    const VectorField gfk = lie_bracket(g, sys.controls[static_cast<std::size_t>(k - 1)]);
    rep.bracket_block_matches = true;
    rep.bracket_block_nonzero = false;
    for (std::size_t i = 0; i < chain.psi2.size(); ++i) {
        const Expr block = differentiate(chain.psi2[i], uk);
        const Expr expected = Expr::integer(-1) * lie_derivative(gfk, chain.psi0[i]);
        if (!is_zero_expr(block - expected, sampler)) rep.bracket_block_matches = false;
        try {
            if (!evaluate(block, pt).is_zero()) rep.bracket_block_nonzero = true;
        } catch (const EvalError&) {
        }
    }
    return rep;
}

SymbolicRecovery recover_symbolic(const ControlAffineSystem& sys, int k,
                                  const std::vector<Expr>& psi, const Sampler& sampler) {
    const PsiChain chain = build_psi_chain(sys, k, psi);
    const std::size_t n = sys.n();

    std::vector<std::string> y_names;
    for (std::size_t i = 1; i < n; ++i) {
        const std::string base = "y" + std::to_string(i);
        y_names.push_back(base);
        y_names.push_back(SymbolTable::jet_name(base, 1));
        y_names.push_back(SymbolTable::jet_name(base, 2));
    }
    auto table = std::make_shared<SymbolTable>(chain.table->extended(y_names));

    SymbolicRecovery rec;
    rec.table = table;
    std::vector<SymbolId> yj[3];
    for (std::size_t i = 1; i < n; ++i) {
        const std::string base = "y" + std::to_string(i);
        yj[0].push_back(*table->find(base));
        yj[1].push_back(*table->find(SymbolTable::jet_name(base, 1)));
        yj[2].push_back(*table->find(SymbolTable::jet_name(base, 2)));
    }
    rec.y = yj[0];

    // equations psi_level_i - y_i^{(level)} = 0, in chart-triangular order
    std::vector<Expr> equations;
    const std::vector<const std::vector<Expr>*> levels{&chain.psi0, &chain.psi1, &chain.psi2};
    for (int level = 0; level < 3; ++level)
        for (std::size_t i = 0; i + 1 < n; ++i)
            equations.push_back((*levels[level])[i] - Expr::variable(yj[level][i]));

    // unknowns in preferred elimination order: x, u_hat, u_k, u_hat_dot
    std::vector<SymbolId> unknowns = sys.state_frame;
    unknowns.insert(unknowns.end(), chain.uhat.begin(), chain.uhat.end());
    unknowns.push_back(sys.control_symbols[static_cast<std::size_t>(k - 1)]);
    unknowns.insert(unknowns.end(), chain.udot.begin(), chain.udot.end());

    std::set<SymbolId> open(unknowns.begin(), unknowns.end());
    bool progress = true;
    while (progress && !open.empty()) {
        progress = false;
        for (auto eq_it = equations.begin(); eq_it != equations.end() && !progress; ++eq_it) {
            for (SymbolId s : unknowns) {
                if (!open.count(s)) continue;
                const Expr coeff = differentiate(*eq_it, s);
                if (canonical(coeff).is_zero()) continue;
                if (depends_on(coeff, s)) continue;  // nonlinear in s
                if (is_zero_expr(coeff, sampler)) continue;
                std::map<SymbolId, Expr> zero{{s, Expr::integer(0)}};
                const Expr rest = substitute(*eq_it, zero);
                Expr solved = Expr::quotient(Expr::integer(-1) * rest, coeff);
                // fold previous solutions into the new one and vice versa
                solved = substitute(solved, rec.solved);
                for (auto& [sym, e] : rec.solved)
                    e = substitute(e, std::map<SymbolId, Expr>{{s, solved}});
                rec.solved.emplace(s, std::move(solved));
                open.erase(s);
                for (auto& eq : equations)
                    eq = substitute(eq, std::map<SymbolId, Expr>{{s, rec.solved.at(s)}});
                equations.erase(eq_it);
                progress = true;
                break;
            }
        }
    }
    rec.complete = true;
    for (SymbolId s : unknowns) {
        if (static_cast<bool>(open.count(s))) {
            rec.complete = false;
            rec.notes.push_back("could not eliminate '" + table->name(s) + "' linearly");
        }
    }
    return rec;
}

namespace {

struct RecoveryProblem {
    PsiChain chain;
    std::vector<SymbolId> unknowns;              // x, u_hat, u_k, u_hat_dot
    std::vector<Expr> residual_exprs;            // stacked psi levels
    std::vector<std::vector<Expr>> jacobian;     // symbolic partials
};

RecoveryProblem build_problem(const ControlAffineSystem& sys, int k,
                              const std::vector<Expr>& psi) {
    RecoveryProblem prob;
    prob.chain = build_psi_chain(sys, k, psi);
    prob.unknowns = sys.state_frame;
    prob.unknowns.insert(prob.unknowns.end(), prob.chain.uhat.begin(), prob.chain.uhat.end());
    prob.unknowns.push_back(sys.control_symbols[static_cast<std::size_t>(k - 1)]);
    prob.unknowns.insert(prob.unknowns.end(), prob.chain.udot.begin(), prob.chain.udot.end());
    prob.residual_exprs = prob.chain.psi0;
    prob.residual_exprs.insert(prob.residual_exprs.end(), prob.chain.psi1.begin(),
                               prob.chain.psi1.end());
    prob.residual_exprs.insert(prob.residual_exprs.end(), prob.chain.psi2.begin(),
                               prob.chain.psi2.end());
    for (const auto& r : prob.residual_exprs) {
        std::vector<Expr> row;
        row.reserve(prob.unknowns.size());
        for (SymbolId s : prob.unknowns) row.push_back(differentiate(r, s));
        prob.jacobian.push_back(std::move(row));
    }
    return prob;
}

RecoveredTrajectory recover_from_targets(const ControlAffineSystem& sys, int k,
                                         const std::vector<Expr>& psi,
                                         const std::vector<double>& times,
                                         const std::vector<std::vector<double>>& targets,
                                         const std::vector<double>& initial_guess) {
    const RecoveryProblem prob = build_problem(sys, k, psi);
    const std::size_t dim = prob.unknowns.size();
    RecoveredTrajectory out;
    out.times = times;

    std::vector<double> guess = initial_guess;
    if (guess.size() != dim) {
        if (guess.size() == sys.n()) {
            guess.resize(dim, 0.0);  // pad control entries with zeros
        } else if (guess.empty()) {
            guess.assign(dim, 0.0);
        } else {
            out.error = "initial guess dimension mismatch";
            return out;
        }
    }

    for (std::size_t s = 0; s < times.size(); ++s) {
        const std::vector<double>& target = targets[s];
        auto f = [&](const std::vector<double>& w) {
            FloatMap m;
            for (std::size_t i = 0; i < dim; ++i) m[prob.unknowns[i]] = w[i];
            std::vector<double> r(prob.residual_exprs.size());
            for (std::size_t i = 0; i < r.size(); ++i)
                r[i] = evaluate_float(prob.residual_exprs[i], m) - target[i];
            return r;
        };
        auto jac = [&](const std::vector<double>& w) {
            FloatMap m;
            for (std::size_t i = 0; i < dim; ++i) m[prob.unknowns[i]] = w[i];
            std::vector<std::vector<double>> J(dim, std::vector<double>(dim));
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j)
                    J[i][j] = evaluate_float(prob.jacobian[i][j], m);
            return J;
        };
        NewtonResult nr = newton_solve(f, jac, guess);
        if (!nr.converged) {
            out.error = "Newton failed to converge at t = " + std::to_string(times[s]) +
                        " (residual " + std::to_string(nr.residual) + ")";
            return out;
        }
        guess = nr.x;  // continuation
        out.newton_residuals.push_back(nr.residual);

        std::vector<double> xval(nr.x.begin(), nr.x.begin() + static_cast<long>(sys.n()));
        std::vector<double> uval(sys.m());
        // u_hat occupies [n, n + m - 1), u_k sits after it
        std::size_t pos = sys.n();
        for (std::size_t j = 0; j < sys.m(); ++j) {
            if (static_cast<int>(j) + 1 == k) continue;
            uval[j] = nr.x[pos++];
        }
        uval[static_cast<std::size_t>(k - 1)] = nr.x[pos];
        out.x.push_back(std::move(xval));
        out.u.push_back(std::move(uval));
    }
    out.ok = true;
    return out;
}

std::vector<std::vector<double>> symbolic_targets(const std::vector<Expr>& z_of_t,
                                                  SymbolId t_symbol,
                                                  const std::vector<double>& times) {
    std::vector<Expr> dz, ddz;
    for (const auto& z : z_of_t) {
        dz.push_back(differentiate(z, t_symbol));
        ddz.push_back(differentiate(dz.back(), t_symbol));
    }
    std::vector<std::vector<double>> targets;
    targets.reserve(times.size());
    for (double t : times) {
        FloatMap m{{t_symbol, t}};
        std::vector<double> row;
        for (const auto& z : z_of_t) row.push_back(evaluate_float(z, m));
        for (const auto& z : dz) row.push_back(evaluate_float(z, m));
        for (const auto& z : ddz) row.push_back(evaluate_float(z, m));
        targets.push_back(std::move(row));
    }
    return targets;
}

std::vector<double> uniform_times(double t0, double t1, double dt) {
    std::vector<double> times;
    const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
    for (std::size_t i = 0; i <= steps; ++i) times.push_back(t0 + dt * static_cast<double>(i));
    return times;
}

}  // namespace

RecoveredTrajectory recover_inputs_numeric(const ControlAffineSystem& sys, int k,
                                           const std::vector<Expr>& psi,
                                           const std::vector<Expr>& z_of_t, SymbolId t_symbol,
                                           const SymbolTable&, double t0, double t1, double dt,
                                           const std::vector<double>& initial_guess) {
    require_valid_k(sys, k);
    if (z_of_t.size() != sys.n() - 1)
        throw std::invalid_argument("flat-output signal must have n-1 components");
    const std::vector<double> times = uniform_times(t0, t1, dt);
    return recover_from_targets(sys, k, psi, times, symbolic_targets(z_of_t, t_symbol, times),
                                initial_guess);
}

RecoveredTrajectory recover_inputs_numeric_sampled(
    const ControlAffineSystem& sys, int k, const std::vector<Expr>& psi, double t0, double dt,
    const std::vector<std::vector<double>>& z_samples, const std::vector<double>& initial_guess) {
    require_valid_k(sys, k);
    const std::size_t N = z_samples.size();
    const std::size_t nz = sys.n() - 1;
    std::vector<double> times(N);
    for (std::size_t i = 0; i < N; ++i) times[i] = t0 + dt * static_cast<double>(i);

    // component-wise 4th-order finite differences
    std::vector<std::vector<double>> z(nz, std::vector<double>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t c = 0; c < nz; ++c) z[c][i] = z_samples[i][c];
    std::vector<std::vector<double>> dz, ddz;
    for (std::size_t c = 0; c < nz; ++c) {
        dz.push_back(fd_derivative(z[c], dt, 1));
        ddz.push_back(fd_derivative(z[c], dt, 2));
    }
    std::vector<std::vector<double>> targets(N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t c = 0; c < nz; ++c) targets[i].push_back(z[c][i]);
        for (std::size_t c = 0; c < nz; ++c) targets[i].push_back(dz[c][i]);
        for (std::size_t c = 0; c < nz; ++c) targets[i].push_back(ddz[c][i]);
    }
    return recover_from_targets(sys, k, psi, times, targets, initial_guess);
}

RoundTripResult generic_round_trip(const ControlAffineSystem& sys, int k,
                                   const std::vector<Expr>& psi, const std::vector<Expr>& z_of_t,
                                   SymbolId t_symbol, const SymbolTable& signal_table, double t0,
                                   double t1, double dt, const std::vector<double>& initial_guess) {
    RoundTripResult out;
    // recover on the half grid so RK4 can look inputs up at mid-steps
    out.recovered = recover_inputs_numeric(sys, k, psi, z_of_t, t_symbol, signal_table, t0, t1,
                                           dt / 2, initial_guess);
    if (!out.recovered.ok) {
        out.error = out.recovered.error;
        return out;
    }
    const auto& rec = out.recovered;
    auto u_signal = [&rec, t0, dt](double t) {
        const double pos = (t - t0) / (dt / 2);
        auto idx = static_cast<std::size_t>(std::llround(pos));
        idx = std::min(idx, rec.u.size() - 1);
        return rec.u[idx];
    };
    try {
        out.simulated = integrate(sys, rec.x.front(), u_signal, t0, t1, dt);
    } catch (const EvalError& e) {
        out.error = std::string("forward simulation failed: ") + e.what();
        return out;
    }

    double res = 0.0;
    for (std::size_t i = 0; i < out.simulated.samples(); ++i) {
        const double t = out.simulated.time(i);
        FloatMap mt{{t_symbol, t}};
        FloatMap mx;
        for (std::size_t j = 0; j < sys.n(); ++j) mx[sys.state_frame[j]] = out.simulated.states[i][j];
        for (std::size_t c = 0; c < psi.size(); ++c) {
            const double zc = evaluate_float(z_of_t[c], mt);
            const double pc = evaluate_float(psi[c], mx);
            res = std::max(res, std::abs(pc - zc));
        }
    }
    out.z_residual = res;
    out.ok = true;
    return out;
}

FeedbackLinearizationReport feedback_linearization_check(const ControlAffineSystem& sys, int k,
                                                         const PointMap& point,
                                                         const Sampler& sampler) {
    require_valid_k(sys, k);
    FeedbackLinearizationReport rep;
    const std::size_t n = sys.n();
    rep.required_rank = 2 * n - 2;

    // extended frame (x, u_hat): the non-distinguished controls become states
    Frame ext = sys.state_frame;
    std::vector<SymbolId> uhat;
    for (std::size_t j = 0; j < sys.m(); ++j) {
        if (static_cast<int>(j) + 1 == k) continue;
        uhat.push_back(sys.control_symbols[j]);
        ext.push_back(sys.control_symbols[j]);
    }

    auto lift = [&](const VectorField& v) {
        std::vector<Expr> comps = v.components;
        comps.resize(ext.size(), Expr::integer(0));
        return VectorField(ext, std::move(comps));
    };

    // drift f = f0 + sum_{j != k} u_j f_j
    VectorField f = lift(sys.drift);
    for (std::size_t j = 0; j < sys.m(); ++j) {
        if (static_cast<int>(j) + 1 == k) continue;
        f = add(f, scale(Expr::variable(sys.control_symbols[j]), lift(sys.controls[j])));
    }

    std::vector<VectorField> g0;
    for (std::size_t j = 0; j < uhat.size(); ++j) {
        const auto axis = static_cast<std::size_t>(
            std::find(ext.begin(), ext.end(), uhat[j]) - ext.begin());
        g0.push_back(coordinate_field(ext, axis));
    }
    g0.push_back(lift(sys.controls[static_cast<std::size_t>(k - 1)]));

    Distribution G0(ext, g0);
    rep.G0_involutive =
        is_involutive(G0, std::nullopt, sampler).verdict == InvolutivityVerdict::Involutive;

    std::vector<VectorField> g1 = g0;
    for (const auto& v : g0) {
        VectorField br = lie_bracket(f, v);
        if (!br.is_zero()) g1.push_back(std::move(br));
    }
    Distribution G1(ext, g1);
    rep.G1_involutive =
        is_involutive(G1, std::nullopt, sampler).verdict == InvolutivityVerdict::Involutive;
    try {
        rep.G1_rank_at_point = rank_at_point(G1.matrix(), point);
    } catch (const EvalError&) {
        rep.G1_rank_at_point = 0;
    }
    rep.passed = rep.G0_involutive && rep.G1_involutive && rep.G1_rank_at_point == rep.required_rank;
    return rep;
}

IntegralSearchResult search_first_integrals(const ControlAffineSystem& sys, int k,
                                            const PointMap& point, int degree_bound,
                                            const Sampler& sampler) {
    require_valid_k(sys, k);
    if (degree_bound < 1) throw std::invalid_argument("degree_bound must be >= 1");
    const VectorField& fk = sys.controls[static_cast<std::size_t>(k - 1)];

    // f_k must not vanish at the point
    bool zero_at_point = true;
    for (const auto& c : fk.components) {
        try {
            if (!evaluate(c, point).is_zero()) zero_at_point = false;
        } catch (const EvalError&) {
            zero_at_point = false;  // undecidable at the point, let the search run
        }
    }
    if (zero_at_point) throw std::invalid_argument("search_first_integrals: f_k vanishes at point");

    IntegralSearchResult out;
    const std::vector<MonoKey> basis = monomials_up_to(sys.state_frame, degree_bound);

    // linear system over the ansatz coefficients: L_{f_k} p = 0 identically
    std::map<MonoKey, std::size_t> row_of;
    std::vector<std::vector<std::pair<std::size_t, Rational>>> cols(basis.size());
    bool ansatz_ok = true;
    for (std::size_t c = 0; c < basis.size() && ansatz_ok; ++c) {
        const Expr mono = poly_to_expr(Poly{{basis[c], Rational(1)}});
        Expr lder = canonical(lie_derivative(fk, mono));
        if (lder.kind() == ExprKind::Quotient) lder = lder.numerator();
        auto p = expr_to_poly(lder);
        if (!p) {
            auto rp = expr_to_rational_poly(lder);
            if (!rp) {
                ansatz_ok = false;
                out.notes.push_back("ansatz inapplicable: non-rational Lie derivative");
                break;
            }
            p = rp->first;
        }
        for (const auto& [m, coeff] : *p) {
            auto [it, inserted] = row_of.emplace(m, row_of.size());
            cols[c].push_back({it->second, coeff});
        }
    }

    if (ansatz_ok) {
        QMatrix sysm(row_of.size(), basis.size());
        for (std::size_t c = 0; c < basis.size(); ++c)
            for (const auto& [r, coeff] : cols[c]) sysm.at(r, c) = coeff;
        const auto kernel = nullspace(sysm);

        std::vector<Expr> candidates;
        for (const auto& v : kernel) {
            Poly p;
            for (std::size_t c = 0; c < basis.size(); ++c)
                if (!v[c].is_zero()) p.emplace(basis[c], v[c]);
            candidates.push_back(poly_to_expr(p));
        }
        std::sort(candidates.begin(), candidates.end(), [](const Expr& a, const Expr& b) {
            const long da = total_degree(a), db = total_degree(b);
            if (da != db) return da < db;
            const std::size_t na = node_count(a), nb = node_count(b);
            if (na != nb) return na < nb;
            return compare(a, b) < 0;
        });

        // greedy selection by gradient rank at the point
        QMatrix grad(0, 0);
        std::vector<Expr> picked;
        for (const auto& cand : candidates) {
            if (picked.size() == sys.n() - 1) break;
            std::vector<Expr> trial = picked;
            trial.push_back(cand);
            try {
                if (bareiss_rank(jacobian_at(trial, sys.state_frame, point)) == trial.size())
                    picked = std::move(trial);
            } catch (const EvalError&) {
            }
        }
        out.symbolic = std::move(picked);
    }

    if (out.symbolic.size() < sys.n() - 1) {
        // numeric flow-box fallback (labelled non-symbolic)
        std::vector<double> fp;
        fp.reserve(sys.n());
        for (SymbolId s : sys.state_frame) {
            auto it = point.find(s);
            fp.push_back(it == point.end() ? 0.0 : it->second.to_double());
        }
        try {
            out.numeric = flow_box_integrals(fk, fp);
            out.used_numeric_fallback = true;
            out.notes.push_back("polynomial ansatz found " + std::to_string(out.symbolic.size()) +
                                " of " + std::to_string(sys.n() - 1) +
                                " integrals; flow-box integrals supplied numerically");
        } catch (const std::exception& e) {
            out.notes.push_back(std::string("numeric fallback failed: ") + e.what());
        }
    }
    (void)sampler;
    return out;
}

}  // namespace flatlas
