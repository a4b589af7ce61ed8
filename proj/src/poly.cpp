#include "flatlas/poly.hpp"

#include <algorithm>

namespace flatlas {

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [m, c] : b) {
        auto [it, inserted] = out.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) out.erase(it);
        }
    }
    return out;
}

Poly poly_scale(const Poly& a, const Rational& c) {
    if (c.is_zero()) return {};
    Poly out;
    for (const auto& [m, v] : a) out.emplace(m, v * c);
    return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a) {
        for (const auto& [mb, cb] : b) {
            MonoKey m = ma;
            for (const auto& [s, e] : mb) m[s] += e;
            Rational c = ca * cb;
            auto [it, inserted] = out.emplace(std::move(m), c);
            if (!inserted) {
                it->second += c;
                if (it->second.is_zero()) out.erase(it);
            }
        }
    }
    return out;
}

Poly poly_pow(const Poly& a, long e) {
    Poly out{{MonoKey{}, Rational(1)}};
    for (long i = 0; i < e; ++i) out = poly_mul(out, a);
    return out;
}

std::optional<Poly> expr_to_poly(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Constant: {
            if (e.constant_value().is_zero()) return Poly{};
            return Poly{{MonoKey{}, e.constant_value()}};
        }
        case ExprKind::Variable:
            return Poly{{MonoKey{{e.symbol(), 1}}, Rational(1)}};
        case ExprKind::Sum: {
            Poly acc;
            for (const auto& k : e.children()) {
                auto p = expr_to_poly(k);
                if (!p) return std::nullopt;
                acc = poly_add(acc, *p);
            }
            return acc;
        }
        case ExprKind::Product: {
            Poly acc{{MonoKey{}, Rational(1)}};
            for (const auto& k : e.children()) {
                auto p = expr_to_poly(k);
                if (!p) return std::nullopt;
                acc = poly_mul(acc, *p);
            }
            return acc;
        }
        case ExprKind::Power: {
            if (e.power_exponent() < 0) return std::nullopt;
            auto p = expr_to_poly(e.base());
            if (!p) return std::nullopt;
            return poly_pow(*p, e.power_exponent());
        }
        case ExprKind::Quotient: {
            auto d = expr_to_poly(e.denominator());
            if (!d || d->size() != 1 || !d->begin()->first.empty()) return std::nullopt;
            auto n = expr_to_poly(e.numerator());
            if (!n) return std::nullopt;
            return poly_scale(*n, d->begin()->second.inverse());
        }
        case ExprKind::Apply:
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<std::pair<Poly, Poly>> expr_to_rational_poly(const Expr& e) {
    const Poly one{{MonoKey{}, Rational(1)}};
    switch (e.kind()) {
        case ExprKind::Constant:
        case ExprKind::Variable: {
            auto p = expr_to_poly(e);
            if (!p) return std::nullopt;
            return std::make_pair(*p, one);
        }
        case ExprKind::Sum: {
            Poly num, den = one;
            for (const auto& k : e.children()) {
                auto kp = expr_to_rational_poly(k);
                if (!kp) return std::nullopt;
                // a/b + c/d = (ad + cb) / (bd)
                num = poly_add(poly_mul(num, kp->second), poly_mul(kp->first, den));
                den = poly_mul(den, kp->second);
            }
            return std::make_pair(num, den);
        }
        case ExprKind::Product: {
            Poly num = one, den = one;
            for (const auto& k : e.children()) {
                auto kp = expr_to_rational_poly(k);
                if (!kp) return std::nullopt;
                num = poly_mul(num, kp->first);
                den = poly_mul(den, kp->second);
            }
            return std::make_pair(num, den);
        }
        case ExprKind::Power: {
            auto bp = expr_to_rational_poly(e.base());
            if (!bp) return std::nullopt;
            const long k = e.power_exponent();
            if (k >= 0) return std::make_pair(poly_pow(bp->first, k), poly_pow(bp->second, k));
            return std::make_pair(poly_pow(bp->second, -k), poly_pow(bp->first, -k));
        }
        case ExprKind::Quotient: {
            auto np = expr_to_rational_poly(e.numerator());
            auto dp = expr_to_rational_poly(e.denominator());
            if (!np || !dp) return std::nullopt;
            return std::make_pair(poly_mul(np->first, dp->second),
                                  poly_mul(np->second, dp->first));
        }
        case ExprKind::Apply:
            return std::nullopt;
    }
    return std::nullopt;
}

Expr poly_to_expr(const Poly& p) {
    std::vector<Expr> terms;
    terms.reserve(p.size());
    for (const auto& [m, c] : p) {
        std::vector<Expr> factors{Expr::constant(c)};
        for (const auto& [s, e] : m) factors.push_back(Expr::power(Expr::variable(s), e));
        terms.push_back(Expr::product(std::move(factors)));
    }
    return Expr::sum(std::move(terms));
}

long mono_degree(const MonoKey& m) {
    long d = 0;
    for (const auto& [s, e] : m) d += e;
    return d;
}

namespace {

void enumerate(const std::vector<SymbolId>& vars, std::size_t idx, int remaining, MonoKey& cur,
               std::vector<MonoKey>& out) {
    if (idx == vars.size()) {
        if (!cur.empty()) out.push_back(cur);
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        if (e > 0) cur[vars[idx]] = e;
        enumerate(vars, idx + 1, remaining - e, cur, out);
        if (e > 0) cur.erase(vars[idx]);
    }
}

}  // namespace

std::vector<MonoKey> monomials_up_to(const std::vector<SymbolId>& vars, int max_degree) {
    std::vector<MonoKey> out;
    MonoKey cur;
    enumerate(vars, 0, max_degree, cur, out);
    std::sort(out.begin(), out.end(), [](const MonoKey& a, const MonoKey& b) {
        const long da = mono_degree(a), db = mono_degree(b);
        if (da != db) return da < db;
        return a < b;
    });
    return out;
}

}  // namespace flatlas
