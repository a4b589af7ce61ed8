#include "flatlas/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flatlas {

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Sqrt: return "sqrt";
    }
    return "?";
}

struct ExprFactory {
    static Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }
};

namespace {

Expr make_node(ExprNode n) { return ExprFactory::make(std::move(n)); }

const Rational kZero(0);
const Rational kOne(1);

int kind_rank(ExprKind k) {
    switch (k) {
        case ExprKind::Constant: return 0;
        case ExprKind::Variable: return 1;
        case ExprKind::Apply: return 2;
        case ExprKind::Power: return 3;
        case ExprKind::Product: return 4;
        case ExprKind::Quotient: return 5;
        case ExprKind::Sum: return 6;
    }
    return 7;
}

}  // namespace

Expr::Expr() { *this = Expr::constant(Rational(0)); }

ExprKind Expr::kind() const { return node_->kind; }
const Rational& Expr::constant_value() const { return node_->value; }
SymbolId Expr::symbol() const { return node_->sym; }
const std::vector<Expr>& Expr::children() const { return node_->kids; }
long Expr::power_exponent() const { return node_->exponent; }
Func Expr::function() const { return node_->func; }
const Expr& Expr::base() const { return node_->kids[0]; }
const Expr& Expr::numerator() const { return node_->kids[0]; }
const Expr& Expr::denominator() const { return node_->kids[1]; }
const Expr& Expr::argument() const { return node_->kids[0]; }

bool Expr::is_zero() const { return kind() == ExprKind::Constant && constant_value().is_zero(); }
bool Expr::is_one() const { return kind() == ExprKind::Constant && constant_value().is_one(); }

int compare(const Expr& a, const Expr& b) {
    if (a.node() == b.node()) return 0;
    const int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a.kind()) {
        case ExprKind::Constant:
            return Rational::compare(a.constant_value(), b.constant_value());
        case ExprKind::Variable:
            return a.symbol() < b.symbol() ? -1 : (a.symbol() > b.symbol() ? 1 : 0);
        case ExprKind::Apply: {
            if (a.function() != b.function())
                return static_cast<int>(a.function()) < static_cast<int>(b.function()) ? -1 : 1;
            return compare(a.argument(), b.argument());
        }
        case ExprKind::Power: {
            int c = compare(a.base(), b.base());
            if (c != 0) return c;
            return a.power_exponent() < b.power_exponent() ? -1
                   : a.power_exponent() > b.power_exponent() ? 1 : 0;
        }
        default: {
            const auto& ka = a.children();
            const auto& kb = b.children();
            const std::size_t n = std::min(ka.size(), kb.size());
            for (std::size_t i = 0; i < n; ++i) {
                int c = compare(ka[i], kb[i]);
                if (c != 0) return c;
            }
            if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
            return 0;
        }
    }
}

Expr Expr::constant(Rational r) {
    ExprNode n;
    n.kind = ExprKind::Constant;
    n.value = std::move(r);
    return make_node(std::move(n));
}

Expr Expr::variable(SymbolId s) {
    ExprNode n;
    n.kind = ExprKind::Variable;
    n.sym = s;
    return make_node(std::move(n));
}

Expr Expr::raw_sum(std::vector<Expr> terms) {
    ExprNode n;
    n.kind = ExprKind::Sum;
    n.kids = std::move(terms);
    return make_node(std::move(n));
}

Expr Expr::raw_product(std::vector<Expr> factors) {
    ExprNode n;
    n.kind = ExprKind::Product;
    n.kids = std::move(factors);
    return make_node(std::move(n));
}

Expr Expr::raw_power(Expr base, long exponent) {
    ExprNode n;
    n.kind = ExprKind::Power;
    n.exponent = exponent;
    n.kids = {std::move(base)};
    return make_node(std::move(n));
}

Expr Expr::raw_quotient(Expr num, Expr den) {
    ExprNode n;
    n.kind = ExprKind::Quotient;
    n.kids = {std::move(num), std::move(den)};
    return make_node(std::move(n));
}

namespace {

// (coefficient, core) decomposition of a canonical term; core "1" is Constant(1).
std::pair<Rational, Expr> split_coefficient(const Expr& t) {
    if (t.kind() == ExprKind::Constant) return {t.constant_value(), Expr::constant(kOne)};
    if (t.kind() == ExprKind::Product && t.children().front().kind() == ExprKind::Constant) {
        const auto& kids = t.children();
        Rational c = kids.front().constant_value();
        if (kids.size() == 2) return {c, kids[1]};
        std::vector<Expr> rest(kids.begin() + 1, kids.end());
        ExprNode n;
        n.kind = ExprKind::Product;
        n.kids = std::move(rest);
        return {c, make_node(std::move(n))};
    }
    return {kOne, t};
}

Expr rebuild_term(const Rational& coeff, const Expr& core) {
    if (coeff.is_zero()) return Expr::constant(kZero);
    if (core.is_one()) return Expr::constant(coeff);
    if (coeff.is_one()) return core;
    std::vector<Expr> kids;
    kids.push_back(Expr::constant(coeff));
    if (core.kind() == ExprKind::Product) {
        for (const auto& k : core.children()) kids.push_back(k);
    } else {
        kids.push_back(core);
    }
    ExprNode n;
    n.kind = ExprKind::Product;
    n.kids = std::move(kids);
    return make_node(std::move(n));
}

// Leading coefficient of a canonical expression (first term for sums).
Rational leading_coefficient(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Constant: return e.constant_value();
        case ExprKind::Sum: return leading_coefficient(e.children().front());
        case ExprKind::Product: return split_coefficient(e).first;
        case ExprKind::Quotient: return leading_coefficient(e.numerator());
        default: return kOne;
    }
}

// --- monomial content for quotient cancellation -----------------------------

struct MonomialContent {
    Rational coeff;                     // gcd of |coefficients|
    std::map<Expr, long, ExprLess> bases;  // base -> min exponent over all terms
    bool first = true;
};

void term_factors(const Expr& t, Rational& coeff, std::map<Expr, long, ExprLess>& bases) {
    coeff = kOne;
    auto add_factor = [&](const Expr& f) {
        if (f.kind() == ExprKind::Constant) {
            coeff *= f.constant_value();
        } else if (f.kind() == ExprKind::Power) {
            bases[f.base()] += f.power_exponent();
        } else {
            bases[f] += 1;
        }
    };
    if (t.kind() == ExprKind::Product) {
        for (const auto& k : t.children()) add_factor(k);
    } else {
        add_factor(t);
    }
}

void content_merge(MonomialContent& acc, const Expr& term) {
    Rational c;
    std::map<Expr, long, ExprLess> bases;
    term_factors(term, c, bases);
    if (acc.first) {
        acc.coeff = c.abs();
        acc.bases = std::move(bases);
        acc.first = false;
        return;
    }
    acc.coeff = Rational::content_gcd(acc.coeff, c);
    for (auto it = acc.bases.begin(); it != acc.bases.end();) {
        auto jt = bases.find(it->first);
        if (jt == bases.end()) {
            it = acc.bases.erase(it);
        } else {
            it->second = std::min(it->second, jt->second);
            ++it;
        }
    }
}

MonomialContent monomial_content(const Expr& e) {
    MonomialContent acc;
    acc.coeff = kOne;
    if (e.kind() == ExprKind::Sum) {
        for (const auto& t : e.children()) content_merge(acc, t);
    } else {
        content_merge(acc, e);
    }
    return acc;
}

Expr divide_term_by_monomial(const Expr& t, const MonomialContent& g) {
    Rational c;
    std::map<Expr, long, ExprLess> bases;
    term_factors(t, c, bases);
    c /= g.coeff;
    for (const auto& [b, e] : g.bases) bases[b] -= e;
    std::vector<Expr> kids;
    for (const auto& [b, e] : bases) {
        if (e == 0) continue;
        kids.push_back(Expr::power(b, e));
    }
    kids.push_back(Expr::constant(c));
    return Expr::product(std::move(kids));
}

Expr divide_by_monomial(const Expr& e, const MonomialContent& g) {
    if (e.kind() == ExprKind::Sum) {
        std::vector<Expr> terms;
        terms.reserve(e.children().size());
        for (const auto& t : e.children()) terms.push_back(divide_term_by_monomial(t, g));
        return Expr::sum(std::move(terms));
    }
    return divide_term_by_monomial(e, g);
}

}  // namespace

Expr Expr::sum(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    flat.reserve(terms.size());
    for (auto& t : terms) {
        if (t.kind() == ExprKind::Sum) {
            for (const auto& k : t.children()) flat.push_back(k);
        } else {
            flat.push_back(std::move(t));
        }
    }
    Rational const_acc(0);
    std::map<Expr, Rational, ExprLess> by_core;
    for (const auto& t : flat) {
        auto [c, core] = split_coefficient(t);
        if (core.is_one()) {
            const_acc += c;
        } else {
            auto [it, inserted] = by_core.emplace(core, c);
            if (!inserted) it->second += c;
        }
    }
    std::vector<Expr> out;
    if (!const_acc.is_zero()) out.push_back(constant(const_acc));
    for (const auto& [core, c] : by_core) {
        if (c.is_zero()) continue;
        out.push_back(rebuild_term(c, core));
    }
    if (out.empty()) return constant(kZero);
    if (out.size() == 1) return out.front();
    std::sort(out.begin(), out.end(), ExprLess{});
    ExprNode n;
    n.kind = ExprKind::Sum;
    n.kids = std::move(out);
    return make_node(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    flat.reserve(factors.size());
    bool has_quotient = false;
    for (auto& f : factors) {
        if (f.kind() == ExprKind::Product) {
            for (const auto& k : f.children()) {
                if (k.kind() == ExprKind::Quotient) has_quotient = true;
                flat.push_back(k);
            }
        } else {
            if (f.kind() == ExprKind::Quotient) has_quotient = true;
            flat.push_back(std::move(f));
        }
    }
    if (has_quotient) {
        std::vector<Expr> nums, dens;
        for (auto& f : flat) {
            if (f.kind() == ExprKind::Quotient) {
                nums.push_back(f.numerator());
                dens.push_back(f.denominator());
            } else {
                nums.push_back(std::move(f));
            }
        }
        return quotient(product(std::move(nums)), product(std::move(dens)));
    }
    Rational coeff(1);
    std::map<Expr, long, ExprLess> by_base;
    for (const auto& f : flat) {
        if (f.kind() == ExprKind::Constant) {
            coeff *= f.constant_value();
        } else if (f.kind() == ExprKind::Power) {
            by_base[f.base()] += f.power_exponent();
        } else {
            by_base[f] += 1;
        }
    }
    if (coeff.is_zero()) return constant(kZero);
    std::vector<Expr> out;
    for (const auto& [b, e] : by_base) {
        if (e == 0) continue;  // x * x^-1 style cancellation (generic)
        out.push_back(power(b, e));
    }
    // power() may reintroduce quotients via negative exponents
    bool requotient = false;
    for (const auto& f : out)
        if (f.kind() == ExprKind::Quotient) requotient = true;
    if (requotient) {
        out.push_back(constant(coeff));
        return product(std::move(out));
    }
    std::sort(out.begin(), out.end(), ExprLess{});
    if (out.empty()) return constant(coeff);
    if (!coeff.is_one()) out.insert(out.begin(), constant(coeff));
    if (out.size() == 1) return out.front();
    ExprNode n;
    n.kind = ExprKind::Product;
    n.kids = std::move(out);
    return make_node(std::move(n));
}

Expr Expr::power(Expr base, long exponent) {
    if (exponent == 0) return constant(kOne);
    if (exponent == 1) return base;
    switch (base.kind()) {
        case ExprKind::Constant: {
            if (base.constant_value().is_zero() && exponent < 0)
                throw EvalError(EvalErrorKind::DivisionByZero, "0 raised to a negative power");
            return constant(base.constant_value().pow(exponent));
        }
        case ExprKind::Power:
            return power(base.base(), base.power_exponent() * exponent);
        case ExprKind::Product: {
            std::vector<Expr> kids;
            kids.reserve(base.children().size());
            for (const auto& k : base.children()) kids.push_back(power(k, exponent));
            return product(std::move(kids));
        }
        case ExprKind::Quotient: {
            if (exponent > 0)
                return quotient(power(base.numerator(), exponent), power(base.denominator(), exponent));
            return quotient(power(base.denominator(), -exponent), power(base.numerator(), -exponent));
        }
        default:
            break;
    }
    if (exponent < 0) return quotient(constant(kOne), power(std::move(base), -exponent));
    ExprNode n;
    n.kind = ExprKind::Power;
    n.exponent = exponent;
    n.kids = {std::move(base)};
    return make_node(std::move(n));
}

Expr Expr::quotient(Expr num, Expr den) {
    if (den.kind() == ExprKind::Quotient) {
        Expr dn = den.numerator(), dd = den.denominator();
        return quotient(product({std::move(num), std::move(dd)}), std::move(dn));
    }
    if (num.kind() == ExprKind::Quotient) {
        Expr nn = num.numerator(), nd = num.denominator();
        return quotient(std::move(nn), product({std::move(den), std::move(nd)}));
    }
    if (den.kind() == ExprKind::Constant) {
        if (den.constant_value().is_zero())
            throw EvalError(EvalErrorKind::DivisionByZero, "quotient with zero literal denominator");
        return product({constant(den.constant_value().inverse()), std::move(num)});
    }
    if (num.is_zero()) return constant(kZero);

    MonomialContent gn = monomial_content(num);
    MonomialContent gd = monomial_content(den);
    MonomialContent g;
    g.coeff = Rational::content_gcd(gn.coeff, gd.coeff);
    for (const auto& [b, e] : gn.bases) {
        auto it = gd.bases.find(b);
        if (it != gd.bases.end()) g.bases[b] = std::min(e, it->second);
    }
    if (g.coeff.is_zero()) g.coeff = kOne;
    if (leading_coefficient(den).sign() < 0) g.coeff = -g.coeff;
    if (!g.coeff.is_one() || !g.bases.empty()) {
        num = divide_by_monomial(num, g);
        den = divide_by_monomial(den, g);
    }
    if (den.kind() == ExprKind::Constant) {
        if (den.constant_value().is_zero())
            throw EvalError(EvalErrorKind::DivisionByZero, "quotient with zero literal denominator");
        return product({constant(den.constant_value().inverse()), std::move(num)});
    }
    if (num.is_zero()) return constant(kZero);
    ExprNode n;
    n.kind = ExprKind::Quotient;
    n.kids = {std::move(num), std::move(den)};
    return make_node(std::move(n));
}

Expr Expr::apply(Func f, Expr arg) {
    ExprNode n;
    n.kind = ExprKind::Apply;
    n.func = f;
    n.kids = {std::move(arg)};
    return make_node(std::move(n));
}

Expr canonical(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Constant:
        case ExprKind::Variable:
            return e;
        case ExprKind::Sum: {
            std::vector<Expr> kids;
            kids.reserve(e.children().size());
            for (const auto& k : e.children()) kids.push_back(canonical(k));
            return Expr::sum(std::move(kids));
        }
        case ExprKind::Product: {
            std::vector<Expr> kids;
            kids.reserve(e.children().size());
            for (const auto& k : e.children()) kids.push_back(canonical(k));
            return Expr::product(std::move(kids));
        }
        case ExprKind::Power:
            return Expr::power(canonical(e.base()), e.power_exponent());
        case ExprKind::Quotient:
            return Expr::quotient(canonical(e.numerator()), canonical(e.denominator()));
        case ExprKind::Apply:
            return Expr::apply(e.function(), canonical(e.argument()));
    }
    return e;
}

Expr differentiate(const Expr& e, SymbolId v) {
    switch (e.kind()) {
        case ExprKind::Constant:
            return Expr::constant(Rational(0));
        case ExprKind::Variable:
            return Expr::integer(e.symbol() == v ? 1 : 0);
        case ExprKind::Sum: {
            std::vector<Expr> terms;
            terms.reserve(e.children().size());
            for (const auto& k : e.children()) terms.push_back(differentiate(k, v));
            return Expr::sum(std::move(terms));
        }
        case ExprKind::Product: {
            const auto& kids = e.children();
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                if (kids[i].kind() == ExprKind::Constant) continue;
                std::vector<Expr> factors = kids;
                factors[i] = differentiate(kids[i], v);
                terms.push_back(Expr::product(std::move(factors)));
            }
            return Expr::sum(std::move(terms));
        }
        case ExprKind::Power: {
            const long k = e.power_exponent();
            return Expr::product(
                {Expr::integer(k), Expr::power(e.base(), k - 1), differentiate(e.base(), v)});
        }
        case ExprKind::Quotient: {
            const Expr& n = e.numerator();
            const Expr& d = e.denominator();
            Expr num = differentiate(n, v) * d - n * differentiate(d, v);
            return Expr::quotient(std::move(num), Expr::power(d, 2));
        }
        case ExprKind::Apply: {
            Expr da = differentiate(e.argument(), v);
            switch (e.function()) {
                case Func::Sin:
                    return Expr::apply(Func::Cos, e.argument()) * da;
                case Func::Cos:
                    return Expr::integer(-1) * Expr::apply(Func::Sin, e.argument()) * da;
                case Func::Exp:
                    return e * da;
                case Func::Ln:
                    return Expr::quotient(da, e.argument());
                case Func::Sqrt:
                    return Expr::quotient(da, Expr::integer(2) * e);
            }
        }
    }
    return Expr::constant(Rational(0));
}

Expr substitute(const Expr& e, const std::map<SymbolId, Expr>& repl) {
    switch (e.kind()) {
        case ExprKind::Constant:
            return e;
        case ExprKind::Variable: {
            auto it = repl.find(e.symbol());
            return it == repl.end() ? e : it->second;
        }
        case ExprKind::Sum: {
            std::vector<Expr> kids;
            for (const auto& k : e.children()) kids.push_back(substitute(k, repl));
            return Expr::sum(std::move(kids));
        }
        case ExprKind::Product: {
            std::vector<Expr> kids;
            for (const auto& k : e.children()) kids.push_back(substitute(k, repl));
            return Expr::product(std::move(kids));
        }
        case ExprKind::Power:
            return Expr::power(substitute(e.base(), repl), e.power_exponent());
        case ExprKind::Quotient:
            return Expr::quotient(substitute(e.numerator(), repl), substitute(e.denominator(), repl));
        case ExprKind::Apply:
            return Expr::apply(e.function(), substitute(e.argument(), repl));
    }
    return e;
}

Rational evaluate(const Expr& e, const PointMap& point) {
    switch (e.kind()) {
        case ExprKind::Constant:
            return e.constant_value();
        case ExprKind::Variable: {
            auto it = point.find(e.symbol());
            if (it == point.end())
                throw EvalError(EvalErrorKind::UnboundSymbol,
                                "unbound symbol id " + std::to_string(e.symbol()));
            return it->second;
        }
        case ExprKind::Sum: {
            Rational acc(0);
            for (const auto& k : e.children()) acc += evaluate(k, point);
            return acc;
        }
        case ExprKind::Product: {
            Rational acc(1);
            for (const auto& k : e.children()) acc *= evaluate(k, point);
            return acc;
        }
        case ExprKind::Power: {
            Rational b = evaluate(e.base(), point);
            if (b.is_zero() && e.power_exponent() < 0)
                throw EvalError(EvalErrorKind::DivisionByZero, "zero base with negative exponent");
            return b.pow(e.power_exponent());
        }
        case ExprKind::Quotient: {
            Rational d = evaluate(e.denominator(), point);
            if (d.is_zero())
                throw EvalError(EvalErrorKind::DivisionByZero, "division by zero at the point");
            return evaluate(e.numerator(), point) / d;
        }
        case ExprKind::Apply:
            throw EvalError(EvalErrorKind::TranscendentalInExactMode,
                            std::string(func_name(e.function())) + " node in exact evaluation");
    }
    return Rational(0);
}

double evaluate_float(const Expr& e, const FloatMap& point) {
    double r = 0;
    switch (e.kind()) {
        case ExprKind::Constant:
            r = e.constant_value().to_double();
            break;
        case ExprKind::Variable: {
            auto it = point.find(e.symbol());
            if (it == point.end())
                throw EvalError(EvalErrorKind::UnboundSymbol,
                                "unbound symbol id " + std::to_string(e.symbol()));
            r = it->second;
            break;
        }
        case ExprKind::Sum: {
            r = 0;
            for (const auto& k : e.children()) r += evaluate_float(k, point);
            break;
        }
        case ExprKind::Product: {
            r = 1;
            for (const auto& k : e.children()) r *= evaluate_float(k, point);
            break;
        }
        case ExprKind::Power:
            r = std::pow(evaluate_float(e.base(), point), static_cast<double>(e.power_exponent()));
            break;
        case ExprKind::Quotient: {
            double d = evaluate_float(e.denominator(), point);
            if (d == 0.0)
                throw EvalError(EvalErrorKind::DivisionByZero, "division by zero at the point");
            r = evaluate_float(e.numerator(), point) / d;
            break;
        }
        case ExprKind::Apply: {
            double a = evaluate_float(e.argument(), point);
            switch (e.function()) {
                case Func::Sin: r = std::sin(a); break;
                case Func::Cos: r = std::cos(a); break;
                case Func::Exp: r = std::exp(a); break;
                case Func::Ln: r = std::log(a); break;
                case Func::Sqrt: r = std::sqrt(a); break;
            }
            break;
        }
    }
    if (!std::isfinite(r)) throw EvalError(EvalErrorKind::NonFinite, "non-finite value in evaluation");
    return r;
}

void collect_symbols(const Expr& e, std::set<SymbolId>& out) {
    if (e.kind() == ExprKind::Variable) {
        out.insert(e.symbol());
        return;
    }
    for (const auto& k : e.children()) collect_symbols(k, out);
}

std::set<SymbolId> free_symbols(const Expr& e) {
    std::set<SymbolId> s;
    collect_symbols(e, s);
    return s;
}

bool depends_on(const Expr& e, SymbolId v) {
    if (e.kind() == ExprKind::Variable) return e.symbol() == v;
    for (const auto& k : e.children())
        if (depends_on(k, v)) return true;
    return false;
}

long total_degree(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Constant: return 0;
        case ExprKind::Variable: return 1;
        case ExprKind::Apply: return 2;
        case ExprKind::Power: return e.power_exponent() * total_degree(e.base());
        case ExprKind::Product: {
            long d = 0;
            for (const auto& k : e.children()) d += total_degree(k);
            return d;
        }
        case ExprKind::Quotient:
            return total_degree(e.numerator()) + total_degree(e.denominator());
        case ExprKind::Sum: {
            long d = 0;
            for (const auto& k : e.children()) d = std::max(d, total_degree(k));
            return d;
        }
    }
    return 0;
}

std::size_t node_count(const Expr& e) {
    std::size_t n = 1;
    for (const auto& k : e.children()) n += node_count(k);
    return n;
}

namespace {

// Precedence levels: Sum 1, Product/Quotient 2, Power 3, atoms 4.
int precedence(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Sum: return 1;
        case ExprKind::Product:
        case ExprKind::Quotient: return 2;
        case ExprKind::Power: return 3;
        default: return 4;
    }
}

void render_to(const Expr& e, const SymbolTable& table, std::ostringstream& os);

void render_wrapped(const Expr& e, const SymbolTable& table, std::ostringstream& os, int min_prec) {
    const bool negative_const =
        e.kind() == ExprKind::Constant && e.constant_value().sign() < 0;
    const bool negative_term =
        e.kind() == ExprKind::Product && leading_coefficient(e).sign() < 0;
    if (precedence(e) < min_prec || ((negative_const || negative_term) && min_prec > 1)) {
        os << '(';
        render_to(e, table, os);
        os << ')';
    } else {
        render_to(e, table, os);
    }
}

void render_to(const Expr& e, const SymbolTable& table, std::ostringstream& os) {
    switch (e.kind()) {
        case ExprKind::Constant: {
            os << e.constant_value().str();
            return;
        }
        case ExprKind::Variable:
            os << table.name(e.symbol());
            return;
        case ExprKind::Sum: {
            bool first = true;
            for (const auto& t : e.children()) {
                auto [c, core] = split_coefficient(t);
                if (!first) os << (c.sign() < 0 ? " - " : " + ");
                Rational cc = (!first && c.sign() < 0) ? -c : c;
                render_wrapped(rebuild_term(cc, core), table, os, first ? 1 : 2);
                first = false;
            }
            return;
        }
        case ExprKind::Product: {
            bool first = true;
            bool negated = false;
            for (const auto& f : e.children()) {
                if (first && !negated && f.kind() == ExprKind::Constant &&
                    f.constant_value() == Rational(-1) && e.children().size() > 1) {
                    os << '-';
                    negated = true;
                    continue;
                }
                if (!first) os << '*';
                render_wrapped(f, table, os, first ? 2 : 3);
                first = false;
            }
            return;
        }
        case ExprKind::Power:
            render_wrapped(e.base(), table, os, 4);
            os << '^' << e.power_exponent();
            return;
        case ExprKind::Quotient:
            render_wrapped(e.numerator(), table, os, 3);
            os << '/';
            render_wrapped(e.denominator(), table, os, 4);
            return;
        case ExprKind::Apply:
            os << func_name(e.function()) << '(';
            render_to(e.argument(), table, os);
            os << ')';
            return;
    }
}

}  // namespace

std::string render(const Expr& e, const SymbolTable& table) {
    std::ostringstream os;
    render_to(e, table, os);
    return os.str();
}

}  // namespace flatlas
