#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flatlas/expr.hpp"
#include "flatlas/parse.hpp"
#include "flatlas/sampling.hpp"

using namespace flatlas;

namespace {

SymbolTable make_table() {
    SymbolTable t;
    for (const char* n : {"x1", "x2", "x3", "x4", "u1", "u2"}) t.add(n);
    return t;
}

}  // namespace

TEST_CASE("rational invariants") {
    Rational r(6, -4);
    CHECK(r == Rational(-3, 2));
    CHECK(r.denominator() == 2);
    CHECK(r.numerator() == -3);
    CHECK(Rational::from_decimal("0", "25") == Rational(1, 4));
    CHECK(Rational(2, 3).pow(-2) == Rational(9, 4));
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
    CHECK(Rational::content_gcd(Rational(1, 2), Rational(1, 3)) == Rational(1, 6));
}

TEST_CASE("canonical constant folding and flattening") {
    SymbolTable t = make_table();
    const Expr x1 = Expr::variable(*t.find("x1"));
    const Expr x2 = Expr::variable(*t.find("x2"));

    CHECK(Expr::sum({Expr::integer(2), Expr::integer(3)}) == Expr::integer(5));
    CHECK(Expr::product({Expr::integer(2), Expr::integer(3)}) == Expr::integer(6));
    CHECK(Expr::sum({x1, x1}) == Expr::product({Expr::integer(2), x1}));
    CHECK(Expr::sum({x1, Expr::integer(-1) * x1}).is_zero());
    CHECK(Expr::product({x1, x1}) == Expr::power(x1, 2));
    CHECK(Expr::product({x1, Expr::integer(0)}).is_zero());
    CHECK(Expr::power(x1, 0).is_one());
    CHECK(Expr::power(Expr::power(x1, 2), 3) == Expr::power(x1, 6));

    // nested sums and products flatten
    Expr nested = Expr::sum({Expr::sum({x1, x2}), x1});
    CHECK(nested == Expr::sum({Expr::product({Expr::integer(2), x1}), x2}));
}

TEST_CASE("quotient canonicalization") {
    SymbolTable t = make_table();
    const Expr x1 = Expr::variable(*t.find("x1"));
    const Expr x2 = Expr::variable(*t.find("x2"));

    // x/x reduces via monomial gcd cancellation
    CHECK(Expr::quotient(x1, x1).is_one());
    // constant denominators fold into the numerator
    CHECK(Expr::quotient(x1, Expr::integer(2)) == Expr::product({Expr::constant(Rational(1, 2)), x1}));
    // zero literal denominators are rejected
    CHECK_THROWS_AS(Expr::quotient(x1, Expr::integer(0)), EvalError);
    // nested quotients normalize
    Expr q = Expr::quotient(Expr::quotient(x1, x2), x1);
    CHECK(q == Expr::quotient(Expr::integer(1), x2));
    // monomial gcd: (2 x1 x2) / (4 x1) = x2/2
    Expr r = Expr::quotient(Expr::product({Expr::integer(2), x1, x2}),
                            Expr::product({Expr::integer(4), x1}));
    CHECK(r == Expr::product({Expr::constant(Rational(1, 2)), x2}));
    // denominator sign normalization
    Expr s = Expr::quotient(x2, Expr::integer(-1) * x1);
    CHECK(s == Expr::quotient(Expr::integer(-1) * x2, x1));
}

TEST_CASE("canonicalization is idempotent") {
    SymbolTable t = make_table();
    Sampler sampler;
    const Expr x1 = Expr::variable(*t.find("x1"));
    const Expr x2 = Expr::variable(*t.find("x2"));
    std::vector<Expr> cases = {
        parse_expr("2*x2*x4 - x3^2", t),
        parse_expr("(x1*x4 - x3)/(x2^2 + 1)", t),
        parse_expr("sin(x1^2)*cos(x2) + exp(x1)/x2", t),
        Expr::quotient(Expr::sum({x1, x2}), Expr::product({x1, x2})),
    };
    for (const auto& e : cases) {
        CHECK(canonical(e) == e);
        CHECK(canonical(canonical(e)) == canonical(e));
    }
}

TEST_CASE("differentiate basics") {
    SymbolTable t = make_table();
    const SymbolId x1 = *t.find("x1");
    const SymbolId x3 = *t.find("x3");

    // d/dx3 (2 x2 x4 - x3^2) = -2 x3
    Expr e = parse_expr("2*x2*x4 - x3^2", t);
    CHECK(differentiate(e, x3) == parse_expr("-2*x3", t));

    // d/dx1 (x1 x4 - x3) = x4
    CHECK(differentiate(parse_expr("x1*x4 - x3", t), x1) == parse_expr("x4", t));

    // chain rule: d/dx1 sin(x1^2) = 2 x1 cos(x1^2)
    CHECK(differentiate(parse_expr("sin(x1^2)", t), x1) == parse_expr("2*x1*cos(x1^2)", t));

    // quotient rule: d/dx1 (x1/x2) = 1/x2
    CHECK(differentiate(parse_expr("x1/x2", t), x1) == parse_expr("1/x2", t));

    // ln and sqrt are formal
    CHECK(differentiate(parse_expr("ln(x1)", t), x1) == parse_expr("1/x1", t));
    CHECK(differentiate(parse_expr("sqrt(x1)", t), x1) ==
          Expr::quotient(Expr::integer(1), Expr::integer(2) * Expr::apply(Func::Sqrt, Expr::variable(x1))));
}

TEST_CASE("differentiate is linear") {
    SymbolTable t = make_table();
    Sampler sampler;
    const SymbolId x1 = *t.find("x1");
    std::vector<Expr> pool = {
        parse_expr("x1^3 - 2*x1*x2", t), parse_expr("x2 + x1*x3^2", t),
        parse_expr("x1*x2*x3", t),       parse_expr("7*x1^2 - x4", t),
        parse_expr("x1/(x2+3)", t),
    };
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = 0; j < pool.size(); ++j) {
            const Expr a = Expr::constant(Rational(3, 2));
            Expr lhs = differentiate(a * pool[i] + pool[j], x1);
            Expr rhs = a * differentiate(pool[i], x1) + differentiate(pool[j], x1);
            CHECK(is_zero_expr(lhs - rhs, sampler));
        }
    }
}

TEST_CASE("evaluate exact") {
    SymbolTable t = make_table();
    PointMap pt;
    pt[*t.find("x2")] = Rational(1);
    pt[*t.find("x3")] = Rational(2);
    pt[*t.find("x4")] = Rational(3);

    CHECK(evaluate(parse_expr("2*x2*x4 - x3^2", t), pt) == Rational(2));
    CHECK(evaluate(Expr::constant(Rational(5, 3)), pt) == Rational(5, 3));

    // x/x: unsimplified raw tree divides by zero at x=0, canonical form is 1
    const Expr x2 = Expr::variable(*t.find("x2"));
    Expr raw = Expr::raw_quotient(x2, x2);
    PointMap zero_pt;
    zero_pt[*t.find("x2")] = Rational(0);
    CHECK_THROWS_AS(evaluate(raw, zero_pt), EvalError);
    CHECK(evaluate(canonical(raw), zero_pt) == Rational(1));

    // transcendental nodes are rejected in exact mode
    CHECK_THROWS_AS(evaluate(parse_expr("sin(x2)", t), pt), EvalError);
    // unbound symbol
    CHECK_THROWS_AS(evaluate(parse_expr("x1", t), pt), EvalError);
}

TEST_CASE("evaluate_float") {
    SymbolTable t = make_table();
    FloatMap pt;
    pt[*t.find("x1")] = 1.0;
    CHECK(evaluate_float(parse_expr("sin(0*x1)", t), pt) == doctest::Approx(0.0));
    CHECK(evaluate_float(parse_expr("exp(0*x1) + x1", t), pt) == doctest::Approx(2.0));
    // (y1d - y2)/y1 pattern at (3, 1, 2) -> 1.0
    SymbolTable ty;
    ty.add("y1");
    ty.add("y2");
    ty.add("y1_d1");
    FloatMap fy{{0, 2.0}, {1, 1.0}, {2, 3.0}};
    CHECK(evaluate_float(parse_expr("(y1_d1 - y2)/y1", ty), fy) == doctest::Approx(1.0));
    // NaN propagates as error
    FloatMap bad{{*t.find("x1"), -1.0}};
    CHECK_THROWS_AS(evaluate_float(parse_expr("sqrt(x1)", t), bad), EvalError);
}

TEST_CASE("derivative matches central finite differences on random polynomials") {
    SymbolTable t = make_table();
    Sampler sampler(0xD1FF);
    // random polynomial expressions built from a fixed seed
    std::vector<SymbolId> vars;
    for (const char* n : {"x1", "x2", "x3"}) vars.push_back(*t.find(n));
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // build sum of up to 4 monomials with degree <= 3
        std::vector<Expr> terms;
        for (int m = 0; m <= trial % 4; ++m) {
            std::vector<Expr> factors{Expr::constant(sampler.rational(17 * trial + m, 0))};
            for (int d = 0; d < 1 + (trial + m) % 3; ++d) {
                SymbolId v = vars[(trial + m + d) % vars.size()];
                factors.push_back(Expr::variable(v));
            }
            terms.push_back(Expr::product(std::move(factors)));
        }
        Expr e = Expr::sum(std::move(terms));
        SymbolId v = vars[trial % vars.size()];
        Expr de = differentiate(e, v);

        PointMap pt = sampler.point_for(free_symbols(e), 1000 + trial);
        pt.emplace(v, sampler.rational(2000 + trial, 7));
        FloatMap fpt;
        for (const auto& [k, val] : pt) fpt[k] = val.to_double();
        const double h = 1e-5;
        FloatMap up = fpt, dn = fpt;
        up[v] += h;
        dn[v] -= h;
        const double fd = (evaluate_float(e, up) - evaluate_float(e, dn)) / (2 * h);
        const double sym = evaluate(de, pt).to_double();
        const double scale = std::max(1.0, std::abs(sym));
        CHECK(std::abs(fd - sym) / scale < 1e-6);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("total order is deterministic and total") {
    SymbolTable t = make_table();
    Expr a = parse_expr("x1", t);
    Expr b = parse_expr("x2", t);
    Expr c = parse_expr("x1 + x2", t);
    CHECK(compare(a, a) == 0);
    CHECK(compare(a, b) == -compare(b, a));
    CHECK(compare(a, c) != 0);
}
