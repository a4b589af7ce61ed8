#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

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

TEST_CASE("grammar structure") {
    SymbolTable t = make_table();
    const Expr x2 = Expr::variable(*t.find("x2"));
    const Expr x3 = Expr::variable(*t.find("x3"));
    const Expr x4 = Expr::variable(*t.find("x4"));

    Expr e = parse_expr("2*x2*x4 - x3^2", t);
    Expr expected = Expr::sum({Expr::product({Expr::integer(2), x2, x4}),
                               Expr::product({Expr::integer(-1), Expr::power(x3, 2)})});
    CHECK(e == expected);

    CHECK(parse_expr("0", t) == Expr::integer(0));
    CHECK(parse_expr("(x1*x4 - x3)/1", t) == parse_expr("x1*x4 - x3", t));

    // precedence: ^ binds tighter than * which binds tighter than +
    CHECK(parse_expr("x2 + x3*x4^2", t) ==
          Expr::sum({x2, Expr::product({x3, Expr::power(x4, 2)})}));
    // left-assoc division
    CHECK(parse_expr("x2/x3/x4", t) == Expr::quotient(x2, Expr::product({x3, x4})));
}

TEST_CASE("equivalent forms evaluate equally at random points") {
    SymbolTable t = make_table();
    Sampler sampler;
    Expr a = parse_expr("(x1*x4 - x3)/1", t);
    Expr b = parse_expr("x1*x4 - x3", t);
    std::set<SymbolId> syms = free_symbols(a);
    for (int i = 0; i < 20; ++i) {
        PointMap pt = sampler.point_for(syms, i);
        CHECK(evaluate(a, pt) == evaluate(b, pt));
    }
}

TEST_CASE("decimals convert exactly") {
    SymbolTable t = make_table();
    CHECK(parse_expr("0.25", t) == Expr::constant(Rational(1, 4)));
    CHECK(parse_expr("1.5*x1", t) ==
          Expr::product({Expr::constant(Rational(3, 2)), Expr::variable(*t.find("x1"))}));
}

TEST_CASE("errors carry byte offsets") {
    SymbolTable t = make_table();
    CHECK_THROWS_AS(parse_expr("x1 + ", t), ParseError);
    CHECK_THROWS_AS(parse_expr("x9", t), ParseError);
    CHECK_THROWS_AS(parse_expr("x1 + (x2", t), ParseError);
    CHECK_THROWS_AS(parse_expr("x1 @ x2", t), ParseError);
    CHECK_THROWS_AS(parse_expr("tan(x1)", t), ParseError);  // not whitelisted
    CHECK_THROWS_AS(parse_expr("x1/0", t), ParseError);     // zero literal denominator

    try {
        parse_expr("x1 + zz", t);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.offset() == 5);
    }
}

TEST_CASE("unary minus and signed exponents") {
    SymbolTable t = make_table();
    CHECK(parse_expr("-x1", t) == Expr::integer(-1) * Expr::variable(*t.find("x1")));
    CHECK(parse_expr("-2*x1 + x2", t) ==
          parse_expr("x2", t) - parse_expr("2*x1", t));
    CHECK(parse_expr("x1^-2", t) ==
          Expr::quotient(Expr::integer(1), Expr::power(Expr::variable(*t.find("x1")), 2)));
}

TEST_CASE("parse(render(e)) round-trips") {
    SymbolTable t = make_table();
    std::vector<std::string> sources = {
        "2*x2*x4 - x3^2",
        "(x1*x4 - x3)/(x2 + 1)",
        "sin(x1^2)*cos(x2) + exp(x3)/(x4 + 2)",
        "-x1 + 5/3*x2 - sqrt(x3)",
        "x1*(x2 + x3)^2",
        "ln(x1/x2)",
        "0.125*x1^3 - 7*x2*x3*x4",
        "1/(x1*(x2 + x3))",
    };
    for (const auto& s : sources) {
        Expr e = parse_expr(s, t);
        Expr back = parse_expr(render(e, t), t);
        CHECK(back == e);
    }
}
