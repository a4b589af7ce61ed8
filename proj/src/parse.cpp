#include "flatlas/parse.hpp"

#include <cctype>
#include <optional>

namespace flatlas {

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;
    const SymbolTable& table;

    explicit Parser(std::string_view t, const SymbolTable& tab) : text(t), table(tab) {}

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'", pos);
    }

    Expr parse_expression() {
        skip_ws();
        bool negate = false;
        if (accept('-')) negate = true;
        else accept('+');
        Expr acc = parse_term();
        if (negate) acc = Expr::integer(-1) * acc;
        for (;;) {
            char c = peek();
            if (c == '+') {
                ++pos;
                acc = acc + parse_term();
            } else if (c == '-') {
                ++pos;
                acc = acc - parse_term();
            } else {
                return acc;
            }
        }
    }

    Expr parse_term() {
        Expr acc = parse_factor();
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++pos;
                acc = acc * parse_factor();
            } else if (c == '/') {
                ++pos;
                acc = acc / parse_factor();
            } else {
                return acc;
            }
        }
    }

    Expr parse_factor() {
        Expr a = parse_atom();
        if (peek() == '^') {
            ++pos;
            long e = parse_integer();
            a = Expr::power(std::move(a), e);
        }
        return a;
    }

    long parse_integer() {
        skip_ws();
        std::size_t start = pos;
        bool neg = false;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            neg = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            fail("expected integer exponent", start);
        long v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + (text[pos] - '0');
            if (v > 1000000) fail("exponent too large", start);
            ++pos;
        }
        return neg ? -v : v;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input", pos);
        char c = text[pos];
        if (c == '(') {
            ++pos;
            Expr e = parse_expression();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail(std::string("unexpected character '") + c + "'", pos);
    }

    Expr parse_number() {
        std::size_t start = pos;
        std::string int_part;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            int_part.push_back(text[pos++]);
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            std::string frac;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                frac.push_back(text[pos++]);
            if (frac.empty()) fail("expected digits after decimal point", pos);
            return Expr::constant(Rational::from_decimal(int_part, frac));
        }
        try {
            return Expr::constant(Rational::from_string(int_part));
        } catch (const std::invalid_argument& e) {
            fail(e.what(), start);
        }
    }

    Expr parse_identifier() {
        std::size_t start = pos;
        std::string name;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            name.push_back(text[pos++]);
        std::optional<Func> f = function_from_name(name);
        skip_ws();
        if (f && pos < text.size() && text[pos] == '(') {
            ++pos;
            Expr arg = parse_expression();
            expect(')');
            return Expr::apply(*f, std::move(arg));
        }
        auto id = table.find(name);
        if (!id) fail("unknown identifier '" + name + "'", start);
        return Expr::variable(*id);
    }

    static std::optional<Func> function_from_name(const std::string& n) {
        if (n == "sin") return Func::Sin;
        if (n == "cos") return Func::Cos;
        if (n == "exp") return Func::Exp;
        if (n == "ln") return Func::Ln;
        if (n == "sqrt") return Func::Sqrt;
        return std::nullopt;
    }
};

}  // namespace

Expr parse_expr(std::string_view text, const SymbolTable& table) {
    Parser p(text, table);
    try {
        Expr e = p.parse_expression();
        if (!p.eof()) p.fail("trailing input", p.pos);
        return e;
    } catch (const EvalError& err) {
        // canonicalization errors during parse (e.g. division by a zero
        // literal) are reported as parse errors with the current offset
        throw ParseError(err.what(), p.pos);
    }
}

}  // namespace flatlas
