#ifndef FLATLAS_EXPR_HPP
#define FLATLAS_EXPR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "flatlas/rational.hpp"
#include "flatlas/symbol_table.hpp"

namespace flatlas {

enum class ExprKind : std::uint8_t { Constant, Variable, Sum, Product, Power, Quotient, Apply };

enum class Func : std::uint8_t { Sin, Cos, Exp, Ln, Sqrt };

const char* func_name(Func f);

class Expr;
struct ExprNode;

using PointMap = std::map<SymbolId, Rational>;
using FloatMap = std::map<SymbolId, double>;

/// Immutable symbolic scalar expression: rational functions over exact
/// rationals plus the whitelisted elementary functions sin, cos, exp, ln,
/// sqrt. The canonical-form factories flatten sums/products, fold constants,
/// collect like terms, and cancel monomial gcds in quotients, so structural
/// equality of canonical forms is decidable with compare().
class Expr {
public:
    Expr();  // Constant 0

    ExprKind kind() const;
    const Rational& constant_value() const;  // Constant
    SymbolId symbol() const;                 // Variable
    const std::vector<Expr>& children() const;
    long power_exponent() const;  // Power
    Func function() const;        // Apply
    const Expr& base() const;     // Power
    const Expr& numerator() const;
    const Expr& denominator() const;
    const Expr& argument() const;  // Apply

    bool is_constant() const { return kind() == ExprKind::Constant; }
    bool is_zero() const;
    bool is_one() const;

    // Canonical-form factories.
    static Expr constant(Rational r);
    static Expr integer(long v) { return constant(Rational(v)); }
    static Expr variable(SymbolId s);
    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);
    static Expr power(Expr base, long exponent);
    static Expr quotient(Expr num, Expr den);
    static Expr apply(Func f, Expr arg);

    // Raw constructors bypassing canonicalization (pre-canonical trees for
    // tests and parser internals). evaluate()/canonical() accept such trees.
    static Expr raw_sum(std::vector<Expr> terms);
    static Expr raw_product(std::vector<Expr> factors);
    static Expr raw_power(Expr base, long exponent);
    static Expr raw_quotient(Expr num, Expr den);

    friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
    friend Expr operator-(const Expr& a, const Expr& b) {
        return sum({a, product({integer(-1), b})});
    }
    friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
    friend Expr operator/(const Expr& a, const Expr& b) { return quotient(a, b); }
    Expr operator-() const { return product({integer(-1), *this}); }

    const ExprNode* node() const { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;
    friend struct ExprFactory;
};

struct ExprNode {
    ExprKind kind;
    Func func = Func::Sin;  // Apply
    long exponent = 0;      // Power
    SymbolId sym = 0;       // Variable
    Rational value;         // Constant
    std::vector<Expr> kids;
};

/// Fixed total order on expressions; 0 iff structurally equal.
int compare(const Expr& a, const Expr& b);

inline bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
inline bool operator!=(const Expr& a, const Expr& b) { return compare(a, b) != 0; }

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

/// Re-canonicalize an arbitrary (possibly raw) tree bottom-up.
Expr canonical(const Expr& e);

/// Exact partial derivative, canonical form. Chain rule for Apply nodes;
/// derivatives of ln/sqrt are produced formally, domain issues surface at
/// evaluation time.
Expr differentiate(const Expr& e, SymbolId v);

/// Substitute symbols by expressions; result is canonical.
Expr substitute(const Expr& e, const std::map<SymbolId, Expr>& repl);

enum class EvalErrorKind {
    DivisionByZero,
    UnboundSymbol,
    TranscendentalInExactMode,
    NonFinite,
    Domain,
};

class EvalError : public std::runtime_error {
public:
    EvalError(EvalErrorKind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
    EvalErrorKind kind() const { return kind_; }

private:
    EvalErrorKind kind_;
};

/// Exact evaluation over the rationals. Throws EvalError on division by zero
/// at the point, unbound symbols, or Apply nodes (exact mode carries no
/// transcendental arithmetic; callers route those through evaluate_float).
Rational evaluate(const Expr& e, const PointMap& point);

/// Double-precision evaluation; non-finite intermediate values are errors.
double evaluate_float(const Expr& e, const FloatMap& point);

void collect_symbols(const Expr& e, std::set<SymbolId>& out);
std::set<SymbolId> free_symbols(const Expr& e);
bool depends_on(const Expr& e, SymbolId v);

/// Heuristic total degree used for pivot tie-breaking: variables count 1,
/// Apply nodes 2, quotients add numerator and denominator degrees.
long total_degree(const Expr& e);
std::size_t node_count(const Expr& e);

/// Render to the CLI expression grammar; parse(render(e)) round-trips to a
/// structurally equal canonical expression.
std::string render(const Expr& e, const SymbolTable& table);

}  // namespace flatlas

#endif  // FLATLAS_EXPR_HPP
