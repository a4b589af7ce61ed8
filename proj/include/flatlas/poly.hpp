#ifndef FLATLAS_POLY_HPP
#define FLATLAS_POLY_HPP

#include <map>
#include <optional>
#include <vector>

#include "flatlas/expr.hpp"

namespace flatlas {

/// Sparse multivariate polynomial: monomial (symbol -> positive exponent)
/// to coefficient.
using MonoKey = std::map<SymbolId, int>;
using Poly = std::map<MonoKey, Rational>;

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, const Rational& c);
Poly poly_pow(const Poly& a, long e);

/// Strict polynomial extraction; nullopt on Apply nodes, non-constant
/// denominators, or negative exponents.
std::optional<Poly> expr_to_poly(const Expr& e);

/// Rational-function normal form (numerator, denominator) with denominators
/// cleared bottom-up; nullopt on Apply nodes.
std::optional<std::pair<Poly, Poly>> expr_to_rational_poly(const Expr& e);

Expr poly_to_expr(const Poly& p);

long mono_degree(const MonoKey& m);

/// All monomials over `vars` with 1 <= total degree <= max_degree, graded
/// lexicographic (degree first, then variable order).
std::vector<MonoKey> monomials_up_to(const std::vector<SymbolId>& vars, int max_degree);

}  // namespace flatlas

#endif  // FLATLAS_POLY_HPP
