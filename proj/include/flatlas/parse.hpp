#ifndef FLATLAS_PARSE_HPP
#define FLATLAS_PARSE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "flatlas/expr.hpp"
#include "flatlas/symbol_table.hpp"

namespace flatlas {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t offset)
        : std::runtime_error(std::move(msg) + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Parse an expression against the CLI grammar:
///   expr   := ("+"|"-")? term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := atom ("^" integer)?
///   atom   := rational | decimal | identifier | "(" expr ")" | func "(" expr ")"
///   func   := sin | cos | exp | ln | sqrt
/// Decimals convert exactly (0.25 -> 1/4). Every identifier must resolve in
/// the table. Returns the canonical-form expression.
Expr parse_expr(std::string_view text, const SymbolTable& table);

}  // namespace flatlas

#endif  // FLATLAS_PARSE_HPP
