#ifndef FLATLAS_RANK_HPP
#define FLATLAS_RANK_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "flatlas/rational.hpp"

namespace flatlas {

/// Dense matrix of exact rationals.
class QMatrix {
public:
    QMatrix() : rows_(0), cols_(0) {}
    QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_, cols_;
    std::vector<Rational> data_;
};

/// Exact rank via fraction-free (Bareiss) Gaussian elimination: rows are
/// cleared to integers, then eliminated with exact integer divisions only.
std::size_t bareiss_rank(const QMatrix& m);

/// Column indices of a maximal independent set, scanned left to right
/// (greedy pivoting). Size equals the rank.
std::vector<std::size_t> pivot_columns(const QMatrix& m);

/// Basis of the right nullspace (Gauss-Jordan over the rationals).
std::vector<std::vector<Rational>> nullspace(const QMatrix& m);

/// Solve a square system exactly; nullopt when the matrix is singular.
std::optional<std::vector<Rational>> solve_square(const QMatrix& a, const std::vector<Rational>& b);

}  // namespace flatlas

#endif  // FLATLAS_RANK_HPP
