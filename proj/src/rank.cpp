#include "flatlas/rank.hpp"

#include <gmpxx.h>

#include <stdexcept>

namespace flatlas {

namespace {

// Row-wise denominator clearing: returns an integer matrix with the same
// rank and column dependencies.
std::vector<std::vector<mpz_class>> to_integer_rows(const QMatrix& m) {
    std::vector<std::vector<mpz_class>> out(m.rows(), std::vector<mpz_class>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        mpz_class l = 1;
        for (std::size_t c = 0; c < m.cols(); ++c)
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.at(r, c).denominator().get_mpz_t());
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const Rational& v = m.at(r, c);
            out[r][c] = v.numerator() * (l / v.denominator());
        }
    }
    return out;
}

}  // namespace

std::size_t bareiss_rank(const QMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    auto a = to_integer_rows(m);
    const std::size_t rows = m.rows(), cols = m.cols();
    mpz_class prev = 1;
    std::size_t rank = 0;
    std::size_t pr = 0;  // pivot row
    for (std::size_t pc = 0; pc < cols && pr < rows; ++pc) {
        std::size_t sel = pr;
        while (sel < rows && a[sel][pc] == 0) ++sel;
        if (sel == rows) continue;
        if (sel != pr) std::swap(a[sel], a[pr]);
        for (std::size_t r = pr + 1; r < rows; ++r) {
            for (std::size_t c = pc + 1; c < cols; ++c) {
                mpz_class t = a[pr][pc] * a[r][c] - a[r][pc] * a[pr][c];
                mpz_divexact(a[r][c].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            a[r][pc] = 0;
        }
        prev = a[pr][pc];
        ++pr;
        ++rank;
    }
    return rank;
}

std::vector<std::size_t> pivot_columns(const QMatrix& m) {
    std::vector<std::size_t> pivots;
    if (m.rows() == 0 || m.cols() == 0) return pivots;
    auto a = to_integer_rows(m);
    const std::size_t rows = m.rows(), cols = m.cols();
    mpz_class prev = 1;
    std::size_t pr = 0;
    for (std::size_t pc = 0; pc < cols && pr < rows; ++pc) {
        std::size_t sel = pr;
        while (sel < rows && a[sel][pc] == 0) ++sel;
        if (sel == rows) continue;
        if (sel != pr) std::swap(a[sel], a[pr]);
        for (std::size_t r = pr + 1; r < rows; ++r) {
            for (std::size_t c = pc + 1; c < cols; ++c) {
                mpz_class t = a[pr][pc] * a[r][c] - a[r][pc] * a[pr][c];
                mpz_divexact(a[r][c].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            a[r][pc] = 0;
        }
        prev = a[pr][pc];
        pivots.push_back(pc);
        ++pr;
    }
    return pivots;
}

namespace {

// Reduced row echelon form in exact rational arithmetic; returns pivot
// column of each pivot row.
std::vector<std::size_t> rref(QMatrix& a) {
    const std::size_t rows = a.rows(), cols = a.cols();
    std::vector<std::size_t> pivots;
    std::size_t pr = 0;
    for (std::size_t pc = 0; pc < cols && pr < rows; ++pc) {
        std::size_t sel = pr;
        while (sel < rows && a.at(sel, pc).is_zero()) ++sel;
        if (sel == rows) continue;
        if (sel != pr)
            for (std::size_t c = 0; c < cols; ++c) std::swap(a.at(sel, c), a.at(pr, c));
        const Rational inv = a.at(pr, pc).inverse();
        for (std::size_t c = pc; c < cols; ++c) a.at(pr, c) *= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == pr || a.at(r, pc).is_zero()) continue;
            const Rational f = a.at(r, pc);
            for (std::size_t c = pc; c < cols; ++c) a.at(r, c) -= f * a.at(pr, c);
        }
        pivots.push_back(pc);
        ++pr;
    }
    return pivots;
}

}  // namespace

std::vector<std::vector<Rational>> nullspace(const QMatrix& m) {
    QMatrix a = m;
    const std::vector<std::size_t> pivots = rref(a);
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t p : pivots) is_pivot[p] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t fc = 0; fc < m.cols(); ++fc) {
        if (is_pivot[fc]) continue;
        std::vector<Rational> v(m.cols(), Rational(0));
        v[fc] = Rational(1);
        for (std::size_t pr = 0; pr < pivots.size(); ++pr) v[pivots[pr]] = -a.at(pr, fc);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<std::vector<Rational>> solve_square(const QMatrix& a, const std::vector<Rational>& b) {
    if (a.rows() != a.cols() || b.size() != a.rows())
        throw std::invalid_argument("solve_square: shape mismatch");
    const std::size_t n = a.rows();
    QMatrix aug(n, n + 1);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) aug.at(r, c) = a.at(r, c);
        aug.at(r, n) = b[r];
    }
    const std::vector<std::size_t> pivots = rref(aug);
    if (pivots.size() != n || pivots.back() != n - 1) {
        // singular (or inconsistent: pivot in the augmented column)
        return std::nullopt;
    }
    std::vector<Rational> x(n);
    for (std::size_t r = 0; r < n; ++r) x[pivots[r]] = aug.at(r, n);
    return x;
}

}  // namespace flatlas
