#include "platonic/linalg.hpp"

#include <stdexcept>

namespace platonic::linalg {

namespace {

using Matrix = std::vector<Vector>;  // row-major

// Reduced row echelon form in place; returns pivot column per pivot row.
std::vector<std::size_t> rref(Matrix& m, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
        std::size_t pick = row;
        while (pick < m.size() && m[pick][col] == 0) ++pick;
        if (pick == m.size()) continue;
        std::swap(m[row], m[pick]);
        Rational inv = 1 / m[row][col];
        for (std::size_t c = col; c < cols; ++c) m[row][c] *= inv;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col] == 0) continue;
            Rational factor = m[r][col];
            for (std::size_t c = col; c < cols; ++c) m[r][c] -= factor * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

Matrix from_columns(const Columns& columns, std::size_t rows) {
    Matrix m(rows, Vector(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != rows) throw std::invalid_argument("linalg: column length mismatch");
        for (std::size_t i = 0; i < rows; ++i) m[i][j] = columns[j][i];
    }
    return m;
}

Columns kernel(Matrix m, std::size_t cols) {
    auto pivots = rref(m, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) is_pivot[p] = true;
    Columns basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        Vector v(cols);
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace

std::size_t rank(const Columns& columns, std::size_t rows) {
    Matrix m = from_columns(columns, rows);
    return rref(m, columns.size()).size();
}

std::optional<Vector> solve_in_span(const Columns& columns, const Vector& target) {
    const std::size_t rows = target.size();
    const std::size_t n = columns.size();
    Matrix m = from_columns(columns, rows);
    for (std::size_t i = 0; i < rows; ++i) m[i].push_back(target[i]);
    auto pivots = rref(m, n + 1);
    if (!pivots.empty() && pivots.back() == n) return std::nullopt;
    Vector x(n);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = m[r][n];
    return x;
}

Columns null_space(const Columns& columns, std::size_t rows) {
    return kernel(from_columns(columns, rows), columns.size());
}

Columns left_null_space(const Columns& columns, std::size_t rows) {
    Matrix m;
    m.reserve(columns.size());
    for (const auto& c : columns) {
        if (c.size() != rows) throw std::invalid_argument("linalg: column length mismatch");
        m.push_back(c);
    }
    return kernel(std::move(m), rows);
}

Rational dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace platonic::linalg
